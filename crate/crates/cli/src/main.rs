use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use homodyne_cli::config::{EngineKind, OutputFormat, ScenarioConfig};
use homodyne_cli::presets::{figure2, Panel};
use homodyne_cli::{oracle_check, run_acceptance, run_scenario};

#[derive(Parser)]
#[command(name = "homodyne", version, about = "Photon-counting statistics of balanced homodyne detection")]
struct Cli {
    /// Perturb the Wigner-d recursion seeds (negative control for `accept`).
    #[arg(long, global = true, hide = true)]
    corrupt_wigner_seed: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Write here instead of the config's output path or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Comma-separated even series orders, e.g. `0,2,4`.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    #[arg(long)]
    two_j: Option<u32>,
    #[arg(long)]
    window_sigmas: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact count distribution.
    Exact {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Strong-oscillator quadrature POVM.
    Asymptotic {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Correction series at the requested orders.
    Series {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Preset scenario with exact, asymptotic and series columns.
    Figure2 {
        #[arg(value_parser = parse_panel)]
        panel: Panel,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Exact engine against the coherent, brute-force and Wigner-d oracles.
    OracleCheck,
    /// Run the acceptance suite.
    Accept {
        /// Directory of fixture configs.
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/acceptance"))]
        config: PathBuf,
        /// Only these criteria, comma-separated.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn parse_panel(s: &str) -> Result<Panel, String> {
    s.parse()
}

fn apply(mut config: ScenarioConfig, o: &Overrides, only: Option<EngineKind>) -> anyhow::Result<ScenarioConfig> {
    if let Some(engine) = only {
        config.engines = vec![engine];
        if engine != EngineKind::Series {
            config.series_orders = None;
        }
    }
    if let Some(orders) = &o.orders {
        if !config.engines.contains(&EngineKind::Series) {
            bail!("--orders given but the series engine is not selected");
        }
        config.series_orders = Some(orders.clone());
    }
    if let Some(two_j) = o.two_j {
        config.two_j = Some(two_j);
    }
    if let Some(c) = o.window_sigmas {
        // a window request drops the config's fixed two_j unless --two-j is also given
        config.two_j = o.two_j;
        config.window.c_sigmas = c;
    }
    if let Some(path) = &o.out {
        config.output.path = Some(path.clone());
    }
    if let Some(format) = o.format {
        config.output.format = format;
    }
    config.validate()?;
    Ok(config)
}

fn emit(config: &ScenarioConfig) -> anyhow::Result<homodyne_cli::ScenarioTable> {
    let table = run_scenario(config)?;
    match &config.output.path {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            table.write(config.output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(config.output.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(table)
}

fn run_engine(path: &Path, o: &Overrides, engine: EngineKind) -> anyhow::Result<ExitCode> {
    let config = apply(ScenarioConfig::load(path)?, o, Some(engine))?;
    emit(&config)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if cli.corrupt_wigner_seed {
        homodyne_core::special::set_seed_corruption(true);
    }
    match cli.command {
        Command::Exact { config, overrides } => run_engine(&config, &overrides, EngineKind::Exact),
        Command::Asymptotic { config, overrides } => run_engine(&config, &overrides, EngineKind::Asymptotic),
        Command::Series { config, overrides } => run_engine(&config, &overrides, EngineKind::Series),
        Command::Figure2 { panel, overrides } => {
            let config = apply(figure2(panel), &overrides, None)?;
            let table = emit(&config)?;
            if let Some(errs) = table.series_sup_errors() {
                for (k, e) in errs {
                    eprintln!("order {k}: sup |series - exact| = {e:.3e}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck => {
            let report = oracle_check()?;
            println!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Accept { config, criteria } => {
            let report = run_acceptance(&config, &criteria)?;
            println!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
