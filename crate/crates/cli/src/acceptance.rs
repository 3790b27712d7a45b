//! The acceptance suite: ten criteria, each driven by a JSON fixture.
//!
//! Fixtures live in one directory, one file per criterion (`c01.json` to
//! `c10.json`). Each criterion reports what it measured against its limit.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use homodyne_core::exact::{brute_force_bs_oracle, coherent_oracle, distribution, ExactEngine};
use homodyne_core::povm::{quadrature_matrix_element, strong_lo_report, AsymptoticEngine, XConvention};
use homodyne_core::special::{wigner_d_oracle, wigner_d_pi2};
use homodyne_core::states::{coherent_quadrature_density, StateSpec};
use homodyne_core::{FockVector, LocalOscillator, Signal, WindowPolicy};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, ScenarioConfig};
use crate::scenario::run_scenario;
use crate::RunError;

pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub limit: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} (limit {}) [{:.2} s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.limit,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AcceptanceReport {
    pub results: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failing(&self) -> Vec<u32> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.id).collect()
    }

    pub fn get(&self, id: u32) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

impl fmt::Display for AcceptanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let failing = self.failing();
        if failing.is_empty() {
            write!(f, "all {} criteria passed", self.results.len())
        } else {
            let ids: Vec<String> = failing.iter().map(u32::to_string).collect();
            write!(f, "{} of {} criteria failed: {}", failing.len(), self.results.len(), ids.join(", "))
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pure(spec: &StateSpec) -> Result<FockVector, RunError> {
    match spec.build()? {
        Signal::Pure(v) => Ok(v),
        Signal::Mixed(_) => Err(RunError::Fixtures(format!("{spec:?} must be a pure state"))),
    }
}

fn timed<F>(id: u32, name: &'static str, limit_seconds: Option<f64>, body: F) -> Result<CriterionResult, RunError>
where
    F: FnOnce() -> Result<(bool, String, String), RunError>,
{
    let start = Instant::now();
    let (ok, measured, mut limit) = body()?;
    let seconds = start.elapsed().as_secs_f64();
    let in_time = limit_seconds.map_or(true, |t| seconds <= t);
    if let Some(t) = limit_seconds {
        limit = format!("{limit}, {t} s");
    }
    Ok(CriterionResult { id, name, passed: ok && in_time, measured, limit, seconds })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentOracleFixture {
    pub amplitude: f64,
    pub phases: Vec<f64>,
    /// `[re, im]` pairs
    pub betas: Vec<[f64; 2]>,
    pub cutoff: usize,
    pub c_sigmas: f64,
    pub min_probability: f64,
    pub max_rel_error: f64,
    pub max_seconds: f64,
}

impl Default for CoherentOracleFixture {
    fn default() -> Self {
        Self {
            amplitude: 20.0,
            phases: vec![0.0, std::f64::consts::FRAC_PI_4],
            betas: vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
            cutoff: 80,
            c_sigmas: 10.0,
            min_probability: 1e-12,
            max_rel_error: 1e-9,
            max_seconds: 60.0,
        }
    }
}

pub fn coherent_oracle_equivalence(f: &CoherentOracleFixture) -> Result<CriterionResult, RunError> {
    timed(1, "coherent oracle equivalence", Some(f.max_seconds), || {
        let mut worst = 0.0_f64;
        let mut checked = 0usize;
        for &[re, im] in &f.betas {
            let beta = c(re, im);
            let psi = FockVector::coherent(beta, f.cutoff)?;
            for &phi in &f.phases {
                let lo = LocalOscillator::new(f.amplitude, phi)?;
                let dist = distribution(&psi, &lo, &WindowPolicy::sigmas(f.c_sigmas))?;
                for (o, p) in dist.iter() {
                    let q = coherent_oracle(beta, &lo, o);
                    if q > f.min_probability {
                        worst = worst.max((p - q).abs() / q);
                        checked += 1;
                    }
                }
            }
        }
        Ok((
            worst <= f.max_rel_error && checked > 0,
            format!("max rel error {worst:.3e} over {checked} outcomes"),
            format!("{:e}", f.max_rel_error),
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteForceFixture {
    pub signals: Vec<StateSpec>,
    /// `[A, phase]` pairs
    pub oscillators: Vec<[f64; 2]>,
    pub cap: usize,
    pub max_error: f64,
    pub max_seconds: f64,
}

impl Default for BruteForceFixture {
    fn default() -> Self {
        Self {
            signals: vec![
                StateSpec::Number { n: 0, cutoff: None },
                StateSpec::Number { n: 1, cutoff: None },
                StateSpec::Number { n: 2, cutoff: None },
                StateSpec::Coherent { beta_re: 0.5, beta_im: 0.0, cutoff: Some(25) },
            ],
            oscillators: vec![[0.5, 0.0], [1.0, 1.2], [1.5, -0.4]],
            cap: 30,
            max_error: 1e-10,
            max_seconds: 30.0,
        }
    }
}

pub fn brute_force_triangle(f: &BruteForceFixture) -> Result<CriterionResult, RunError> {
    timed(2, "brute-force triangle", Some(f.max_seconds), || {
        let mut worst = 0.0_f64;
        for spec in &f.signals {
            let psi = pure(spec)?;
            for &[a, phi] in &f.oscillators {
                if a > 1.5 {
                    return Err(RunError::Fixtures(format!("oscillator amplitude {a} is above 1.5")));
                }
                let lo = LocalOscillator::new(a, phi)?;
                let brute = brute_force_bs_oracle(&psi, &lo, f.cap)?;
                let engine = ExactEngine::new(&psi, &lo)?;
                for (o, p) in brute.iter() {
                    worst = worst.max((engine.log_probability(o)?.value() - p).abs());
                }
            }
        }
        Ok((worst <= f.max_error, format!("sup error {worst:.3e}"), format!("{:e}", f.max_error)))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerFixture {
    pub oracle_max_two_j: u32,
    pub max_oracle_error: f64,
    pub unitarity_max_two_j: u32,
    pub max_unitarity_error: f64,
    /// Multiplets where every pair of columns is checked for orthogonality.
    pub orthogonality_two_j: Vec<u32>,
}

impl Default for WignerFixture {
    fn default() -> Self {
        Self {
            oracle_max_two_j: 40,
            max_oracle_error: 1e-10,
            unitarity_max_two_j: 600,
            max_unitarity_error: 1e-10,
            orthogonality_two_j: vec![599, 600],
        }
    }
}

fn columns(two_j: u32) -> homodyne_core::Result<Vec<Vec<f64>>> {
    let t = two_j as i32;
    (0..=t).map(|k| wigner_d_pi2(two_j, -t + 2 * k).map(|col| col.values().to_vec())).collect()
}

pub fn wigner_validation(f: &WignerFixture) -> Result<CriterionResult, RunError> {
    timed(3, "Wigner-d validation", None, || {
        let oracle_err = (0..=f.oracle_max_two_j)
            .into_par_iter()
            .map(|two_j| -> homodyne_core::Result<f64> {
                let dense = wigner_d_oracle(two_j)?;
                let cols = columns(two_j)?;
                let mut worst = 0.0_f64;
                for (k, col) in cols.iter().enumerate() {
                    for (i, v) in col.iter().enumerate() {
                        worst = worst.max((v - dense[(i, k)]).abs());
                    }
                }
                Ok(worst)
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let norm_err = (0..=f.unitarity_max_two_j)
            .into_par_iter()
            .map(|two_j| -> homodyne_core::Result<f64> {
                Ok(columns(two_j)?
                    .iter()
                    .map(|col| (col.iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
                    .fold(0.0, f64::max))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let mut ortho_err = 0.0_f64;
        for &two_j in &f.orthogonality_two_j {
            let cols = columns(two_j)?;
            ortho_err = ortho_err.max(
                (0..cols.len())
                    .into_par_iter()
                    .map(|a| {
                        (a + 1..cols.len())
                            .map(|b| cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum::<f64>().abs())
                            .fold(0.0, f64::max)
                    })
                    .reduce(|| 0.0, f64::max),
            );
        }
        let unit = norm_err.max(ortho_err);
        Ok((
            oracle_err <= f.max_oracle_error && unit <= f.max_unitarity_error,
            format!(
                "oracle error {oracle_err:.3e} (2j <= {}), unitarity error {unit:.3e} (2j <= {})",
                f.oracle_max_two_j, f.unitarity_max_two_j
            ),
            format!("{:e} and {:e}", f.max_oracle_error, f.max_unitarity_error),
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationFixture {
    pub amplitudes: Vec<f64>,
    pub phase: f64,
    pub signals: Vec<StateSpec>,
    pub c_sigmas: f64,
    pub max_deficit: f64,
}

pub fn normalization(f: &NormalizationFixture) -> Result<CriterionResult, RunError> {
    timed(4, "normalization", None, || {
        let mut worst = 0.0_f64;
        for spec in &f.signals {
            let signal = spec.build()?;
            for &a in &f.amplitudes {
                let lo = LocalOscillator::new(a, f.phase)?;
                let dist = distribution(&signal, &lo, &WindowPolicy::sigmas(f.c_sigmas))?;
                worst = worst.max(1.0 - dist.total_mass);
            }
        }
        Ok((worst <= f.max_deficit, format!("largest 1 - mass {worst:.3e}"), format!("{:e}", f.max_deficit)))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticFixture {
    pub state: StateSpec,
    pub amplitudes: Vec<f64>,
    /// Half-width of the `2j` grid in units of `A`.
    pub c_sigmas: f64,
    pub x_convention: XConvention,
    pub max_peak_fraction: f64,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

pub fn asymptotic_convergence(f: &AsymptoticFixture) -> Result<CriterionResult, RunError> {
    timed(5, "asymptotic convergence", None, || {
        let signal = f.state.build()?;
        let mut sups = Vec::new();
        let mut peaks = Vec::new();
        for &a in &f.amplitudes {
            let lo = LocalOscillator::new(a, 0.0)?;
            let dist = distribution(&signal, &lo, &WindowPolicy::sigmas(f.c_sigmas))?;
            let asym = AsymptoticEngine::new(&signal, &lo)?;
            let (sup, peak) = dist
                .window
                .par_iter()
                .zip(&dist.probs)
                .map(|(&o, &p)| asym.probability(o, f.x_convention).map(|q| ((p - q).abs(), p)))
                .try_reduce(|| (0.0, 0.0), |x, y| Ok((x.0.max(y.0), x.1.max(y.1))))?;
            sups.push(sup);
            peaks.push(peak);
        }
        let last = sups.last().copied().unwrap_or(f64::INFINITY) / peaks.last().copied().unwrap_or(0.0);
        Ok((
            strictly_decreasing(&sups) && last <= f.max_peak_fraction,
            format!("sup errors [{}], last / peak {last:.4}", list(&sups)),
            format!("decreasing, {} of peak", f.max_peak_fraction),
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesPanel {
    pub label: String,
    pub scenario: ScenarioConfig,
    /// Whether the order-4 / order-0 ratio is held to `max_ratio`.
    pub ratio_checked: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFixture {
    pub panels: Vec<SeriesPanel>,
    pub max_ratio: f64,
    pub max_seconds: f64,
}

pub fn series_reproduction(f: &SeriesFixture) -> Result<CriterionResult, RunError> {
    timed(6, "series orders improve", Some(f.max_seconds), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for panel in &f.panels {
            let table = run_scenario(&panel.scenario)?;
            let errs = table.series_sup_errors().ok_or_else(|| {
                RunError::Fixtures(format!("panel {} needs the exact and series engines", panel.label))
            })?;
            let e: Vec<f64> = errs.iter().map(|&(_, e)| e).collect();
            let ratio = e.last().unwrap_or(&f64::NAN) / e[0];
            let mono = strictly_decreasing(&e);
            let within = !panel.ratio_checked || ratio <= f.max_ratio;
            ok &= mono && within;
            parts.push(format!(
                "{}: [{}] ratio {ratio:.3}{}{}",
                panel.label,
                list(&e),
                if mono { "" } else { " not decreasing" },
                if within { "" } else { " over limit" }
            ));
        }
        Ok((ok, parts.join("; "), format!("decreasing, ratio <= {}", f.max_ratio)))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixElementFixture {
    pub gammas: Vec<[f64; 2]>,
    pub cutoff: usize,
    pub max_power: u32,
    pub xs: Vec<f64>,
    pub max_error: f64,
}

pub fn coherent_matrix_elements(f: &MatrixElementFixture) -> Result<CriterionResult, RunError> {
    timed(7, "coherent matrix elements", None, || {
        let mut worst = 0.0_f64;
        for &[re, im] in &f.gammas {
            let gamma = c(re, im);
            let psi = FockVector::coherent(gamma, f.cutoff)?;
            for r in 0..=f.max_power {
                for s in 0..=f.max_power {
                    for &x in &f.xs {
                        let got = quadrature_matrix_element(&psi, r, s, x)?;
                        let expect = gamma.powu(r) * gamma.conj().powu(s) * coherent_quadrature_density(gamma, x);
                        worst = worst.max((got - expect).norm());
                    }
                }
            }
        }
        Ok((worst <= f.max_error, format!("max error {worst:.3e}"), format!("{:e}", f.max_error)))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalFixture {
    pub beta: [f64; 2],
    pub cutoff: usize,
    pub amplitudes: Vec<f64>,
    pub c_sigmas: f64,
    pub max_peak_fraction: f64,
}

pub fn marginal_law(f: &MarginalFixture) -> Result<CriterionResult, RunError> {
    timed(8, "difference marginal", None, || {
        let beta = c(f.beta[0], f.beta[1]);
        let psi = FockVector::coherent(beta, f.cutoff)?;
        let mut rel = Vec::new();
        for &a in &f.amplitudes {
            let lo = LocalOscillator::new(a, 0.0)?;
            let dist = distribution(&psi, &lo, &WindowPolicy::sigmas(f.c_sigmas))?;
            let mut sup = 0.0_f64;
            let mut peak = 0.0_f64;
            for (two_m, p) in dist.marginal_difference() {
                let x = std::f64::consts::SQRT_2 * f64::from(two_m) / 2.0 / a;
                let q = coherent_quadrature_density(beta, x) / (std::f64::consts::SQRT_2 * a);
                sup = sup.max((p - q).abs());
                peak = peak.max(p);
            }
            rel.push(sup / peak);
        }
        let last = *rel.last().unwrap_or(&f64::INFINITY);
        Ok((
            strictly_decreasing(&rel) && last <= f.max_peak_fraction,
            format!("sup / peak [{}]", list(&rel)),
            format!("decreasing, {} at the largest A", f.max_peak_fraction),
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrongLoFixture {
    pub beta: [f64; 2],
    pub cutoff: usize,
    pub amplitudes: Vec<f64>,
    pub expected_exponent: f64,
    pub exponent_tolerance: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

pub fn strong_lo_scaling(f: &StrongLoFixture) -> Result<CriterionResult, RunError> {
    timed(9, "strong-oscillator scaling", None, || {
        let psi = FockVector::coherent(c(f.beta[0], f.beta[1]), f.cutoff)?;
        let ratios = f
            .amplitudes
            .iter()
            .map(|&a| Ok(strong_lo_report(&psi, &LocalOscillator::new(a, 0.0)?)?.correction_ratio))
            .collect::<Result<Vec<f64>, RunError>>()?;
        let slope = log_log_slope(&f.amplitudes, &ratios);
        Ok((
            (slope - f.expected_exponent).abs() <= f.exponent_tolerance,
            format!("ratios [{}], exponent {slope:.3}", list(&ratios)),
            format!("{} +- {}", f.expected_exponent, f.exponent_tolerance),
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeterminismFixture {
    pub scenarios: Vec<ScenarioConfig>,
    pub repeats: usize,
}

pub fn determinism(f: &DeterminismFixture) -> Result<CriterionResult, RunError> {
    timed(10, "determinism", None, || {
        let mut identical = true;
        let mut bytes = 0usize;
        for scenario in &f.scenarios {
            for format in [OutputFormat::Csv, OutputFormat::Json] {
                let first = run_scenario(scenario)?.to_bytes(format)?;
                bytes += first.len();
                for _ in 1..f.repeats.max(2) {
                    identical &= run_scenario(scenario)?.to_bytes(format)? == first;
                }
            }
        }
        Ok((
            identical,
            format!("{} scenarios x {} runs, {bytes} bytes, {}", f.scenarios.len(), f.repeats.max(2), if identical { "identical" } else { "differ" }),
            "byte-identical".to_string(),
        ))
    })
}

fn fixture_path(dir: &Path, id: u32) -> PathBuf {
    dir.join(format!("c{id:02}.json"))
}

fn load<T: DeserializeOwned>(dir: &Path, id: u32) -> Result<T, RunError> {
    let path = fixture_path(dir, id);
    let text = fs::read_to_string(&path)
        .map_err(|e| RunError::Fixtures(format!("missing fixture {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Fixtures(format!("{}: {e}", path.display())))
}

fn check_dir(dir: &Path) -> Result<(), RunError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| RunError::Fixtures(format!("cannot read fixture directory {}: {e}", dir.display())))?;
    let any = entries.filter_map(|e| e.ok()).any(|e| e.path().extension().is_some_and(|x| x == "json"));
    if !any {
        return Err(RunError::Fixtures(format!("no fixture configs in {}", dir.display())));
    }
    Ok(())
}

pub fn run_criterion(dir: &Path, id: u32) -> Result<CriterionResult, RunError> {
    match id {
        1 => coherent_oracle_equivalence(&load(dir, id)?),
        2 => brute_force_triangle(&load(dir, id)?),
        3 => wigner_validation(&load(dir, id)?),
        4 => normalization(&load(dir, id)?),
        5 => asymptotic_convergence(&load(dir, id)?),
        6 => series_reproduction(&load(dir, id)?),
        7 => coherent_matrix_elements(&load(dir, id)?),
        8 => marginal_law(&load(dir, id)?),
        9 => strong_lo_scaling(&load(dir, id)?),
        10 => determinism(&load(dir, id)?),
        other => Err(RunError::Fixtures(format!("no criterion {other}"))),
    }
}

/// Run the selected criteria (all when `only` is empty) from `dir`.
pub fn run_acceptance(dir: &Path, only: &[u32]) -> Result<AcceptanceReport, RunError> {
    check_dir(dir)?;
    let ids: Vec<u32> = if only.is_empty() { CRITERIA.to_vec() } else { only.to_vec() };
    let results = ids.iter().map(|&id| run_criterion(dir, id)).collect::<Result<_, _>>()?;
    Ok(AcceptanceReport { results })
}

/// Exact engine against both oracles and the Wigner-d oracle, built-in parameters.
pub fn oracle_check() -> Result<AcceptanceReport, RunError> {
    Ok(AcceptanceReport {
        results: vec![
            coherent_oracle_equivalence(&CoherentOracleFixture::default())?,
            brute_force_triangle(&BruteForceFixture::default())?,
            wigner_validation(&WignerFixture::default())?,
        ],
    })
}
