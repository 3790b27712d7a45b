//! Running a [`ScenarioConfig`] into a table and writing it out.

use std::io::Write;

use homodyne_core::exact::ExactEngine;
use homodyne_core::povm::{AsymptoticEngine, SeriesEngine, SeriesOrder};
use homodyne_core::{CountOutcome, LocalOscillator, LogWeight, WindowPolicy};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{EngineKind, OutputFormat, ScenarioConfig};
use crate::RunError;

/// Probabilities below this are written as `0`.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub two_j: u32,
    pub two_m: i32,
    pub x: f64,
    pub exact: Option<LogWeight>,
    pub asymptotic: Option<f64>,
    /// One entry per requested order, ascending.
    pub series: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    pub engines: Vec<EngineKind>,
    pub orders: Vec<u32>,
    pub rows: Vec<Row>,
}

/// Evaluate every outcome of the configured window.
///
/// Rows come out sorted by `two_j`, then `two_m`. Multiplets are computed in
/// parallel and collected in order, so the table does not depend on the
/// thread count.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioTable, RunError> {
    config.validate()?;
    let signal = config.state.build()?;
    let lo = LocalOscillator::new(config.lo.amplitude, config.lo.phase)?;
    let engines = config.engine_set();
    let orders = config.orders();

    let exact = match config.has(EngineKind::Exact) {
        true => Some(ExactEngine::new(&signal, &lo)?),
        false => None,
    };
    let asymptotic = match config.has(EngineKind::Asymptotic) {
        true => Some(AsymptoticEngine::new(&signal, &lo)?),
        false => None,
    };
    let series = orders
        .iter()
        .map(|&k| SeriesEngine::new(&signal, &lo, SeriesOrder::new(k)?))
        .collect::<homodyne_core::Result<Vec<_>>>()?;

    let policy = match config.two_j {
        Some(two_j) => WindowPolicy { two_m_cap: config.window.two_m_cap, ..WindowPolicy::single(two_j) },
        None => WindowPolicy { two_m_cap: config.window.two_m_cap, ..WindowPolicy::sigmas(config.window.c_sigmas) },
    };
    let (low, high) = policy.two_j_bounds(&lo);
    let a = lo.amplitude();
    let convention = config.x_convention;

    let blocks: Vec<Vec<Row>> = (low..=high)
        .into_par_iter()
        .map(|two_j| -> homodyne_core::Result<Vec<Row>> {
            let outcomes: Vec<CountOutcome> = CountOutcome::multiplet(two_j, policy.two_m_cap).collect();
            let exact_p = match &exact {
                Some(e) => {
                    let ms: Vec<i32> = outcomes.iter().map(|o| o.two_m()).collect();
                    Some(e.multiplet_log_probabilities(two_j, &ms)?)
                }
                None => None,
            };
            outcomes
                .iter()
                .enumerate()
                .map(|(i, &o)| {
                    Ok(Row {
                        two_j,
                        two_m: o.two_m(),
                        x: convention.x(o, a)?,
                        exact: exact_p.as_ref().map(|p| p[i]),
                        asymptotic: asymptotic.as_ref().map(|e| e.probability(o, convention)).transpose()?,
                        series: series.iter().map(|s| s.probability(o)).collect::<homodyne_core::Result<_>>()?,
                    })
                })
                .collect()
        })
        .collect::<homodyne_core::Result<_>>()?;

    Ok(ScenarioTable { engines, orders, rows: blocks.into_iter().flatten().collect() })
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_prob(p: f64) -> String {
    if p.abs() < UNDERFLOW {
        "0".to_string()
    } else {
        fmt_real(p)
    }
}

fn clamp(p: f64) -> f64 {
    if p.abs() < UNDERFLOW {
        0.0
    } else {
        p
    }
}

fn log_value(p: f64) -> Value {
    if p > 0.0 {
        Value::from(p.ln())
    } else {
        Value::Null
    }
}

impl ScenarioTable {
    /// Probability columns present in this table, in output order.
    pub fn probability_columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        if self.engines.contains(&EngineKind::Exact) {
            cols.push("p_exact".to_string());
        }
        if self.engines.contains(&EngineKind::Asymptotic) {
            cols.push("p_asymptotic".to_string());
        }
        for k in &self.orders {
            cols.push(format!("p_series_{k}"));
        }
        cols
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["two_j".to_string(), "two_m".to_string(), "x".to_string()];
        h.extend(self.probability_columns());
        h
    }

    pub fn exact(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.exact.map(|p| p.value())).collect()
    }

    pub fn asymptotic(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.asymptotic).collect()
    }

    pub fn series(&self, order: u32) -> Option<Vec<f64>> {
        let k = self.orders.iter().position(|&o| o == order)?;
        Some(self.rows.iter().map(|r| r.series[k]).collect())
    }

    /// `max |p_order - p_exact|` over the rows, per requested order.
    pub fn series_sup_errors(&self) -> Option<Vec<(u32, f64)>> {
        let exact = self.exact()?;
        Some(
            self.orders
                .iter()
                .map(|&k| {
                    let s = self.series(k).expect("order is listed");
                    (k, exact.iter().zip(&s).map(|(e, p)| (e - p).abs()).fold(0.0, f64::max))
                })
                .collect(),
        )
    }

    fn probability_values(row: &Row) -> Vec<(Option<LogWeight>, f64)> {
        let mut v = Vec::new();
        if let Some(p) = row.exact {
            v.push((Some(p), p.value()));
        }
        if let Some(p) = row.asymptotic {
            v.push((None, p));
        }
        v.extend(row.series.iter().map(|&p| (None, p)));
        v
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = vec![row.two_j.to_string(), row.two_m.to_string(), fmt_real(row.x)];
            rec.extend(Self::probability_values(row).into_iter().map(|(_, p)| fmt_prob(p)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// An array of row objects. Each `p_*` has a `log_p_*` companion, `null` when `p ≤ 0`.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), RunError> {
        let names = self.probability_columns();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                obj.insert("two_j".into(), row.two_j.into());
                obj.insert("two_m".into(), row.two_m.into());
                obj.insert("x".into(), row.x.into());
                for (name, (log, p)) in names.iter().zip(Self::probability_values(row)) {
                    obj.insert(name.clone(), clamp(p).into());
                    let lp = match log {
                        Some(l) if l.sign() > 0 => Value::from(l.log_magnitude()),
                        Some(_) => Value::Null,
                        None => log_value(p),
                    };
                    obj.insert(format!("log_{name}"), lp);
                }
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<(), RunError> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    pub fn to_bytes(&self, format: OutputFormat) -> Result<Vec<u8>, RunError> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(buf)
    }
}

/// Rows of `ScenarioTable::exact` summed; handy for window checks.
pub fn exact_mass(table: &ScenarioTable) -> Option<f64> {
    table.exact().map(|p| homodyne_core::special::Neumaier::from_iter(p).total())
}
