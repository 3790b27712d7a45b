use std::fs;
use std::path::{Path, PathBuf};

use homodyne_core::povm::XConvention;
use homodyne_core::states::StateSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("config {path}: {source}")]
    Schema { path: PathBuf, source: serde_json::Error },

    #[error("config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Exact,
    Asymptotic,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}`, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoConfig {
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(default = "default_sigmas")]
    pub c_sigmas: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_m_cap: Option<u32>,
}

fn default_sigmas() -> f64 {
    10.0
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { c_sigmas: default_sigmas(), two_m_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// One run: a signal, an oscillator, a window and the engines to evaluate.
///
/// ```json
/// {"state": {"type": "number", "n": 6},
///  "lo": {"A": 20.0, "phase": 0.0},
///  "two_j": 367,
///  "engines": ["exact", "series"],
///  "series_orders": [0, 2, 4]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub state: StateSpec,
    pub lo: LoConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j: Option<u32>,
    #[serde(default)]
    pub window: WindowConfig,
    pub engines: Vec<EngineKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_orders: Option<Vec<u32>>,
    #[serde(default)]
    pub x_convention: XConvention,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|source| ConfigError::Schema { path: path.to_path_buf(), source })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.engines.is_empty() {
            return Err(ConfigError::Invalid { field: "engines", reason: "select at least one engine".into() });
        }
        let series = self.engines.contains(&EngineKind::Series);
        match (&self.series_orders, series) {
            (None, true) => {
                return Err(ConfigError::Invalid {
                    field: "series_orders",
                    reason: "required when the series engine is selected".into(),
                })
            }
            (Some(_), false) => {
                return Err(ConfigError::Invalid {
                    field: "series_orders",
                    reason: "given but the series engine is not selected".into(),
                })
            }
            (Some(orders), true) if orders.is_empty() => {
                return Err(ConfigError::Invalid { field: "series_orders", reason: "empty list".into() })
            }
            _ => {}
        }
        if !(self.lo.amplitude.is_finite() && self.lo.amplitude > 0.0) {
            return Err(ConfigError::Invalid { field: "lo.A", reason: format!("must be positive, got {}", self.lo.amplitude) });
        }
        if !self.lo.phase.is_finite() {
            return Err(ConfigError::Invalid { field: "lo.phase", reason: "must be finite".into() });
        }
        if !(self.window.c_sigmas.is_finite() && self.window.c_sigmas > 0.0) {
            return Err(ConfigError::Invalid {
                field: "window.c_sigmas",
                reason: format!("must be positive, got {}", self.window.c_sigmas),
            });
        }
        Ok(())
    }

    /// Engines in canonical order, duplicates dropped.
    pub fn engine_set(&self) -> Vec<EngineKind> {
        let mut e = self.engines.clone();
        e.sort();
        e.dedup();
        e
    }

    pub fn has(&self, engine: EngineKind) -> bool {
        self.engines.contains(&engine)
    }

    /// Requested orders in ascending order, duplicates dropped.
    pub fn orders(&self) -> Vec<u32> {
        let mut o = self.series_orders.clone().unwrap_or_default();
        o.sort_unstable();
        o.dedup();
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        ScenarioConfig::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let c = parse(r#"{"state":{"type":"number","n":2},"lo":{"A":5.0},"engines":["exact"]}"#).unwrap();
        assert_eq!(c.window.c_sigmas, 10.0);
        assert_eq!(c.x_convention, XConvention::Sqrt2MOverA);
        assert_eq!(c.output.format, OutputFormat::Csv);
        assert_eq!(c.lo.phase, 0.0);
    }

    #[test]
    fn unknown_fields_report_position() {
        let err = parse("{\"state\":{\"type\":\"number\",\"n\":2},\n\"lo\":{\"A\":5.0,\"amp\":1},\"engines\":[\"exact\"]}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("amp") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn engine_and_order_rules() {
        let no_engine = parse(r#"{"state":{"type":"number","n":2},"lo":{"A":5.0},"engines":[]}"#);
        assert!(matches!(no_engine, Err(ConfigError::Invalid { field: "engines", .. })));
        let missing = parse(r#"{"state":{"type":"number","n":2},"lo":{"A":5.0},"engines":["series"]}"#);
        assert!(matches!(missing, Err(ConfigError::Invalid { field: "series_orders", .. })));
        let stray =
            parse(r#"{"state":{"type":"number","n":2},"lo":{"A":5.0},"engines":["exact"],"series_orders":[0]}"#);
        assert!(matches!(stray, Err(ConfigError::Invalid { field: "series_orders", .. })));
        let bad_a = parse(r#"{"state":{"type":"number","n":2},"lo":{"A":-1.0},"engines":["exact"]}"#);
        assert!(matches!(bad_a, Err(ConfigError::Invalid { field: "lo.A", .. })));
    }

    #[test]
    fn round_trips_through_json() {
        let c = parse(
            r#"{"state":{"type":"coherent","beta_re":2.0},"lo":{"A":20.0,"phase":0.5},"two_j":380,
                "window":{"c_sigmas":4.0,"two_m_cap":40},"engines":["series","exact"],"series_orders":[4,0,2],
                "x_convention":"m_over_sqrt_j","output":{"format":"json"}}"#,
        )
        .unwrap();
        let again = parse(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.orders(), vec![0, 2, 4]);
        assert_eq!(c.engine_set(), vec![EngineKind::Exact, EngineKind::Series]);
    }
}
