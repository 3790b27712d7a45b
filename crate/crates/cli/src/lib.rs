//! Scenario runner and acceptance harness on top of `homodyne_core`.
//!
//! A [`config::ScenarioConfig`] names a signal, an oscillator, a count
//! window and the engines to run; [`scenario::run_scenario`] turns it into a
//! table with one row per outcome, written as CSV or JSON.

pub mod acceptance;
pub mod config;
pub mod presets;
pub mod scenario;

pub use acceptance::{oracle_check, run_acceptance, AcceptanceReport, CriterionResult};
pub use config::{ConfigError, EngineKind, OutputFormat, ScenarioConfig};
pub use scenario::{run_scenario, ScenarioTable};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Engine(#[from] homodyne_core::Error),

    #[error("writing csv")]
    Csv(#[from] csv::Error),

    #[error("writing json")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("fixtures: {0}")]
    Fixtures(String),
}
