//! The three strong-oscillator scenarios used to compare series orders.

use std::str::FromStr;

use homodyne_core::povm::XConvention;
use homodyne_core::states::StateSpec;

use crate::config::{EngineKind, LoConfig, OutputConfig, ScenarioConfig, WindowConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    /// coherent `γ = 2` at `2j = 380`
    A,
    /// squeezed vacuum `r = 1.5` at `2j = 439`
    B,
    /// number state `|6⟩` at `2j = 367`
    C,
}

impl FromStr for Panel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(Panel::A),
            "b" => Ok(Panel::B),
            "c" => Ok(Panel::C),
            other => Err(format!("unknown panel `{other}`, expected a, b or c")),
        }
    }
}

pub const PANEL_AMPLITUDE: f64 = 20.0;
pub const PANEL_ORDERS: [u32; 3] = [0, 2, 4];

pub fn figure2(panel: Panel) -> ScenarioConfig {
    let (state, two_j) = match panel {
        Panel::A => (StateSpec::Coherent { beta_re: 2.0, beta_im: 0.0, cutoff: None }, 380),
        Panel::B => (StateSpec::SqueezedVacuum { r: 1.5, cutoff: None }, 439),
        Panel::C => (StateSpec::Number { n: 6, cutoff: None }, 367),
    };
    ScenarioConfig {
        state,
        lo: LoConfig { amplitude: PANEL_AMPLITUDE, phase: 0.0 },
        two_j: Some(two_j),
        window: WindowConfig::default(),
        engines: vec![EngineKind::Exact, EngineKind::Asymptotic, EngineKind::Series],
        series_orders: Some(PANEL_ORDERS.to_vec()),
        x_convention: XConvention::Sqrt2MOverA,
        output: OutputConfig::default(),
    }
}
