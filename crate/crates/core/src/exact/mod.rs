//! Exact joint photon-count statistics of the balanced beam splitter.
//!
//! The oscillator `|α>` enters port 1 and the signal port 2. An input pair
//! `|2j - n>_1 |n>_2` lies in the multiplet `j` with `m_in = j - n`, so the
//! amplitude of detecting `j ± m` photons is
//!
//! `M(j, m) = Σ_{n ≤ 2j} ψ_n <2j-n|α> d^j_{m, j-n}(π/2)`.
//!
//! Mixed signals go through their eigendecomposition.

mod engine;
mod oracle;

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::special::{LogWeight, Neumaier};
use crate::states::{FockVector, LocalOscillator, SignalState};

pub use engine::ExactEngine;
pub use oracle::{brute_force_bs_oracle, brute_force_bs_oracle_vacuum_lo, coherent_oracle, log_coherent_oracle};

/// Photon counts `j + m` (port 1) and `j - m` (port 2), stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountOutcome {
    two_j: u32,
    two_m: i32,
}

impl CountOutcome {
    pub fn new(two_j: u32, two_m: i32) -> Result<Self> {
        crate::special::check_indices(two_j, two_m)?;
        Ok(Self { two_j, two_m })
    }

    /// From the two port counts.
    pub fn from_counts(port1: u32, port2: u32) -> Self {
        Self { two_j: port1 + port2, two_m: port1 as i32 - port2 as i32 }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn two_m(&self) -> i32 {
        self.two_m
    }

    /// `(j + m, j - m)`
    pub fn counts(&self) -> (u32, u32) {
        let port1 = (self.two_j as i64 + i64::from(self.two_m)) / 2;
        (port1 as u32, self.two_j - port1 as u32)
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn m(&self) -> f64 {
        f64::from(self.two_m) / 2.0
    }

    /// All admissible outcomes of one multiplet, ascending in `two_m`,
    /// optionally restricted to `|two_m| ≤ cap`.
    pub fn multiplet(two_j: u32, two_m_cap: Option<u32>) -> impl Iterator<Item = CountOutcome> {
        let t = two_j as i32;
        let cap = two_m_cap.map_or(t, |c| (c as i32).min(t));
        (-t..=t)
            .step_by(2)
            .filter(move |m| m.abs() <= cap)
            .map(move |two_m| CountOutcome { two_j, two_m })
    }
}

/// Which outcomes [`ExactEngine::distribution`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPolicy {
    /// Half-width of the `2j` window in oscillator standard deviations `A`.
    pub c_sigmas: f64,
    /// Explicit `[lo, hi]` for `2j`, overriding `c_sigmas`.
    pub two_j_range: Option<(u32, u32)>,
    /// Restrict to `|two_m| ≤ cap`.
    pub two_m_cap: Option<u32>,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self { c_sigmas: 10.0, two_j_range: None, two_m_cap: None }
    }
}

impl WindowPolicy {
    pub fn sigmas(c_sigmas: f64) -> Self {
        Self { c_sigmas, ..Self::default() }
    }

    pub fn single(two_j: u32) -> Self {
        Self { two_j_range: Some((two_j, two_j)), ..Self::default() }
    }

    /// `[A² - cA, A² + cA]`, clipped at zero.
    pub fn two_j_bounds(&self, lo: &LocalOscillator) -> (u32, u32) {
        if let Some(range) = self.two_j_range {
            return range;
        }
        let a = lo.amplitude();
        let mean = a * a;
        let low = (mean - self.c_sigmas * a).floor().max(0.0) as u32;
        let high = (mean + self.c_sigmas * a).ceil().max(0.0) as u32;
        (low, high)
    }
}

/// Probabilities over an evaluated window of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneDistribution {
    pub window: Vec<CountOutcome>,
    pub probs: Vec<f64>,
    pub log_probs: Vec<LogWeight>,
    pub lo: LocalOscillator,
    pub total_mass: f64,
    /// Probability mass the window misses: photon-sum tail outside the `2j`
    /// range plus an estimate for outcomes cut by the `|2m|` cap.
    pub epsilon_window: f64,
}

impl HomodyneDistribution {
    pub(crate) fn from_log_probs(
        window: Vec<CountOutcome>,
        log_probs: Vec<LogWeight>,
        lo: LocalOscillator,
        epsilon_window: f64,
    ) -> Self {
        let probs: Vec<f64> = log_probs.iter().map(|w| w.value().max(0.0)).collect();
        let total_mass = probs.iter().copied().collect::<Neumaier>().total();
        Self { window, probs, log_probs, lo, total_mass, epsilon_window }
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn get(&self, outcome: CountOutcome) -> Option<f64> {
        self.window.binary_search(&outcome).ok().map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (CountOutcome, f64)> + '_ {
        self.window.iter().copied().zip(self.probs.iter().copied())
    }

    /// `P_m = Σ_j P(j, m)` keyed by `two_m`.
    pub fn marginal_difference(&self) -> BTreeMap<i32, f64> {
        let mut acc: BTreeMap<i32, Neumaier> = BTreeMap::new();
        for (o, p) in self.iter() {
            acc.entry(o.two_m()).or_default().add(p);
        }
        acc.into_iter().map(|(k, v)| (k, v.total())).collect()
    }
}

/// Exact `M(j, m)` for a pure signal.
///
/// The oscillator phase enters through `<2j-n|α>` with `α = -A e^{iφ}`.
pub fn amplitude(psi: &FockVector, lo: &LocalOscillator, outcome: CountOutcome) -> Result<Complex64> {
    let block = engine::Multiplet::new(outcome.two_j(), lo, psi.cutoff())?;
    Ok(block.amplitude(psi, outcome.two_m()).to_complex())
}

pub fn probability<S: SignalState>(state: &S, lo: &LocalOscillator, outcome: CountOutcome) -> Result<f64> {
    Ok(ExactEngine::new(state, lo)?.log_probability(outcome)?.value())
}

pub fn distribution<S: SignalState>(
    state: &S,
    lo: &LocalOscillator,
    policy: &WindowPolicy,
) -> Result<HomodyneDistribution> {
    ExactEngine::new(state, lo)?.distribution(policy)
}

/// Mass of the total photon number `2j` outside `[low, high]`.
///
/// The beam splitter conserves photon number, so `2j` is distributed as the
/// oscillator Poisson(A²) convolved with the signal's photon statistics.
pub fn photon_sum_tail(signal_photons: &[f64], lo: &LocalOscillator, low: u32, high: u32) -> f64 {
    use crate::special::log_poisson;
    let mu = lo.mean_photons();
    let mut tail = Neumaier::new();
    for (n, &pn) in signal_photons.iter().enumerate() {
        if pn <= 0.0 {
            continue;
        }
        let n = n as i64;
        // lower: oscillator count t - n for photon sums t < low
        let mut lower = Neumaier::new();
        for t in n..i64::from(low) {
            lower.add(log_poisson((t - n) as u64, mu).exp());
        }
        // upper: oscillator count k > high - n
        let start = i64::from(high) - n + 1;
        let upper = if start <= 0 {
            1.0
        } else {
            let mut acc = Neumaier::new();
            let mut k = start as u64;
            loop {
                let term = log_poisson(k, mu).exp();
                acc.add(term);
                if (k as f64 > mu && term < 1e-40 * acc.total().max(1e-300)) || k > start as u64 + 100_000 {
                    break;
                }
                k += 1;
            }
            acc.total()
        };
        tail.add(pn * (lower.total() + upper));
    }
    tail.total()
}

#[cfg(test)]
mod tests;
