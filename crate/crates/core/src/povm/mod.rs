//! Quadrature POVM of a strong oscillator and its finite-amplitude corrections.
//!
//! With `x = √2 m / A` the exact count probability is
//! `P(j, m) = K(j, m) Σ_{r,s} g_r g_s <x|a^r ρ (a†)^s|x>`, where
//! `K = √π 2^{-2j} e^{-A²} A^{4j} e^{2m²/A²} / ((j+m)! (j-m)!)`; see
//! [`terms`] for the `g_r`. Truncating the double sum at `r + s ≤ order`
//! gives the correction series. For a signal with at most `N` photons the
//! sum stops by itself at `r, s ≤ N`.
//!
//! An oscillator phase `φ` is handled by measuring the rotated signal
//! [`SignalState::rotate_phase`] with phase zero.

mod terms;

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::CountOutcome;
use crate::special::{hermite_gaussians, log_factorial, LogWeight, MAX_HERMITE_ORDER};
use crate::states::{FockVector, LocalOscillator, SignalState};

pub use terms::{exponent_coefficients, series_terms, Monomial, SeriesOrder, SeriesTerm, MAX_SERIES_ORDER};

/// Which eigenvalue labels the outcome `(j, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XConvention {
    /// `x = m / √j`, from the large-`j` limit of the d-functions.
    MOverSqrtJ,
    /// `x = √2 m / A`
    #[default]
    Sqrt2MOverA,
}

impl XConvention {
    pub fn x(&self, outcome: CountOutcome, amplitude: f64) -> Result<f64> {
        match self {
            XConvention::MOverSqrtJ if outcome.two_j() == 0 => Err(Error::UndefinedQuadrature),
            XConvention::MOverSqrtJ => Ok(outcome.m() / outcome.j().sqrt()),
            XConvention::Sqrt2MOverA => Ok(SQRT_2 * outcome.m() / amplitude),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefactorMode {
    /// Log-gamma evaluation of `K(j, m)`.
    #[default]
    Exact,
    /// Stirling limit `e^{-(2j - A²)²/2A²} / (√π A²)`.
    Gaussian,
}

pub fn series_prefactor(two_j: u32, two_m: i32, amplitude: f64) -> Result<LogWeight> {
    series_prefactor_with(two_j, two_m, amplitude, PrefactorMode::Exact)
}

pub fn series_prefactor_with(two_j: u32, two_m: i32, amplitude: f64, mode: PrefactorMode) -> Result<LogWeight> {
    crate::special::check_indices(two_j, two_m)?;
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidAmplitude(amplitude));
    }
    let a2 = amplitude * amplitude;
    let two_j_f = f64::from(two_j);
    let log = match mode {
        PrefactorMode::Exact => {
            let m = f64::from(two_m) / 2.0;
            let (n1, n2) = CountOutcome::new(two_j, two_m)?.counts();
            0.5 * PI.ln() - two_j_f * std::f64::consts::LN_2 - a2 + 2.0 * two_j_f * amplitude.ln()
                + 2.0 * m * m / a2
                - log_factorial(n1.into())
                - log_factorial(n2.into())
        }
        PrefactorMode::Gaussian => {
            let d = two_j_f - a2;
            -d * d / (2.0 * a2) - 0.5 * PI.ln() - a2.ln()
        }
    };
    Ok(LogWeight::from_log(log))
}

/// `<x|a^r|n> = √(n!/(n-r)!) u_{n-r}(x)` for `n = 0..=cutoff`.
fn ladder_row(u: &[f64], r: usize, cutoff: usize) -> Vec<f64> {
    (0..=cutoff)
        .map(|n| {
            if n < r {
                return 0.0;
            }
            let falling: f64 = ((n - r + 1)..=n).map(|k| (k as f64).sqrt()).product();
            falling * u[n - r]
        })
        .collect()
}

fn check_hermite(cutoff: usize) -> Result<()> {
    if cutoff > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrderTooLarge { order: cutoff, max: MAX_HERMITE_ORDER });
    }
    Ok(())
}

/// `<x|a^r ρ (a†)^s|x>`
pub fn quadrature_matrix_element<S: SignalState>(state: &S, r: u32, s: u32, x: f64) -> Result<Complex64> {
    let cutoff = state.cutoff();
    check_hermite(cutoff + r as usize + s as usize)?;
    let u = hermite_gaussians(cutoff, x)?;
    let left = ladder_row(&u, r as usize, cutoff);
    let right = ladder_row(&u, s as usize, cutoff);
    Ok(state.sandwich(&left, &right))
}

/// Per-`x` projections `<x|a^r|ψ_k>` of every ensemble member.
struct Projections {
    weights: Vec<f64>,
    /// `[member][r]`
    values: Vec<Vec<Complex64>>,
}

impl Projections {
    fn new(ensemble: &[(f64, FockVector)], max_r: usize, x: f64) -> Result<Self> {
        let cutoff = ensemble.iter().map(|(_, v)| v.cutoff()).max().unwrap_or(0);
        check_hermite(cutoff)?;
        let u = hermite_gaussians(cutoff, x)?;
        let rows: Vec<Vec<f64>> = (0..=max_r).map(|r| ladder_row(&u, r, cutoff)).collect();
        let values = ensemble
            .iter()
            .map(|(_, v)| {
                rows.iter()
                    .map(|row| v.coeffs().iter().zip(row).map(|(c, &l)| c * l).sum())
                    .collect()
            })
            .collect();
        Ok(Self { weights: ensemble.iter().map(|(w, _)| *w).collect(), values })
    }

    fn element(&self, r: usize, s: usize) -> Complex64 {
        self.weights.iter().zip(&self.values).map(|(w, v)| v[r] * v[s].conj() * *w).sum()
    }
}

/// Strong-oscillator approximation: Gaussian prefactor times `<x|ρ|x>`.
pub fn asymptotic_probability<S: SignalState>(
    state: &S,
    lo: &LocalOscillator,
    outcome: CountOutcome,
    convention: XConvention,
) -> Result<f64> {
    AsymptoticEngine::new(state, lo)?.probability(outcome, convention)
}

/// Reusable evaluator for many outcomes of one signal.
#[derive(Debug, Clone)]
pub struct AsymptoticEngine {
    ensemble: Vec<(f64, FockVector)>,
    lo: LocalOscillator,
}

impl AsymptoticEngine {
    pub fn new<S: SignalState>(state: &S, lo: &LocalOscillator) -> Result<Self> {
        let ensemble = state
            .ensemble()?
            .into_iter()
            .map(|(w, v)| (w, v.rotate_phase(lo.phase())))
            .collect();
        Ok(Self { ensemble, lo: *lo })
    }

    pub fn quadrature_density(&self, x: f64) -> Result<f64> {
        Ok(Projections::new(&self.ensemble, 0, x)?.element(0, 0).re)
    }

    pub fn probability(&self, outcome: CountOutcome, convention: XConvention) -> Result<f64> {
        let a = self.lo.amplitude();
        let x = convention.x(outcome, a)?;
        let k = series_prefactor_with(outcome.two_j(), outcome.two_m(), a, PrefactorMode::Gaussian)?;
        Ok(k.value() * self.quadrature_density(x)?)
    }
}

/// One `(r, s)` contribution to the bracket, before the prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermValue {
    pub r: u32,
    pub s: u32,
    pub coefficient: f64,
    /// coefficient times the matrix element, doubled real part if paired
    pub contribution: f64,
}

/// Correction series truncated at a fixed order.
#[derive(Debug, Clone)]
pub struct SeriesEngine {
    asymptotic: AsymptoticEngine,
    order: SeriesOrder,
    terms: Vec<SeriesTerm>,
    mode: PrefactorMode,
}

impl SeriesEngine {
    pub fn new<S: SignalState>(state: &S, lo: &LocalOscillator, order: SeriesOrder) -> Result<Self> {
        Ok(Self {
            asymptotic: AsymptoticEngine::new(state, lo)?,
            order,
            terms: series_terms(order),
            mode: PrefactorMode::Exact,
        })
    }

    pub fn with_prefactor(mut self, mode: PrefactorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn order(&self) -> SeriesOrder {
        self.order
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    /// Contributions of each term to the bracket at this outcome.
    pub fn breakdown(&self, outcome: CountOutcome) -> Result<Vec<TermValue>> {
        let a = self.asymptotic.lo.amplitude();
        let x = XConvention::Sqrt2MOverA.x(outcome, a)?;
        let max_r = self.order.max_field_operators() as usize;
        let proj = Projections::new(&self.asymptotic.ensemble, max_r, x)?;
        let f = exponent_coefficients(outcome.two_j(), outcome.two_m(), a);
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let coefficient = t.coefficient_from(&f);
                let e = proj.element(t.r as usize, t.s as usize);
                let contribution = coefficient * if t.paired { 2.0 * e.re } else { e.re };
                TermValue { r: t.r, s: t.s, coefficient, contribution }
            })
            .collect())
    }

    /// Prefactor times the truncated bracket. Truncation can make it negative.
    pub fn probability(&self, outcome: CountOutcome) -> Result<f64> {
        let a = self.asymptotic.lo.amplitude();
        let k = series_prefactor_with(outcome.two_j(), outcome.two_m(), a, self.mode)?;
        let bracket: f64 = crate::special::Neumaier::from_iter(
            self.breakdown(outcome)?.iter().map(|t| t.contribution),
        )
        .total();
        Ok(k.value() * bracket)
    }
}

pub fn series_probability<S: SignalState>(
    state: &S,
    lo: &LocalOscillator,
    outcome: CountOutcome,
    order: SeriesOrder,
) -> Result<f64> {
    SeriesEngine::new(state, lo, order)?.probability(outcome)
}

/// How far a signal is from the strong-oscillator regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongLoReport {
    pub mean_photons: f64,
    /// `n̄² / A²`, small in the strong-oscillator regime
    pub mean_sq_over_a2: f64,
    /// `|2j - A²| / 2A²` one standard deviation from the mean, `1/(2A)`
    pub typical_offset: f64,
    /// Multiplet used for the measured ratio, `2j = round(A² + A)`
    pub two_j: u32,
    /// `sup_m |P₂ - P₀| / sup_m |P₀|` over that multiplet
    pub correction_ratio: f64,
}

pub fn strong_lo_report<S: SignalState>(state: &S, lo: &LocalOscillator) -> Result<StrongLoReport> {
    let a = lo.amplitude();
    let mean_photons = state.mean_photon_number();
    let two_j = (a * a + a).round() as u32;
    let p0 = SeriesEngine::new(state, lo, SeriesOrder::new(0)?)?;
    let p2 = SeriesEngine::new(state, lo, SeriesOrder::new(2)?)?;
    let (mut sup_diff, mut sup_p0) = (0.0_f64, 0.0_f64);
    for o in CountOutcome::multiplet(two_j, None) {
        let a0 = p0.probability(o)?;
        let a2 = p2.probability(o)?;
        sup_diff = sup_diff.max((a2 - a0).abs());
        sup_p0 = sup_p0.max(a0.abs());
    }
    Ok(StrongLoReport {
        mean_photons,
        mean_sq_over_a2: mean_photons * mean_photons / (a * a),
        typical_offset: 1.0 / (2.0 * a),
        two_j,
        correction_ratio: if sup_p0 > 0.0 { sup_diff / sup_p0 } else { 0.0 },
    })
}

#[cfg(test)]
mod tests;
