//! Signal states in the Fock basis and the local oscillator.

mod spec;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::log_factorial;

pub use spec::{MixtureComponent, StateSpec};

/// Eigenvalues above this (negative) threshold count as zero.
pub const PSD_TOLERANCE: f64 = 1e-10;
const NORM_TOLERANCE: f64 = 1e-12;
/// Largest cutoff a constructor will pick on its own.
const MAX_AUTO_CUTOFF: usize = 100_000;

/// `[1, q_1, q_1 q_2, ...]` scaled so the largest magnitude is of order one.
///
/// Running products stay in linear space, which keeps each entry to a few
/// ulps; going through logarithms would cost `ε |ln ψ_n|`. The mantissa is
/// rescaled by exact powers of two.
fn ratio_products(ratios: impl Iterator<Item = f64>) -> Vec<f64> {
    const STEP: i32 = 500;
    let big = 2f64.powi(STEP);
    let mut mant = 1.0_f64;
    let mut exp2 = 0_i32;
    let mut raw = vec![(1.0, 0)];
    for q in ratios {
        mant *= q;
        if mant.abs() > big {
            mant /= big;
            exp2 += STEP;
        } else if mant != 0.0 && mant.abs() < 1.0 / big {
            mant *= big;
            exp2 -= STEP;
        }
        raw.push((mant, exp2));
    }
    let top = raw.iter().map(|&(_, e)| e).max().unwrap_or(0);
    raw.into_iter()
        .map(|(m, e)| {
            let shift = e - top;
            if shift < -1100 { 0.0 } else { m * 2f64.powi(shift / 2) * 2f64.powi(shift - shift / 2) }
        })
        .collect()
}

/// Coherent local oscillator with amplitude `α = -A e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOscillator {
    amplitude: f64,
    phase: f64,
}

impl LocalOscillator {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) || !phase.is_finite() {
            return Err(Error::InvalidAmplitude(amplitude));
        }
        Ok(Self { amplitude, phase })
    }

    /// Vacuum in the oscillator port. Only the brute-force oracle accepts it.
    pub(crate) fn vacuum() -> Self {
        Self { amplitude: 0.0, phase: 0.0 }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `α = -A e^{iφ}`
    pub fn alpha(&self) -> Complex64 {
        -Complex64::from_polar(self.amplitude, self.phase)
    }

    /// Same amplitude, phase zero.
    pub fn in_phase(&self) -> Self {
        Self { amplitude: self.amplitude, phase: 0.0 }
    }

    pub fn mean_photons(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// Pure state `Σ ψ_n |n>` for `n ≤ cutoff`, always normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Normalizes `coeffs`; the cutoff is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { coeffs: coeffs.into_iter().map(|c| c / norm).collect() })
    }

    /// Smallest cutoff for which the coherent tail mass is below `1e-12`.
    pub fn coherent_min_cutoff(beta: Complex64) -> usize {
        let b = beta.norm();
        (b * b + 10.0 * b + 10.0).ceil() as usize
    }

    /// `|β>` truncated at `cutoff` and renormalized over the window.
    pub fn coherent(beta: Complex64, cutoff: usize) -> Result<Self> {
        let required = Self::coherent_min_cutoff(beta);
        if cutoff < required {
            return Err(Error::CutoffTooSmall { given: cutoff, required });
        }
        if beta.norm() == 0.0 {
            return Self::number(0, cutoff);
        }
        let b = beta.norm();
        let arg = beta.arg();
        let mags = ratio_products((1..=cutoff).map(|n| b / (n as f64).sqrt()));
        let coeffs = mags.iter().enumerate().map(|(n, &m)| Complex64::from_polar(m, n as f64 * arg)).collect();
        Self::new(coeffs)
    }

    pub fn coherent_auto(beta: Complex64) -> Result<Self> {
        Self::coherent(beta, Self::coherent_min_cutoff(beta))
    }

    fn log_squeezed_coefficient(r: f64, k: usize) -> f64 {
        let t = r.tanh().abs();
        let log_t = if k == 0 { 0.0 } else { k as f64 * t.ln() };
        -0.5 * r.cosh().ln() + log_t + 0.5 * log_factorial(2 * k as u64)
            - k as f64 * std::f64::consts::LN_2
            - log_factorial(k as u64)
    }

    /// First Fock index at which `|ψ_n|` of the squeezed vacuum drops below `1e-14`.
    ///
    /// `|ψ_{2k+2} / ψ_{2k}| = tanh|r| √((2k+1)/(2k+2)) < 1`, so the envelope
    /// is monotone and the first crossing bounds the whole tail.
    pub fn squeezed_min_cutoff(r: f64) -> Result<usize> {
        if r == 0.0 {
            return Ok(0);
        }
        let threshold = 1e-14f64.ln();
        (0..=MAX_AUTO_CUTOFF / 2)
            .find(|&k| Self::log_squeezed_coefficient(r, k) < threshold)
            .map(|k| 2 * k)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("squeezing r = {r} needs a cutoff above {MAX_AUTO_CUTOFF}"))
            })
    }

    /// `exp[r(a² - a†²)/2]|0>`:
    /// `ψ_{2k} = (sech r)^{1/2} (-tanh r)^k √((2k)!) / (2^k k!)`.
    pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing parameter {r}")));
        }
        let required = Self::squeezed_min_cutoff(r)?;
        if cutoff < required {
            return Err(Error::CutoffTooSmall { given: cutoff, required });
        }
        // ψ_{2k} / ψ_{2k-2} = -tanh r √((2k-1)/(2k))
        let t = r.tanh();
        let even = ratio_products((1..=cutoff / 2).map(|k| -t * ((2 * k - 1) as f64 / (2 * k) as f64).sqrt()));
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        for (k, v) in even.into_iter().enumerate() {
            coeffs[2 * k] = Complex64::new(v, 0.0);
        }
        Self::new(coeffs)
    }

    pub fn squeezed_vacuum_auto(r: f64) -> Result<Self> {
        Self::squeezed_vacuum(r, Self::squeezed_min_cutoff(r)?)
    }

    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::NumberAboveCutoff { n, cutoff });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    pub fn vacuum() -> Self {
        Self { coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `ψ_n`, zero beyond the cutoff.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// Zero-pad to a larger cutoff.
    pub fn padded(&self, cutoff: usize) -> FockVector {
        let mut coeffs = self.coeffs.clone();
        if cutoff + 1 > coeffs.len() {
            coeffs.resize(cutoff + 1, Complex64::new(0.0, 0.0));
        }
        FockVector { coeffs }
    }

    /// Decay of the Fock coefficients against those of the coherent state `|z>`.
    ///
    /// Reports `max_n |ψ_n| √(n!) / z^n` and whether the ratio is
    /// non-increasing over the last third of the window (zero coefficients
    /// skipped). A finite cutoff can only give evidence, never a proof.
    pub fn regularity_report(&self, z: f64) -> Result<RegularityReport> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!("regularity radius z = {z}")));
        }
        let log_z = z.ln();
        let log_ratios: Vec<(usize, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(n, c)| (n, c.norm().ln() + 0.5 * log_factorial(n as u64) - n as f64 * log_z))
            .collect();
        let log_max_ratio = log_ratios.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
        let tail_start = 2 * (self.coeffs.len()) / 3;
        let tail: Vec<f64> =
            log_ratios.iter().filter(|&&(n, _)| n >= tail_start).map(|&(_, l)| l).collect();
        // flat tails (the coherent boundary case) pass within rounding
        let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
        Ok(RegularityReport { z_tested: z, max_ratio: log_max_ratio.exp(), log_max_ratio, monotone_tail })
    }
}

/// Outcome of [`FockVector::regularity_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityReport {
    pub z_tested: f64,
    pub max_ratio: f64,
    pub log_max_ratio: f64,
    pub monotone_tail: bool,
}

impl RegularityReport {
    /// Regular at the tested cutoff: bounded ratios with a non-increasing tail.
    pub fn is_z_regular(&self) -> bool {
        self.max_ratio.is_finite() && self.monotone_tail
    }
}

/// Density matrix `ρ_{mn}` for `m, n ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: DMatrix<Complex64>,
}

impl FockDensity {
    /// Validates Hermiticity and unit trace (both to `1e-12`).
    /// Positivity is checked where an eigendecomposition is needed.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let mut deviation: f64 = 0.0;
        for i in 0..rows {
            for k in i..rows {
                deviation = deviation.max((matrix[(i, k)] - matrix[(k, i)].conj()).norm());
            }
        }
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &FockVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.coeffs());
        Self { matrix: &v * v.adjoint() }
    }

    /// `Σ p_i ρ_i`, padded to the largest cutoff among the components.
    pub fn mix(components: &[(f64, FockDensity)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        let mut sum = 0.0;
        for &(w, _) in components {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight { weight: w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        let dim = components.iter().map(|(_, d)| d.dim()).max().unwrap_or(1);
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, d) in components {
            let n = d.dim();
            let mut view = matrix.view_mut((0, 0), (n, n));
            view += &d.matrix * Complex64::new(*w, 0.0);
        }
        Ok(Self { matrix })
    }

    pub fn thermal_like(diagonal: &[f64]) -> Result<Self> {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            diagonal.len(),
            diagonal.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        if m < self.dim() && n < self.dim() {
            self.matrix[(m, n)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Keep `m, n ≤ cutoff` and renormalize by the retained diagonal weight.
    pub fn truncate(&self, cutoff: usize) -> Result<Self> {
        if cutoff > self.cutoff() {
            return Err(Error::TruncationAboveCutoff { requested: cutoff, cutoff: self.cutoff() });
        }
        if cutoff == self.cutoff() {
            return Ok(self.clone());
        }
        let retained: f64 = (0..=cutoff).map(|i| self.matrix[(i, i)].re).sum();
        if !(retained > NORM_TOLERANCE) {
            return Err(Error::VanishingTrace { trace: retained });
        }
        let block = self.matrix.view((0, 0), (cutoff + 1, cutoff + 1)).into_owned();
        Ok(Self { matrix: block / Complex64::new(retained, 0.0) })
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Anything the engines can measure: a pure vector or a density matrix.
pub trait SignalState {
    fn cutoff(&self) -> usize;

    /// `p_n = <n|ρ|n>`
    fn photon_distribution(&self) -> Vec<f64>;

    fn mean_photon_number(&self) -> f64 {
        self.photon_distribution().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Pure components `(weight, |ψ_k>)` with `ρ = Σ weight |ψ_k><ψ_k|`.
    /// For a density matrix this is its eigendecomposition; eigenvalues
    /// below `-PSD_TOLERANCE` are an error, the rest of the non-positive
    /// ones are dropped.
    fn ensemble(&self) -> Result<Vec<(f64, FockVector)>>;

    /// `Σ_{mn} ρ_{mn} left_m right_n` for real Fock-indexed vectors.
    fn sandwich(&self, left: &[f64], right: &[f64]) -> Complex64;

    /// `ψ_n → e^{-inφ} ψ_n`, i.e. `ρ_{mn} → e^{-i(m-n)φ} ρ_{mn}`.
    ///
    /// Measuring this state with an oscillator of phase zero gives the
    /// statistics of the original state under an oscillator of phase `φ`.
    fn rotate_phase(&self, phi: f64) -> Self
    where
        Self: Sized;
}

impl SignalState for FockVector {
    fn cutoff(&self) -> usize {
        FockVector::cutoff(self)
    }

    fn photon_distribution(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    fn ensemble(&self) -> Result<Vec<(f64, FockVector)>> {
        Ok(vec![(1.0, self.clone())])
    }

    fn sandwich(&self, left: &[f64], right: &[f64]) -> Complex64 {
        let l: Complex64 = self.coeffs.iter().zip(left).map(|(c, &v)| c * v).sum();
        let r: Complex64 = self.coeffs.iter().zip(right).map(|(c, &v)| c * v).sum();
        l * r.conj()
    }

    fn rotate_phase(&self, phi: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * phi))
            .collect();
        FockVector { coeffs }
    }
}

impl SignalState for FockDensity {
    fn cutoff(&self) -> usize {
        FockDensity::cutoff(self)
    }

    fn photon_distribution(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    fn ensemble(&self) -> Result<Vec<(f64, FockVector)>> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut out = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -PSD_TOLERANCE {
                return Err(Error::NotPositive { eigenvalue: lambda });
            }
            if lambda <= 0.0 {
                continue;
            }
            let coeffs = eig.eigenvectors.column(k).iter().copied().collect();
            out.push((lambda, FockVector::new(coeffs)?));
        }
        // deterministic order independent of the eigen solver
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(out)
    }

    fn sandwich(&self, left: &[f64], right: &[f64]) -> Complex64 {
        let dim = self.dim().min(left.len()).min(right.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            if left[m] == 0.0 {
                continue;
            }
            let row: Complex64 = (0..dim).map(|n| self.matrix[(m, n)] * right[n]).sum();
            acc += row * left[m];
        }
        acc
    }

    fn rotate_phase(&self, phi: f64) -> Self {
        let matrix = DMatrix::from_fn(self.dim(), self.dim(), |m, n| {
            self.matrix[(m, n)] * Complex64::from_polar(1.0, -((m as f64) - (n as f64)) * phi)
        });
        FockDensity { matrix }
    }
}

/// A signal of either kind, as produced from a [`StateSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Pure(FockVector),
    Mixed(FockDensity),
}

impl Signal {
    pub fn to_density(&self) -> FockDensity {
        match self {
            Signal::Pure(v) => FockDensity::from_pure(v),
            Signal::Mixed(d) => d.clone(),
        }
    }
}

impl From<FockVector> for Signal {
    fn from(v: FockVector) -> Self {
        Signal::Pure(v)
    }
}

impl From<FockDensity> for Signal {
    fn from(d: FockDensity) -> Self {
        Signal::Mixed(d)
    }
}

impl SignalState for Signal {
    fn cutoff(&self) -> usize {
        match self {
            Signal::Pure(v) => SignalState::cutoff(v),
            Signal::Mixed(d) => SignalState::cutoff(d),
        }
    }

    fn photon_distribution(&self) -> Vec<f64> {
        match self {
            Signal::Pure(v) => v.photon_distribution(),
            Signal::Mixed(d) => d.photon_distribution(),
        }
    }

    fn ensemble(&self) -> Result<Vec<(f64, FockVector)>> {
        match self {
            Signal::Pure(v) => v.ensemble(),
            Signal::Mixed(d) => d.ensemble(),
        }
    }

    fn sandwich(&self, left: &[f64], right: &[f64]) -> Complex64 {
        match self {
            Signal::Pure(v) => v.sandwich(left, right),
            Signal::Mixed(d) => d.sandwich(left, right),
        }
    }

    fn rotate_phase(&self, phi: f64) -> Self {
        match self {
            Signal::Pure(v) => Signal::Pure(v.rotate_phase(phi)),
            Signal::Mixed(d) => Signal::Mixed(d.rotate_phase(phi)),
        }
    }
}

/// `<x|ρ|x>` for a single coherent state, `π^{-1/2} exp[-(x - √2 Re γ)²]`.
pub fn coherent_quadrature_density(gamma: Complex64, x: f64) -> f64 {
    let d = x - std::f64::consts::SQRT_2 * gamma.re;
    (-d * d).exp() / PI.sqrt()
}
