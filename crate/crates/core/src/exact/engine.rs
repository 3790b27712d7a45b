use num_complex::Complex64;
use rayon::prelude::*;

use super::{photon_sum_tail, CountOutcome, HomodyneDistribution, WindowPolicy};
use crate::error::{Error, Result};
use crate::special::{log_factorial, wigner_d_pi2, ComplexNeumaier, LogWeight, Neumaier, WignerDColumn};
use crate::states::{FockVector, LocalOscillator, SignalState};

/// Complex number `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledComplex {
    pub log_scale: f64,
    pub mantissa: Complex64,
}

impl ScaledComplex {
    pub fn to_complex(self) -> Complex64 {
        if self.mantissa == Complex64::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa * self.log_scale.exp()
    }

    pub fn norm_sqr(self) -> LogWeight {
        let m = self.mantissa.norm();
        if m == 0.0 {
            return LogWeight::ZERO;
        }
        LogWeight::from_log(2.0 * (self.log_scale + m.ln()))
    }
}

/// Oscillator overlaps `<2j-n|α>` and the d-columns `d^j_{·, j-n}` of one multiplet.
///
/// `|<2j-n|α>| = e^{base + offset_n}`. The offsets come from the ratios
/// `√((2j-n+1)/A²)` rather than from differences of large log-factorials,
/// so they carry no error proportional to `A²`.
pub(crate) struct Multiplet {
    base: f64,
    log_lo: Vec<f64>,
    lo_phase: Vec<Complex64>,
    columns: Vec<WignerDColumn>,
}

/// Signal amplitudes folded with the oscillator overlaps, `ψ_n <2j-n|α>`,
/// stored as `coeffs[n] · e^{log_scale}`.
pub(crate) struct Folded {
    log_scale: f64,
    coeffs: Vec<Complex64>,
}

impl Multiplet {
    pub fn new(two_j: u32, lo: &LocalOscillator, max_photons: usize) -> Result<Self> {
        let top = (two_j as usize).min(max_photons);
        let a = lo.amplitude();
        let a2 = a * a;
        let base = -0.5 * a2 + f64::from(two_j) * a.ln() - 0.5 * log_factorial(two_j.into());
        let common = Complex64::from_polar(1.0, (f64::from(two_j) * lo.phase()).rem_euclid(std::f64::consts::TAU));
        let mut offset = Neumaier::new();
        let mut log_lo = Vec::with_capacity(top + 1);
        let mut lo_phase = Vec::with_capacity(top + 1);
        let mut columns = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let k = two_j as usize - n;
            if n > 0 {
                offset.add(0.5 * ((k + 1) as f64 / a2).ln());
            }
            log_lo.push(offset.total());
            // (-e^{iφ})^k = (-e^{iφ})^{2j} (-e^{-iφ})^n; the common factor is
            // rounded once, so relative phases between terms stay accurate
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            lo_phase.push(common * Complex64::from_polar(sign, -(n as f64) * lo.phase()));
            columns.push(wigner_d_pi2(two_j, two_j as i32 - 2 * n as i32)?);
        }
        Ok(Self { base, log_lo, lo_phase, columns })
    }

    /// The signal amplitudes stay in linear space; only the oscillator
    /// offsets pass through `exp`, relative to the dominant term.
    pub fn fold(&self, psi: &FockVector) -> Folded {
        let top = self.log_lo.len().min(psi.coeffs().len());
        let peak = (0..top)
            .filter(|&n| psi.coeff(n).norm() > 0.0)
            .map(|n| psi.coeff(n).norm().ln() + self.log_lo[n])
            .fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Folded { log_scale: 0.0, coeffs: vec![Complex64::new(0.0, 0.0); top] };
        }
        let coeffs = (0..top)
            .map(|n| {
                let c = psi.coeff(n);
                if c.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let shift = self.log_lo[n] - peak;
                let v = if shift < 700.0 {
                    c * shift.exp()
                } else {
                    // tiny amplitude against a huge overlap
                    Complex64::from_polar((c.norm().ln() + shift).exp(), c.arg())
                };
                v * self.lo_phase[n]
            })
            .collect();
        Folded { log_scale: self.base + peak, coeffs }
    }

    /// Sum of `c_n d^j_{m, j-n}`, largest terms first, compensated.
    pub fn amplitude_folded(&self, folded: &Folded, two_m: i32) -> ScaledComplex {
        let mut terms: Vec<Complex64> = folded
            .coeffs
            .iter()
            .zip(&self.columns)
            .map(|(c, col)| c * col.get(two_m))
            .filter(|t| t.re != 0.0 || t.im != 0.0)
            .collect();
        terms.sort_unstable_by(|a, b| b.norm_sqr().total_cmp(&a.norm_sqr()));
        let mut acc = ComplexNeumaier::new();
        for t in terms {
            acc.add(t);
        }
        ScaledComplex { log_scale: folded.log_scale, mantissa: acc.total() }
    }

    pub fn amplitude(&self, psi: &FockVector, two_m: i32) -> ScaledComplex {
        self.amplitude_folded(&self.fold(psi), two_m)
    }
}

/// Exact engine for one signal and oscillator.
///
/// Mixed signals are split into their eigen-ensemble once, at construction.
#[derive(Debug, Clone)]
pub struct ExactEngine {
    ensemble: Vec<(f64, FockVector)>,
    lo: LocalOscillator,
    max_photons: usize,
    photons: Vec<f64>,
}

impl ExactEngine {
    pub fn new<S: SignalState>(state: &S, lo: &LocalOscillator) -> Result<Self> {
        let ensemble = state.ensemble()?;
        let max_photons = ensemble.iter().map(|(_, v)| v.cutoff()).max().unwrap_or(0);
        let mut photons = vec![0.0; max_photons + 1];
        for (w, v) in &ensemble {
            for (n, c) in v.coeffs().iter().enumerate() {
                photons[n] += w * c.norm_sqr();
            }
        }
        Ok(Self { ensemble, lo: *lo, max_photons, photons })
    }

    pub fn oscillator(&self) -> &LocalOscillator {
        &self.lo
    }

    pub fn ensemble(&self) -> &[(f64, FockVector)] {
        &self.ensemble
    }

    /// Amplitude for a pure signal; `None` for a mixture.
    pub fn amplitude(&self, outcome: CountOutcome) -> Result<Option<Complex64>> {
        match self.ensemble.as_slice() {
            [(w, v)] if (*w - 1.0).abs() < 1e-12 => {
                let block = Multiplet::new(outcome.two_j(), &self.lo, self.max_photons)?;
                Ok(Some(block.amplitude(v, outcome.two_m()).to_complex()))
            }
            _ => Ok(None),
        }
    }

    pub fn log_probability(&self, outcome: CountOutcome) -> Result<LogWeight> {
        Ok(self.multiplet_log_probabilities(outcome.two_j(), &[outcome.two_m()])?[0])
    }

    /// Probabilities of several `two_m` in one multiplet, sharing the d-columns.
    pub fn multiplet_log_probabilities(&self, two_j: u32, two_ms: &[i32]) -> Result<Vec<LogWeight>> {
        for &m in two_ms {
            crate::special::check_indices(two_j, m)?;
        }
        let block = Multiplet::new(two_j, &self.lo, self.max_photons)?;
        let folded: Vec<(f64, Folded)> = self.ensemble.iter().map(|(w, v)| (*w, block.fold(v))).collect();
        Ok(two_ms
            .iter()
            .map(|&m| {
                folded.iter().fold(LogWeight::ZERO, |acc, (w, f)| {
                    acc.add(block.amplitude_folded(f, m).norm_sqr() * *w)
                })
            })
            .collect())
    }

    /// Every outcome of the window, multiplets evaluated in parallel.
    pub fn distribution(&self, policy: &WindowPolicy) -> Result<HomodyneDistribution> {
        let (low, high) = policy.two_j_bounds(&self.lo);
        if low > high {
            return Err(Error::EmptyWindow);
        }
        let blocks: Vec<(Vec<CountOutcome>, Vec<LogWeight>, f64)> = (low..=high)
            .into_par_iter()
            .map(|two_j| {
                let outcomes: Vec<CountOutcome> = CountOutcome::multiplet(two_j, policy.two_m_cap).collect();
                let ms: Vec<i32> = outcomes.iter().map(|o| o.two_m()).collect();
                let probs = self.multiplet_log_probabilities(two_j, &ms)?;
                let discarded = cap_discard_estimate(two_j, policy.two_m_cap, &probs);
                Ok((outcomes, probs, discarded))
            })
            .collect::<Result<_>>()?;
        let mut window = Vec::new();
        let mut log_probs = Vec::new();
        let mut cap_loss = 0.0;
        for (o, p, d) in blocks {
            window.extend(o);
            log_probs.extend(p);
            cap_loss += d;
        }
        if window.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let eps = photon_sum_tail(&self.photons, &self.lo, low, high) + cap_loss;
        Ok(HomodyneDistribution::from_log_probs(window, log_probs, self.lo, eps))
    }
}

/// Outcomes beyond `|two_m| ≤ cap`, each side counted at its boundary probability.
fn cap_discard_estimate(two_j: u32, cap: Option<u32>, probs: &[LogWeight]) -> f64 {
    let Some(cap) = cap else { return 0.0 };
    if two_j <= cap || probs.is_empty() {
        return 0.0;
    }
    let kept = probs.len();
    let per_side = ((two_j as usize + 1) - kept) / 2;
    per_side as f64 * (probs[0].value() + probs[kept - 1].value())
}
