//! Independent references for the exact engine.

use num_complex::Complex64;

use super::{CountOutcome, HomodyneDistribution};
use crate::error::{Error, Result};
use crate::special::{log_factorial, log_poisson, wigner_d_oracle, LogWeight, ORACLE_MAX_TWO_J};
use crate::states::{FockVector, LocalOscillator};

/// Coherent signal `|β>`: the outputs are coherent with amplitudes
/// `(α - β)/√2` (port 1) and `(α + β)/√2` (port 2), so the counts are
/// independent Poissons.
pub fn coherent_oracle(beta: Complex64, lo: &LocalOscillator, outcome: CountOutcome) -> f64 {
    log_coherent_oracle(beta, lo, outcome).value()
}

pub fn log_coherent_oracle(beta: Complex64, lo: &LocalOscillator, outcome: CountOutcome) -> LogWeight {
    let alpha = lo.alpha();
    let mu1 = (alpha - beta).norm_sqr() / 2.0;
    let mu2 = (alpha + beta).norm_sqr() / 2.0;
    let (n1, n2) = outcome.counts();
    LogWeight::from_log(log_poisson(u64::from(n1), mu1) + log_poisson(u64::from(n2), mu2))
}

/// Largest photon number per port the brute-force oracle accepts.
fn check_cap(cap: usize) -> Result<()> {
    if (cap + 1) * (cap + 1) > 40_000 || cap > ORACLE_MAX_TWO_J as usize {
        return Err(Error::BruteForceCap { cap, reason: "grid exceeds 40000 input pairs".into() });
    }
    Ok(())
}

/// Builds `|α>|ψ>` on the grid `n1, n2 ≤ cap`, rotates every multiplet
/// `2j ≤ cap` with a dense matrix exponential and squares the result.
pub fn brute_force_bs_oracle(psi: &FockVector, lo: &LocalOscillator, cap: usize) -> Result<HomodyneDistribution> {
    brute_force(psi, lo, cap)
}

/// Same, with vacuum in the oscillator port.
pub fn brute_force_bs_oracle_vacuum_lo(psi: &FockVector, cap: usize) -> Result<HomodyneDistribution> {
    brute_force(psi, &LocalOscillator::vacuum(), cap)
}

fn brute_force(psi: &FockVector, lo: &LocalOscillator, cap: usize) -> Result<HomodyneDistribution> {
    check_cap(cap)?;
    let alpha = lo.alpha();
    let lo_coeffs: Vec<Complex64> = (0..=cap)
        .map(|k| {
            if alpha.norm() == 0.0 {
                return if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            let log = -0.5 * alpha.norm_sqr() + k as f64 * alpha.norm().ln() - 0.5 * log_factorial(k as u64);
            Complex64::from_polar(log.exp(), k as f64 * alpha.arg())
        })
        .collect();
    let lo_tail = 1.0 - lo_coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    if lo_tail > 1e-12 {
        return Err(Error::BruteForceCap { cap, reason: format!("oscillator tail {lo_tail:e} beyond cap") });
    }
    let sig_tail: f64 = psi.coeffs().iter().skip(cap + 1).map(|c| c.norm_sqr()).sum();
    if sig_tail > 1e-12 {
        return Err(Error::BruteForceCap { cap, reason: format!("signal tail {sig_tail:e} beyond cap") });
    }

    let mut window = Vec::new();
    let mut log_probs = Vec::new();
    for two_j in 0..=cap as u32 {
        let d = wigner_d_oracle(two_j)?;
        let size = two_j as usize + 1;
        // index i: n1 = i, n2 = 2j - i, two_m = 2i - 2j
        let input: Vec<Complex64> = (0..size).map(|i| lo_coeffs[i] * psi.coeff(size - 1 - i)).collect();
        for row in 0..size {
            let out: Complex64 = (0..size).map(|col| input[col] * d[(row, col)]).sum();
            window.push(CountOutcome::from_counts(row as u32, two_j - row as u32));
            log_probs.push(LogWeight::from_value(out.norm_sqr()));
        }
    }
    Ok(HomodyneDistribution::from_log_probs(window, log_probs, *lo, 0.0))
}
