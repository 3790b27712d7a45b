use std::sync::atomic::{AtomicBool, Ordering};

use super::hermite::hermite_gaussian;
use crate::error::{Error, Result};

static CORRUPT_SEED: AtomicBool = AtomicBool::new(false);

/// Negative control for the acceptance harness: when enabled, every column
/// seed is scaled by `1 + 1e-3`. Process-wide; never enable it inside a
/// process that computes anything it reports as valid.
#[doc(hidden)]
pub fn set_seed_corruption(enabled: bool) {
    CORRUPT_SEED.store(enabled, Ordering::SeqCst);
}

const RESCALE: f64 = 3.273_390_607_896_142e150;
const RESCALE_EXP: i32 = 500;

/// One column `d^j_{m', m}(π/2)` of the rotation matrix, fixed lower index `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDColumn {
    two_j: u32,
    two_m_lower: i32,
    values: Vec<f64>,
}

impl WignerDColumn {
    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn two_m_lower(&self) -> i32 {
        self.two_m_lower
    }

    /// Values ordered by `two_m_prime = -two_j, -two_j + 2, ..., two_j`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `d^j_{m', m}` for the given doubled upper index; zero outside the multiplet.
    pub fn get(&self, two_m_prime: i32) -> f64 {
        let two_j = self.two_j as i64;
        let tmp = i64::from(two_m_prime);
        if tmp.abs() > two_j || (tmp + two_j) % 2 != 0 {
            return 0.0;
        }
        self.values[((tmp + two_j) / 2) as usize]
    }
}

pub(crate) fn check_indices(two_j: u32, two_m: i32) -> Result<()> {
    let j = i64::from(two_j);
    let m = i64::from(two_m);
    if m.abs() > j || (j + m) % 2 != 0 {
        return Err(Error::InvalidAngularIndex { two_j: j, two_m: m });
    }
    Ok(())
}

/// All `d^j_{m', m}(π/2)` for fixed `m = two_m_lower / 2`.
///
/// The recursion follows from `e^{-iθJy} J_z e^{iθJy} = J_z cos θ + J_x sin θ`
/// in the matrix element between `<jm'|` and `|jm>`; at `θ = π/2`
///
/// `b(m') d_{m'+1} = 2m d_{m'} - a(m') d_{m'-1}`,
/// `a(m') = √((j+m')(j-m'+1))`, `b(m') = √((j-m')(j+m'+1))`.
///
/// Both edge rows are closed form, `d_{-j,m} = √C(2j, j+m) 2^{-j}` and
/// `d_{j,m} = (-1)^{j-m} √C(2j, j+m) 2^{-j}`, so the column is filled
/// inward from each edge and the two halves meet at `m' ≈ 0`. Each half
/// runs from a classically forbidden edge toward the allowed middle, where
/// the wanted solution dominates. The mantissa is rescaled against a running
/// logarithm so seeds like `2^{-j}` at large `j` never underflow.
pub fn wigner_d_pi2(two_j: u32, two_m_lower: i32) -> Result<WignerDColumn> {
    check_indices(two_j, two_m_lower)?;
    let size = two_j as usize + 1;
    let mut values = vec![0.0; size];
    let j = f64::from(two_j) / 2.0;
    let m = f64::from(two_m_lower) / 2.0;

    let j_plus_m = ((two_j as i64 + i64::from(two_m_lower)) / 2) as u64;
    let (mut seed, seed_exp) = edge_seed(u64::from(two_j), j_plus_m);
    if CORRUPT_SEED.load(Ordering::Relaxed) {
        seed *= 1.0 + 1e-3;
    }
    // (-1)^(j-m) for the top edge; j - m is an integer
    let top_sign = if (two_j as i64 - i64::from(two_m_lower)) / 2 % 2 == 0 { 1.0 } else { -1.0 };

    let mid = size / 2;

    // upward from m' = -j over indices 0..mid
    {
        let mut exp2 = seed_exp;
        let mut prev = 0.0;
        let mut cur = seed;
        values[0] = ldexp(cur, exp2);
        for i in 0..mid.min(size - 1) {
            let mp = -j + i as f64;
            let a = ((j + mp) * (j - mp + 1.0)).sqrt();
            let b = ((j - mp) * (j + mp + 1.0)).sqrt();
            let next = (2.0 * m * cur - a * prev) / b;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE {
                cur /= RESCALE;
                prev /= RESCALE;
                exp2 += RESCALE_EXP;
            }
            values[i + 1] = ldexp(cur, exp2);
        }
    }

    // downward from m' = j over indices (size-1)..=(mid+1)
    if size > 1 {
        let mut exp2 = seed_exp;
        let mut prev = 0.0;
        let mut cur = top_sign * seed;
        values[size - 1] = ldexp(cur, exp2);
        let mut i = size - 1;
        while i > mid + 1 {
            let mp = -j + i as f64;
            let a = ((j + mp) * (j - mp + 1.0)).sqrt();
            let b = ((j - mp) * (j + mp + 1.0)).sqrt();
            let next = (2.0 * m * cur - b * prev) / a;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE {
                cur /= RESCALE;
                prev /= RESCALE;
                exp2 += RESCALE_EXP;
            }
            values[i - 1] = ldexp(cur, exp2);
            i -= 1;
        }
    }

    Ok(WignerDColumn { two_j, two_m_lower, values })
}

/// `√(C(n, k) / 2^n)` as `mantissa · 2^exp`.
///
/// Built from the ratios `(n - i + 1)/i` in linear space with exact binary
/// rescaling. Going through log-factorials instead would cost an error of
/// order `ε ln n!`, which the cancellations in the counting sums amplify.
fn edge_seed(n: u64, k: u64) -> (f64, i32) {
    let k = k.min(n - k);
    let mut mant = 1.0_f64;
    let mut exp2 = -(n as i64);
    for i in 1..=k {
        mant *= (n - i + 1) as f64 / i as f64;
        if mant > RESCALE {
            mant /= RESCALE;
            exp2 += i64::from(RESCALE_EXP);
        }
    }
    if exp2 % 2 != 0 {
        mant *= 2.0;
        exp2 -= 1;
    }
    (mant.sqrt(), (exp2 / 2) as i32)
}

/// `mantissa · 2^exp` without intermediate overflow.
fn ldexp(mantissa: f64, exp: i32) -> f64 {
    let mut v = mantissa;
    let mut e = exp;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e)
}

/// Argument of the Hermite-Gaussian in the large-`j` form of `d^j_{m, j-n}(π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AsymptoticArgument {
    /// `√j · arcsin(m / j)`
    #[default]
    Arcsin,
    /// `m / √j`, valid for `|m| ≪ j`
    Linear,
}

/// Large-`j`, small-`n` approximation `d^j_{m, j-n}(π/2) ≈ (-1)^n j^{-1/4} u_n(·)`.
pub fn wigner_d_asymptotic(
    two_j: u32,
    two_m_prime: i32,
    n: usize,
    argument: AsymptoticArgument,
) -> Result<f64> {
    if two_j == 0 || i64::from(two_m_prime).abs() > i64::from(two_j) {
        return Err(Error::InvalidAngularIndex {
            two_j: i64::from(two_j),
            two_m: i64::from(two_m_prime),
        });
    }
    let j = f64::from(two_j) / 2.0;
    let m = f64::from(two_m_prime) / 2.0;
    let x = match argument {
        AsymptoticArgument::Arcsin => j.sqrt() * (m / j).asin(),
        AsymptoticArgument::Linear => m / j.sqrt(),
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * j.powf(-0.25) * hermite_gaussian(n, x)?)
}
