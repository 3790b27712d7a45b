use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest Hermite-Gaussian order the recursion accepts.
pub const MAX_HERMITE_ORDER: usize = 1024;

// rescale threshold for the recursion; 2^500
const RESCALE: f64 = 3.273_390_607_896_142e150;

/// `u_n(x) = <x|n>` with the convention `x = (a + a†)/√2`.
pub fn hermite_gaussian(n: usize, x: f64) -> Result<f64> {
    Ok(hermite_gaussians(n, x)?[n])
}

/// `[u_0(x), ..., u_max(x)]` from the orthonormal three-term recursion
///
/// `u_{n+1} = x √(2/(n+1)) u_n - √(n/(n+1)) u_{n-1}`.
///
/// The recursion runs on a rescaled mantissa with the Gaussian factor kept
/// as a separate logarithm, so neither `e^(-x²/2)` underflow at large `|x|`
/// nor polynomial growth at large `n` loses the result.
pub fn hermite_gaussians(max_order: usize, x: f64) -> Result<Vec<f64>> {
    if max_order > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrderTooLarge { order: max_order, max: MAX_HERMITE_ORDER });
    }
    let mut out = Vec::with_capacity(max_order + 1);
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out.push(materialize(cur, log_scale));
    for k in 0..max_order {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(materialize(cur, log_scale));
    }
    Ok(out)
}

fn materialize(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        return 0.0;
    }
    mantissa.signum() * (mantissa.abs().ln() + log_scale).exp()
}
