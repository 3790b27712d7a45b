use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest `two_j` the dense oracle will exponentiate.
pub const ORACLE_MAX_TWO_J: u32 = 200;

/// Dense `e^{-i(π/2)J_y}` on the spin-`j` multiplet.
///
/// Rows and columns are ordered by `two_m = -two_j, ..., two_j`, so entry
/// `(row, col)` is `d^j_{m_row, m_col}(π/2)`. With
/// `J_y = (J_+ - J_-)/2i` the generator `-i(π/2)J_y = -(π/4)(J_+ - J_-)`
/// is real, and the exponential is taken with nalgebra's Padé routine.
/// Independent of the recursion in [`wigner_d_pi2`](super::wigner_d_pi2).
pub fn wigner_d_oracle(two_j: u32) -> Result<DMatrix<f64>> {
    if two_j > ORACLE_MAX_TWO_J {
        return Err(Error::OracleDimension { two_j, max: ORACLE_MAX_TWO_J });
    }
    let dim = two_j as usize + 1;
    let j = f64::from(two_j) / 2.0;
    let mut generator = DMatrix::<f64>::zeros(dim, dim);
    for col in 0..dim.saturating_sub(1) {
        let m = -j + col as f64;
        // <j, m+1| J_+ |j, m>
        let raise = ((j - m) * (j + m + 1.0)).sqrt();
        generator[(col + 1, col)] -= FRAC_PI_4 * raise;
        generator[(col, col + 1)] += FRAC_PI_4 * raise;
    }
    Ok(generator.exp())
}
