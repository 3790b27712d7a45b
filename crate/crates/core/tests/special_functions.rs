//! Kernels against independent references: exact rational and big-integer
//! arithmetic, closed-form polynomials, dense matrix exponentials.

use homodyne_core::special::*;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

fn big_factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `ln n` for a big integer, keeping the leading 64 bits.
fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `d^j_{m'm}(π/2)` from the explicit sum, evaluated in exact rationals.
fn wigner_exact(two_j: i64, two_mp: i64, two_m: i64) -> f64 {
    let jpm = |a: i64, b: i64| ((a + b) / 2) as u64;
    let jmm = |a: i64, b: i64| ((a - b) / 2) as u64;
    let (jpm_p, jmm_p, jpm_l, jmm_l) = (jpm(two_j, two_mp), jmm(two_j, two_mp), jpm(two_j, two_m), jmm(two_j, two_m));
    let m_minus_mp = (two_m - two_mp) / 2;
    let mut sum = BigRational::zero();
    for k in 0..=(jpm_l as i64) {
        let a = jpm_l as i64 - k;
        let b = jmm_p as i64 - k;
        let c = k - m_minus_mp;
        if a < 0 || b < 0 || c < 0 {
            continue;
        }
        let den = big_factorial(a as u64) * big_factorial(k as u64) * big_factorial(b as u64) * big_factorial(c as u64);
        let term = BigRational::new(BigInt::one(), den);
        if (k - m_minus_mp).rem_euclid(2) == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let f = big_factorial(jpm_p) * big_factorial(jmm_p) * big_factorial(jpm_l) * big_factorial(jmm_l);
    let two_pow = BigInt::one() << (two_j as usize);
    let square = &sum * &sum * BigRational::new(f, two_pow);
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    sign * square.to_f64().unwrap().sqrt()
}

#[test]
fn wigner_matches_dense_exponential_up_to_40() {
    let mut worst = 0.0_f64;
    for two_j in 0..=40u32 {
        let dense = wigner_d_oracle(two_j).unwrap();
        for col in 0..=two_j as usize {
            let two_m = -(two_j as i32) + 2 * col as i32;
            let column = wigner_d_pi2(two_j, two_m).unwrap();
            for row in 0..=two_j as usize {
                worst = worst.max((column.values()[row] - dense[(row, col)]).abs());
            }
        }
    }
    assert!(worst <= 1e-10, "max deviation {worst:e}");
}

#[test]
fn wigner_matches_rational_sum_at_two_j_400() {
    let column = wigner_d_pi2(400, 388).unwrap();
    for two_mp in [-400, -388, -200, -2, 0, 10, 250, 388, 400] {
        let exact = wigner_exact(400, two_mp, 388);
        let got = column.get(two_mp as i32);
        assert!((got - exact).abs() <= 1e-9 * exact.abs(), "m' = {two_mp}: {got:e} vs {exact:e}");
    }
    let column = wigner_d_pi2(81, -3).unwrap();
    for two_mp in [-81, -41, -1, 1, 37, 81] {
        let exact = wigner_exact(81, two_mp, -3);
        assert!((column.get(two_mp as i32) - exact).abs() <= 1e-12 * exact.abs().max(1e-3));
    }
}

#[test]
fn wigner_symmetries() {
    // d_{m'm} = (-1)^{m'-m} d_{mm'} = (-1)^{m'-m} d_{-m',-m}
    for two_j in [7u32, 30, 151] {
        let t = two_j as i32;
        for two_m in (-t..=t).step_by(2).take(12) {
            let col = wigner_d_pi2(two_j, two_m).unwrap();
            let mirror = wigner_d_pi2(two_j, -two_m).unwrap();
            for two_mp in (-t..=t).step_by(2) {
                let row = wigner_d_pi2(two_j, two_mp).unwrap();
                let sign = if ((two_mp - two_m) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let d = col.get(two_mp);
                assert!((d - sign * row.get(two_m)).abs() < 1e-12);
                assert!((d - sign * mirror.get(-two_mp)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn wigner_columns_stay_unitary_to_600() {
    for two_j in (0..=600u32).step_by(37).chain([599, 600]) {
        let t = two_j as i32;
        let mut lowers: Vec<i32> = vec![-t, t, t % 2];
        lowers.push(-t + 2 * (two_j as i32 / 3));
        for two_m in lowers {
            let col = wigner_d_pi2(two_j, two_m).unwrap();
            let norm: f64 = col.values().iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() <= 1e-10, "two_j {two_j}, two_m {two_m}: {norm}");
        }
    }
}

#[test]
fn log_factorial_matches_big_integers() {
    for n in [0u64, 1, 20, 255, 256, 257, 400, 1000, 5000] {
        let exact = big_ln(&big_factorial(n));
        let got = log_factorial(n);
        assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n = {n}: {got} vs {exact}");
    }
}

#[test]
fn log_poisson_at_the_mean() {
    // ln P(200; 200) = 200 ln 200 - 200 - ln 200!
    let exact = 200.0 * 200f64.ln() - 200.0 - big_ln(&big_factorial(200));
    assert!((log_poisson(200, 200.0) - exact).abs() < 1e-12 * exact.abs());
    assert_eq!(log_poisson(0, 0.0), 0.0);
    assert_eq!(log_poisson(3, 0.0), f64::NEG_INFINITY);
}

#[test]
fn log_binomial_matches_big_integers() {
    let exact = big_ln(&(big_factorial(600) / (big_factorial(230) * big_factorial(370))));
    assert!((log_binomial(600, 230) - exact).abs() < 1e-12 * exact);
}

#[test]
fn hermite_gaussian_against_polynomial() {
    let x = 1.2_f64;
    let h6 = 64.0 * x.powi(6) - 480.0 * x.powi(4) + 720.0 * x.powi(2) - 120.0;
    let norm = (64.0 * 720.0 * std::f64::consts::PI.sqrt()).sqrt();
    let expect = h6 * (-x * x / 2.0).exp() / norm;
    assert!((hermite_gaussian(6, x).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn hermite_gaussians_are_orthonormal() {
    // trapezoid rule converges spectrally for these integrands
    let (lo, hi, steps) = (-20.0_f64, 20.0_f64, 8000);
    let h = (hi - lo) / steps as f64;
    let grid: Vec<Vec<f64>> = (0..=steps).map(|i| hermite_gaussians(30, lo + i as f64 * h).unwrap()).collect();
    for m in 0..=30 {
        for n in m..=30 {
            let integral: f64 = grid.iter().map(|u| u[m] * u[n]).sum::<f64>() * h;
            let expect = if m == n { 1.0 } else { 0.0 };
            assert!((integral - expect).abs() < 1e-8, "<{m}|{n}> = {integral}");
        }
    }
}

#[test]
fn large_j_wigner_approaches_hermite_form() {
    // d^j_{m, j-n} ~ (-1)^n (j/2)^{-1/4}... compared through the asymptotic helper
    let (two_j, n) = (800u32, 4usize);
    let col = wigner_d_pi2(two_j, two_j as i32 - 2 * n as i32).unwrap();
    for two_m in [0, 10, -20] {
        let exact = col.get(two_m);
        let approx = wigner_d_asymptotic(two_j, two_m, n, AsymptoticArgument::Arcsin).unwrap();
        assert!((exact - approx).abs() < 2e-2 * col.values().iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    }
}

#[test]
fn seed_corruption_is_detected_by_the_oracle() {
    set_seed_corruption(true);
    let col = wigner_d_pi2(10, 2).unwrap();
    set_seed_corruption(false);
    let dense = wigner_d_oracle(10).unwrap();
    let worst = (0..=10).map(|row| (col.values()[row] - dense[(row, 6)]).abs()).fold(0.0, f64::max);
    assert!(worst > 1e-6);
}
