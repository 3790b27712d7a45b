use approx::assert_relative_eq;
use num_complex::Complex64;

use super::*;
use crate::exact::ExactEngine;
use crate::states::coherent_quadrature_density;

/// Truncated bivariate polynomial, `c[r][s]` for `r + s ≤ order`.
type Poly = Vec<Vec<f64>>;

fn poly_mul(a: &Poly, b: &Poly, order: usize) -> Poly {
    let mut out = vec![vec![0.0; order + 1]; order + 1];
    for r1 in 0..=order {
        for s1 in 0..=order - r1 {
            if a[r1][s1] == 0.0 {
                continue;
            }
            for r2 in 0..=order - r1 - s1 {
                for s2 in 0..=order - r1 - s1 - r2 {
                    out[r1 + r2][s1 + s2] += a[r1][s1] * b[r2][s2];
                }
            }
        }
    }
    out
}

/// `exp(F(u) + F(v))` by the exponential power series, truncated.
fn exp_oracle(f: &[f64], order: usize) -> Poly {
    let mut chi = vec![vec![0.0; order + 1]; order + 1];
    for p in 2..=order {
        chi[p][0] += f[p];
        chi[0][p] += f[p];
    }
    let mut total = vec![vec![0.0; order + 1]; order + 1];
    let mut power = total.clone();
    power[0][0] = 1.0;
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            power = poly_mul(&power, &chi, order);
            fact *= k as f64;
        }
        for r in 0..=order {
            for s in 0..=order - r {
                total[r][s] += power[r][s] / fact;
            }
        }
    }
    total
}

#[test]
fn term_coefficients_match_exponential_expansion() {
    for (two_j, two_m, a) in [(380, 40, 20.0), (9, -3, 2.5), (101, 77, 7.0), (4, 0, 1.3)] {
        let f = exponent_coefficients(two_j, two_m, a);
        let oracle = exp_oracle(&f, 8);
        let terms = series_terms(SeriesOrder::new(8).unwrap());
        let mut seen = vec![vec![false; 9]; 9];
        for t in &terms {
            let c = t.coefficient(two_j, two_m, a);
            let (r, s) = (t.r as usize, t.s as usize);
            assert!((c - oracle[r][s]).abs() < 1e-13 * oracle[r][s].abs().max(1e-300) + 1e-300, "({r},{s})");
            assert!((c - oracle[s][r]).abs() <= 1e-13 * c.abs());
            seen[r][s] = true;
            seen[s][r] = true;
        }
        for r in 0..=8 {
            for s in 0..=8 - r {
                if !seen[r][s] {
                    assert_eq!(oracle[r][s], 0.0, "missing ({r},{s})");
                }
            }
        }
    }
}

#[test]
fn order_four_contains_expected_pieces() {
    let (two_j, two_m, a) = (420, 10, 20.0);
    let terms = series_terms(SeriesOrder::new(4).unwrap());
    let by = |r, s| terms.iter().find(|t| t.r == r && t.s == s).unwrap().coefficient(two_j, two_m, a);
    let d = (f64::from(two_j) - a * a) / (2.0 * a * a);
    let j = f64::from(two_j) / 2.0;
    let m = f64::from(two_m) / 2.0;
    assert_relative_eq!(by(4, 0), 0.5 * d * d - j / (2.0 * a.powi(4)), max_relative = 1e-13);
    assert_relative_eq!(by(2, 2), d * d, max_relative = 1e-13);
    assert_relative_eq!(by(3, 0), 2.0 * m / (3.0 * a.powi(3)), max_relative = 1e-13);
    assert!(terms.iter().all(|t| t.r + t.s <= 4 && t.r != 1 && t.s != 1));
}

#[test]
fn coherent_matrix_elements() {
    for gamma in [Complex64::new(0.7, -0.4), Complex64::new(-1.2, 0.9)] {
        // the default cutoff leaves amplitude tails near 1e-11, which a^r amplifies
        let psi = FockVector::coherent(gamma, 60).unwrap();
        for (r, s, x) in [(0, 0, 0.3), (2, 1, -1.0), (4, 3, 1.7)] {
            let got = quadrature_matrix_element(&psi, r, s, x).unwrap();
            let expect = gamma.powu(r) * gamma.conj().powu(s) * coherent_quadrature_density(gamma, x);
            assert!((got - expect).norm() < 1e-12, "{gamma} {r} {s} {x}: {got} vs {expect}");
        }
    }
}

#[test]
fn number_state_lowering_element() {
    let n = 5;
    let psi = FockVector::number(n, n).unwrap();
    let x = 0.8;
    let u = hermite_gaussians(n, x).unwrap();
    let expect = ((n * (n - 1)) as f64).sqrt() * u[n - 2] * u[n];
    let got = quadrature_matrix_element(&psi, 2, 0, x).unwrap();
    assert!((got.re - expect).abs() < 1e-14 && got.im.abs() < 1e-14);
    let rho = crate::states::FockDensity::from_pure(&psi);
    assert!((quadrature_matrix_element(&rho, 2, 0, x).unwrap() - got).norm() < 1e-14);
}

#[test]
fn prefactor_cases() {
    let a = 3.0_f64;
    let k = series_prefactor(0, 0, a).unwrap();
    assert_relative_eq!(k.value(), PI.sqrt() * (-a * a).exp(), max_relative = 1e-14);
    assert!(series_prefactor(3, 0, a).is_err());
    // exact over Gaussian tends to one at 2j = A², m = 0
    let mut last = f64::INFINITY;
    for a in [4.0_f64, 6.0, 10.0, 20.0, 40.0] {
        let two_j = (a * a) as u32;
        let exact = series_prefactor(two_j, 0, a).unwrap();
        let gauss = series_prefactor_with(two_j, 0, a, PrefactorMode::Gaussian).unwrap();
        let gap = (exact.log_magnitude() - gauss.log_magnitude()).abs();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-3);
}

#[test]
fn asymptotic_examples() {
    let a = 20.0;
    let lo = LocalOscillator::new(a, 0.0).unwrap();
    let vac = FockVector::vacuum();
    let o = CountOutcome::new(400, 0).unwrap();
    for conv in [XConvention::MOverSqrtJ, XConvention::Sqrt2MOverA] {
        let p = asymptotic_probability(&vac, &lo, o, conv).unwrap();
        assert_relative_eq!(p, 1.0 / (PI * a * a), max_relative = 1e-14);
    }
    let far = CountOutcome::new(400, 300).unwrap();
    assert!(asymptotic_probability(&FockVector::number(2, 2).unwrap(), &lo, far, XConvention::Sqrt2MOverA).unwrap() < 1e-20);
    let zero = CountOutcome::new(0, 0).unwrap();
    assert!(matches!(
        asymptotic_probability(&vac, &lo, zero, XConvention::MOverSqrtJ),
        Err(Error::UndefinedQuadrature)
    ));
}

#[test]
fn order_zero_is_asymptotic_with_exact_prefactor() {
    let lo = LocalOscillator::new(6.0, 0.0).unwrap();
    let psi = FockVector::number(3, 3).unwrap();
    let series = SeriesEngine::new(&psi, &lo, SeriesOrder::new(0).unwrap()).unwrap();
    let asym = AsymptoticEngine::new(&psi, &lo).unwrap();
    for two_m in [-8, 0, 4] {
        let o = CountOutcome::new(36, two_m).unwrap();
        let exact_k = series_prefactor(36, two_m, 6.0).unwrap().value();
        let gauss_k = series_prefactor_with(36, two_m, 6.0, PrefactorMode::Gaussian).unwrap().value();
        let expect = asym.probability(o, XConvention::Sqrt2MOverA).unwrap() * exact_k / gauss_k;
        assert_relative_eq!(series.probability(o).unwrap(), expect, max_relative = 1e-13);
    }
}

fn assert_series_exact(psi: &FockVector, a: f64, phase: f64, order: u32) {
    let lo = LocalOscillator::new(a, phase).unwrap();
    let exact = ExactEngine::new(psi, &lo).unwrap();
    let series = SeriesEngine::new(psi, &lo, SeriesOrder::new(order).unwrap()).unwrap();
    let centre = (a * a).round() as u32;
    for two_j in [centre - 3, centre, centre + 8] {
        for o in CountOutcome::multiplet(two_j, None) {
            let p = exact.log_probability(o).unwrap().value();
            if p > 1e-8 {
                let q = series.probability(o).unwrap();
                assert!((p - q).abs() < 1e-9 * p, "{o:?} order {order}: {p} vs {q}");
            }
        }
    }
}

#[test]
fn vacuum_series_is_exact() {
    assert_series_exact(&FockVector::vacuum(), 5.0, 0.0, 0);
    assert_series_exact(&FockVector::vacuum(), 5.0, 0.0, 4);
}

#[test]
fn truncated_states_sum_exactly_at_twice_the_cutoff() {
    assert_series_exact(&FockVector::number(1, 1).unwrap(), 20.0, 0.0, 0);
    assert_series_exact(&FockVector::number(1, 1).unwrap(), 20.0, 0.0, 2);
    assert_series_exact(&FockVector::number(2, 2).unwrap(), 6.0, 0.0, 4);
    assert_series_exact(&FockVector::number(3, 3).unwrap(), 6.0, 0.9, 6);
    let cat = FockVector::new(
        (0..5).map(|n| Complex64::from_polar(1.0 / (n as f64 + 1.0), 0.3 * n as f64)).collect(),
    )
    .unwrap();
    assert_series_exact(&cat, 4.0, -0.4, 8);
}

#[test]
fn phase_is_a_signal_rotation() {
    let psi = FockVector::squeezed_vacuum_auto(0.3).unwrap();
    let phi = 0.7;
    let lo = LocalOscillator::new(5.0, phi).unwrap();
    let order = SeriesOrder::new(4).unwrap();
    let direct = SeriesEngine::new(&psi, &lo, order).unwrap();
    let rotated = SeriesEngine::new(&psi.rotate_phase(phi), &lo.in_phase(), order).unwrap();
    for two_m in [-6, 0, 2, 9 - 1] {
        let o = CountOutcome::new(26, two_m).unwrap();
        assert!((direct.probability(o).unwrap() - rotated.probability(o).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn strong_lo_examples() {
    let lo = LocalOscillator::new(20.0, 0.0).unwrap();
    let coh = strong_lo_report(&FockVector::coherent_auto(Complex64::new(2.0, 0.0)).unwrap(), &lo).unwrap();
    assert_relative_eq!(coh.mean_sq_over_a2, 0.04, max_relative = 1e-9);
    assert_eq!(coh.two_j, 420);
    assert_relative_eq!(coh.typical_offset, 0.025);
    // 2 Re β² (2j - A²)/2A² = 8 · 20/800
    assert!((coh.correction_ratio - 0.2).abs() < 0.02, "{}", coh.correction_ratio);
    let vac = strong_lo_report(&FockVector::vacuum(), &lo).unwrap();
    assert_eq!(vac.mean_photons, 0.0);
    assert!(vac.correction_ratio < 1e-15);
}
