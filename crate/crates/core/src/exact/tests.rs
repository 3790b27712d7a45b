use approx::assert_relative_eq;
use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::special::log_poisson;
use crate::states::FockDensity;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn outcome_counts_round_trip() {
    let o = CountOutcome::new(7, -3).unwrap();
    assert_eq!(o.counts(), (2, 5));
    assert_eq!(CountOutcome::from_counts(2, 5), o);
    assert!(CountOutcome::new(4, 1).is_err());
    assert!(CountOutcome::new(4, -6).is_err());
    assert_eq!(CountOutcome::multiplet(4, None).count(), 5);
    assert_eq!(CountOutcome::multiplet(9, Some(3)).map(|o| o.two_m()).collect::<Vec<_>>(), vec![-3, -1, 1, 3]);
}

#[test]
fn vacuum_signal_gives_poisson_product() {
    let lo = LocalOscillator::new(3.0, 0.7).unwrap();
    let vac = FockVector::vacuum();
    for (two_j, two_m) in [(0, 0), (9, 3), (9, -9), (18, 0), (30, 12)] {
        let o = CountOutcome::new(two_j, two_m).unwrap();
        let (n1, n2) = o.counts();
        let expect = (log_poisson(n1.into(), 4.5) + log_poisson(n2.into(), 4.5)).exp();
        assert!(rel(probability(&vac, &lo, o).unwrap(), expect) < 1e-12);
    }
}

#[test]
fn vacuum_difference_marginal_is_skellam() {
    let a = 2.5_f64;
    let lo = LocalOscillator::new(a, 0.0).unwrap();
    let dist = distribution(&FockVector::vacuum(), &lo, &WindowPolicy::sigmas(14.0)).unwrap();
    let mu = a * a / 2.0;
    for (two_m, p) in dist.marginal_difference() {
        if two_m.abs() > 10 {
            continue;
        }
        let d = two_m.unsigned_abs() as u64;
        // direct convolution of two Poissons
        let skellam: f64 = (0..200).map(|k: u64| (log_poisson(k + d, mu) + log_poisson(k, mu)).exp()).sum();
        assert!((p - skellam).abs() < 1e-12, "two_m {two_m}: {p} vs {skellam}");
    }
}

#[test]
fn coherent_signal_matches_closed_form() {
    let beta = Complex64::new(2.0, 0.5);
    let lo = LocalOscillator::new(4.0, 0.3).unwrap();
    let psi = FockVector::coherent(beta, 80).unwrap();
    let dist = distribution(&psi, &lo, &WindowPolicy::sigmas(6.0)).unwrap();
    for (o, p) in dist.iter() {
        let expect = coherent_oracle(beta, &lo, o);
        // deeper in the tails the binomial cancellation in the sum eats the digits
        if expect > 1e-12 {
            assert!(rel(p, expect) < 1e-9, "{o:?}: {p} vs {expect}");
        }
    }
}

#[test]
fn single_photon_splits_evenly_without_oscillator() {
    let one = FockVector::number(1, 1).unwrap();
    let dist = brute_force_bs_oracle_vacuum_lo(&one, 3).unwrap();
    assert_relative_eq!(dist.get(CountOutcome::from_counts(1, 0)).unwrap(), 0.5, epsilon = 1e-14);
    assert_relative_eq!(dist.get(CountOutcome::from_counts(0, 1)).unwrap(), 0.5, epsilon = 1e-14);
    assert_relative_eq!(dist.total_mass, 1.0, epsilon = 1e-14);
}

#[test]
fn two_photon_hong_ou_mandel_without_oscillator() {
    // |1>|1> is not an input here, but |2> on one port gives 1/4, 1/2, 1/4
    let two = FockVector::number(2, 2).unwrap();
    let dist = brute_force_bs_oracle_vacuum_lo(&two, 3).unwrap();
    assert_relative_eq!(dist.get(CountOutcome::from_counts(2, 0)).unwrap(), 0.25, epsilon = 1e-14);
    assert_relative_eq!(dist.get(CountOutcome::from_counts(1, 1)).unwrap(), 0.5, epsilon = 1e-14);
}

#[test]
fn single_photon_against_brute_force() {
    let one = FockVector::number(1, 1).unwrap();
    let lo = LocalOscillator::new(1.5, 0.4).unwrap();
    let brute = brute_force_bs_oracle(&one, &lo, 40).unwrap();
    let engine = ExactEngine::new(&one, &lo).unwrap();
    for two_m in [-2, 0, 2] {
        let o = CountOutcome::new(2, two_m).unwrap();
        let p = engine.log_probability(o).unwrap().value();
        let q = brute.get(o).unwrap();
        assert!((p - q).abs() < 1e-30 + 1e-11 * q, "{o:?}: {p} vs {q}");
    }
    for (o, p) in brute.iter().filter(|(o, _)| o.two_j() <= 30) {
        let q = engine.log_probability(o).unwrap().value();
        assert!((p - q).abs() < 1e-13 + 1e-10 * p, "{o:?}");
    }
}

#[test]
fn window_mass_accounts_for_everything() {
    let lo = LocalOscillator::new(3.0, 0.0).unwrap();
    let psi = FockVector::coherent_auto(Complex64::new(1.0, 0.0)).unwrap();
    for c in [0.5, 2.0, 8.0] {
        let dist = distribution(&psi, &lo, &WindowPolicy::sigmas(c)).unwrap();
        assert!((dist.total_mass + dist.epsilon_window - 1.0).abs() < 1e-12, "c = {c}");
    }
    // tails beyond the cap fall off, so the boundary estimate bounds them
    let capped = WindowPolicy { two_m_cap: Some(8), ..WindowPolicy::sigmas(6.0) };
    let dist = distribution(&FockVector::vacuum(), &lo, &capped).unwrap();
    assert!(dist.epsilon_window > 1.0 - dist.total_mass - 1e-12);
    assert!(dist.epsilon_window < 1.0);
}

#[test]
fn mixture_is_weighted_sum() {
    let lo = LocalOscillator::new(2.0, 0.0).unwrap();
    let b1 = Complex64::new(1.0, 0.0);
    let b2 = Complex64::new(-0.5, 1.0);
    let v1 = FockVector::coherent(b1, 40).unwrap();
    let v2 = FockVector::coherent(b2, 40).unwrap();
    let rho = FockDensity::mix(&[(0.3, FockDensity::from_pure(&v1)), (0.7, FockDensity::from_pure(&v2))]).unwrap();
    for (two_j, two_m) in [(4, 0), (5, -3), (8, 2)] {
        let o = CountOutcome::new(two_j, two_m).unwrap();
        let expect = 0.3 * coherent_oracle(b1, &lo, o) + 0.7 * coherent_oracle(b2, &lo, o);
        assert!(rel(probability(&rho, &lo, o).unwrap(), expect) < 1e-10);
    }
}

#[test]
fn pure_amplitude_squares_to_probability() {
    let lo = LocalOscillator::new(2.0, 1.1).unwrap();
    let psi = FockVector::squeezed_vacuum_auto(0.5).unwrap();
    let o = CountOutcome::new(6, 2).unwrap();
    let m = amplitude(&psi, &lo, o).unwrap();
    assert!(rel(m.norm_sqr(), probability(&psi, &lo, o).unwrap()) < 1e-13);
}

#[test]
fn single_multiplet_window() {
    let lo = LocalOscillator::new(2.0, 0.0).unwrap();
    let dist = distribution(&FockVector::vacuum(), &lo, &WindowPolicy::single(5)).unwrap();
    assert_eq!(dist.len(), 6);
    assert!(matches!(
        distribution(&FockVector::vacuum(), &lo, &WindowPolicy { two_j_range: Some((5, 4)), ..Default::default() }),
        Err(Error::EmptyWindow)
    ));
}
