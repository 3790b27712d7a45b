//! Normally ordered terms of the correction series.
//!
//! The exponent splits into a polynomial in `a` plus the same polynomial in
//! `a†`, `F(a) + F(a†)` with `F(z) = Σ_{p≥2} f_p z^p`:
//!
//! * `f_2 = -(2j - A²)/(2A²)`
//! * `f_p = 2m/(p A^p)` for odd `p ≥ 3`
//! * `f_p = -2j/(p A^p)` for even `p ≥ 4`
//!
//! Under normal ordering the two commute, so the exponential is
//! `Σ_{r,s} g_r g_s (a†)^s |x><x| a^r` where `e^{F(z)} = Σ g_r z^r`.
//! Each `g_r` is a sum over partitions of `r` into parts `≥ 2`.

use crate::error::{Error, Result};

pub const MAX_SERIES_ORDER: u32 = 8;

/// Largest total number of field operators kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesOrder(u32);

impl SeriesOrder {
    pub fn new(max_field_operators: u32) -> Result<Self> {
        if max_field_operators % 2 != 0 || max_field_operators > MAX_SERIES_ORDER {
            return Err(Error::InvalidSeriesOrder(max_field_operators));
        }
        Ok(Self(max_field_operators))
    }

    pub fn max_field_operators(&self) -> u32 {
        self.0
    }
}

/// `weight · Π_p f_p^{powers[p]}`
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub weight: f64,
    pub powers: [u32; MAX_SERIES_ORDER as usize + 1],
}

impl Monomial {
    pub fn eval(&self, f: &[f64]) -> f64 {
        self.powers
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .fold(self.weight, |acc, (p, &k)| acc * f[p].powi(k as i32))
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut powers = self.powers;
        for (a, b) in powers.iter_mut().zip(other.powers) {
            *a += b;
        }
        Monomial { weight: self.weight * other.weight, powers }
    }
}

/// Coefficient of `<x|a^r ρ (a†)^s|x>`. A paired term also stands for its
/// mirror `(s, r)`, which is the complex conjugate, so it contributes twice
/// the real part.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerm {
    pub r: u32,
    pub s: u32,
    pub paired: bool,
    pub monomials: Vec<Monomial>,
}

impl SeriesTerm {
    pub fn coefficient(&self, two_j: u32, two_m: i32, amplitude: f64) -> f64 {
        let f = exponent_coefficients(two_j, two_m, amplitude);
        self.coefficient_from(&f)
    }

    pub fn coefficient_from(&self, f: &[f64]) -> f64 {
        self.monomials.iter().map(|m| m.eval(f)).sum()
    }
}

/// `f_0 ..= f_8` of the exponent; `f_0 = f_1 = 0`.
pub fn exponent_coefficients(two_j: u32, two_m: i32, amplitude: f64) -> Vec<f64> {
    let j = f64::from(two_j) / 2.0;
    let m = f64::from(two_m) / 2.0;
    let a2 = amplitude * amplitude;
    (0..=MAX_SERIES_ORDER as i32)
        .map(|p| match p {
            0 | 1 => 0.0,
            2 => -(2.0 * j - a2) / (2.0 * a2),
            p if p % 2 == 1 => 2.0 * m / (f64::from(p) * amplitude.powi(p)),
            p => -2.0 * j / (f64::from(p) * amplitude.powi(p)),
        })
        .collect()
}

/// Monomials of `g_r`: partitions of `r` into parts `≥ 2`, each part `p`
/// used `k_p` times weighted by `1/k_p!`.
fn g_monomials(r: u32) -> Vec<Monomial> {
    fn walk(rest: u32, smallest: u32, powers: &mut [u32; 9], out: &mut Vec<Monomial>) {
        if rest == 0 {
            let weight = powers.iter().map(|&k| 1.0 / factorial(k)).product();
            out.push(Monomial { weight, powers: *powers });
            return;
        }
        for p in smallest..=rest {
            powers[p as usize] += 1;
            walk(rest - p, p, powers, out);
            powers[p as usize] -= 1;
        }
    }
    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }
    let mut out = Vec::new();
    walk(r, 2, &mut [0; 9], &mut out);
    out
}

/// All terms with `r + s ≤ order`, `r ≥ s`, ordered by total degree then `r`.
pub fn series_terms(order: SeriesOrder) -> Vec<SeriesTerm> {
    let k = order.max_field_operators();
    let g: Vec<Vec<Monomial>> = (0..=k).map(g_monomials).collect();
    let mut terms = Vec::new();
    for total in 0..=k {
        for s in 0..=total / 2 {
            let r = total - s;
            let (gr, gs) = (&g[r as usize], &g[s as usize]);
            if gr.is_empty() || gs.is_empty() {
                continue;
            }
            let monomials = gr.iter().flat_map(|a| gs.iter().map(move |b| a.times(b))).collect();
            terms.push(SeriesTerm { r, s, paired: r != s, monomials });
        }
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_cap_and_parity() {
        assert!(SeriesOrder::new(3).is_err());
        assert!(SeriesOrder::new(10).is_err());
        assert_eq!(SeriesOrder::new(8).unwrap().max_field_operators(), 8);
    }

    #[test]
    fn low_orders() {
        let t0 = series_terms(SeriesOrder::new(0).unwrap());
        assert_eq!(t0.len(), 1);
        assert_eq!((t0[0].r, t0[0].s, t0[0].paired), (0, 0, false));
        assert_eq!(t0[0].coefficient(400, 6, 20.0), 1.0);

        let t2 = series_terms(SeriesOrder::new(2).unwrap());
        assert_eq!(t2.len(), 2);
        let (two_j, a) = (420, 20.0);
        assert_eq!((t2[1].r, t2[1].s, t2[1].paired), (2, 0, true));
        let expect = -(f64::from(two_j) - a * a) / (2.0 * a * a);
        assert!((t2[1].coefficient(two_j, 0, a) - expect).abs() < 1e-16);
    }

    #[test]
    fn g_counts_partitions() {
        // partitions of r into parts >= 2: 1, 0, 1, 1, 2, 2, 4, 4, 7
        let counts: Vec<usize> = (0..=8).map(|r| g_monomials(r).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 1, 2, 2, 4, 4, 7]);
    }
}
