use std::cmp::Ordering;
use std::ops::{Div, Mul};

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Carries factorial-laden prefactors such as `A^(4j) e^(-A^2) / (j+m)!`
/// whose pieces overflow `f64` long before their product does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeight {
    log_magnitude: f64,
    sign: i8,
}

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight { log_magnitude: f64::NEG_INFINITY, sign: 0 };
    pub const ONE: LogWeight = LogWeight { log_magnitude: 0.0, sign: 1 };

    /// `sign` is reduced to -1, 0 or +1; a zero sign yields [`LogWeight::ZERO`].
    pub fn new(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogWeight { log_magnitude, sign: sign.signum() }
        }
    }

    pub fn from_log(log_magnitude: f64) -> Self {
        Self::new(log_magnitude, 1)
    }

    pub fn from_value(value: f64) -> Self {
        if value == 0.0 {
            Self::ZERO
        } else {
            LogWeight { log_magnitude: value.abs().ln(), sign: if value > 0.0 { 1 } else { -1 } }
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    /// Sum of two weights, evaluated relative to the larger magnitude.
    pub fn add(self, other: LogWeight) -> LogWeight {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_magnitude >= other.log_magnitude {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.log_magnitude - big.log_magnitude).exp();
        let mantissa = f64::from(big.sign) + f64::from(small.sign) * ratio;
        if mantissa == 0.0 {
            return LogWeight::ZERO;
        }
        LogWeight::new(big.log_magnitude + mantissa.abs().ln(), mantissa.signum() as i8)
    }

    pub fn powi(self, exponent: i32) -> LogWeight {
        if self.is_zero() {
            return if exponent == 0 { LogWeight::ONE } else { LogWeight::ZERO };
        }
        let sign = if exponent % 2 == 0 { 1 } else { self.sign };
        LogWeight::new(self.log_magnitude * f64::from(exponent), sign)
    }

    /// Compare magnitudes, ignoring sign.
    pub fn cmp_magnitude(&self, other: &LogWeight) -> Ordering {
        self.log_magnitude.total_cmp(&other.log_magnitude)
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.is_zero() || rhs.is_zero() {
            return LogWeight::ZERO;
        }
        LogWeight::new(self.log_magnitude + rhs.log_magnitude, self.sign * rhs.sign)
    }
}

impl Div for LogWeight {
    type Output = LogWeight;

    fn div(self, rhs: LogWeight) -> LogWeight {
        assert!(!rhs.is_zero(), "division by a zero LogWeight");
        if self.is_zero() {
            return LogWeight::ZERO;
        }
        LogWeight::new(self.log_magnitude - rhs.log_magnitude, self.sign * rhs.sign)
    }
}

impl Mul<f64> for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: f64) -> LogWeight {
        self * LogWeight::from_value(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_sign_means_zero() {
        let w = LogWeight::new(12.0, 0);
        assert!(w.is_zero());
        assert_eq!(w.value(), 0.0);
        assert_eq!(LogWeight::from_value(0.0), LogWeight::ZERO);
    }

    #[test]
    fn products_beyond_f64_range() {
        let huge = LogWeight::from_log(1000.0);
        let tiny = LogWeight::from_log(-999.0);
        assert!(((huge * tiny).value() - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn signed_addition() {
        let a = LogWeight::from_value(3.0);
        let b = LogWeight::from_value(-5.0);
        assert!((a.add(b).value() + 2.0).abs() < 1e-15);
        assert!(a.add(LogWeight::from_value(-3.0)).is_zero());
    }

    proptest! {
        #[test]
        // exp(ln v) loses |ln v| ulps, so the 1e-14 bound holds for |ln v| <= 69
        fn round_trips_ordinary_floats(e in -30.0f64..30.0, negative: bool) {
            let v = if negative { -(10f64.powf(e)) } else { 10f64.powf(e) };
            let back = LogWeight::from_value(v).value();
            prop_assert!(((back - v) / v).abs() <= 1e-14);
        }
    }
}
