//! The signed power `φ(s) = |s|^(α-1) s`, its inverse, and the Q-form
//! `Q(X, Y) = |X|^(α+1) + α|Y|^(α+1) - (α+1) X φ(Y)`.
//!
//! `φ` is odd, strictly increasing and multiplicative (`φ(ab) = φ(a)φ(b)`).
//! The Q-form is nonnegative and vanishes exactly on the diagonal `X = Y`;
//! at `α = 1` it is `(X - Y)^2`.

use alloc::format;

use crate::error::{Error, Result};

/// Magnitudes below this are treated as exact zeros.
const UNDERFLOW: f64 = 1e-300;

/// The exponent `α > 0` of a half-linear equation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SignedPowerParam(f64);

impl SignedPowerParam {
    pub const LINEAR: SignedPowerParam = SignedPowerParam(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(SignedPowerParam(alpha))
        } else {
            Err(Error::InvalidParameter(format!("alpha must be a finite positive number, got {alpha}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_linear(self) -> bool {
        self.0 == 1.0
    }

    /// `φ(s)`. Non-finite input propagates; see [`phi`] for the checked form.
    #[inline]
    pub fn phi(self, s: f64) -> f64 {
        signed_pow(s, self.0)
    }

    /// `φ⁻¹(s) = |s|^(1/α - 1) s`.
    #[inline]
    pub fn phi_inv(self, s: f64) -> f64 {
        if self.0 == 1.0 {
            s
        } else {
            signed_pow(s, 1.0 / self.0)
        }
    }

    /// `|s|^(α+1)`, which equals `s φ(s)`.
    #[inline]
    pub fn abs_pow_next(self, s: f64) -> f64 {
        abs_pow(s, self.0 + 1.0)
    }

    /// The Q-form `|X|^(α+1) + α|Y|^(α+1) - (α+1) X φ(Y)`, exactly 0 when `X == Y`.
    #[inline]
    pub fn q_form(self, x: f64, y: f64) -> f64 {
        if x == y {
            return 0.0;
        }
        let a = self.0;
        abs_pow(x, a + 1.0) + a * abs_pow(y, a + 1.0) - (a + 1.0) * x * self.phi(y)
    }
}

/// `sign(s) |s|^e`, exactly zero for `|s|` below the underflow threshold.
#[inline]
pub fn signed_pow(s: f64, e: f64) -> f64 {
    if e == 1.0 {
        return s;
    }
    let m = libm::fabs(s);
    if m < UNDERFLOW {
        return 0.0;
    }
    let r = libm::pow(m, e);
    if s < 0.0 {
        -r
    } else {
        r
    }
}

/// `|s|^e`, exactly zero for `|s|` below the underflow threshold when `e > 0`.
#[inline]
pub fn abs_pow(s: f64, e: f64) -> f64 {
    let m = libm::fabs(s);
    if e == 1.0 {
        return m;
    }
    if m < UNDERFLOW && e > 0.0 {
        return 0.0;
    }
    libm::pow(m, e)
}

fn finite(op: &'static str, s: f64) -> Result<f64> {
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::Domain { op, arg: s })
    }
}

pub fn phi(alpha: SignedPowerParam, s: f64) -> Result<f64> {
    Ok(alpha.phi(finite("phi", s)?))
}

pub fn phi_inv(alpha: SignedPowerParam, s: f64) -> Result<f64> {
    Ok(alpha.phi_inv(finite("phi_inv", s)?))
}

pub fn q_form(alpha: SignedPowerParam, x: f64, y: f64) -> Result<f64> {
    Ok(alpha.q_form(finite("q_form", x)?, finite("q_form", y)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn al(a: f64) -> SignedPowerParam {
        SignedPowerParam::new(a).unwrap()
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        assert!(SignedPowerParam::new(0.0).is_err());
        assert!(SignedPowerParam::new(-1.0).is_err());
        assert!(SignedPowerParam::new(f64::NAN).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(al(1.0), -2.5).unwrap(), -2.5);
        assert_eq!(phi(al(2.0), -3.0).unwrap(), -9.0);
        assert_eq!(phi(al(0.5), 4.0).unwrap(), 2.0);
        for a in [0.3, 1.0, 2.0, 4.5] {
            assert_eq!(phi(al(a), 0.0).unwrap(), 0.0);
            assert_eq!(phi_inv(al(a), 0.0).unwrap(), 0.0);
        }
        assert!(phi(al(2.0), f64::INFINITY).is_err());
        assert!(phi_inv(al(2.0), f64::NAN).is_err());
    }

    #[test]
    fn phi_inv_examples() {
        assert_eq!(phi_inv(al(2.0), -9.0).unwrap(), -3.0);
        assert_eq!(phi_inv(al(1.0), 7.0).unwrap(), 7.0);
    }

    #[test]
    fn q_form_examples() {
        assert_eq!(q_form(al(1.0), 3.0, 1.0).unwrap(), 4.0);
        assert_eq!(q_form(al(2.0), 1.0, -1.0).unwrap(), 6.0);
        for a in [0.5, 1.0, 2.0, 3.7] {
            assert_eq!(q_form(al(a), 1.3, 1.3).unwrap(), 0.0);
        }
    }

    proptest! {
        #[test]
        fn phi_is_odd(a in 0.2f64..5.0, s in -1e3f64..1e3) {
            prop_assert_eq!(al(a).phi(-s), -al(a).phi(s));
        }

        #[test]
        fn phi_is_increasing(a in 0.2f64..5.0, s in -1e3f64..1e3, d in 1e-6f64..10.0) {
            prop_assert!(al(a).phi(s) < al(a).phi(s + d));
        }

        #[test]
        fn phi_round_trip(a in 0.2f64..5.0, s in -1e3f64..1e3) {
            let p = al(a);
            let back = p.phi_inv(p.phi(s));
            prop_assert!((back - s).abs() <= 8.0 * f64::EPSILON * s.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn q_form_linear_closed_form(x in -100f64..100.0, y in -100f64..100.0) {
            let q = al(1.0).q_form(x, y);
            prop_assert!((q - (x - y) * (x - y)).abs() <= 1e-12 * (1.0 + x * x + y * y));
        }
    }

    #[test]
    fn q_form_nonnegative_and_sharp() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51c0);
        for _ in 0..100_000 {
            let a: f64 = rng.random_range(0.2..5.0);
            let x: f64 = rng.random_range(-10.0..10.0);
            let y: f64 = rng.random_range(-10.0..10.0);
            let q = al(a).q_form(x, y);
            assert!(q >= -1e-12 * libm::pow(1.0 + x.abs() + y.abs(), a + 1.0));
            if q <= 1e-10 {
                assert!((x - y).abs() <= 1e-4, "q={q} x={x} y={y} alpha={a}");
            }
        }
    }
}
