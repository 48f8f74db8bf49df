//! Quasi-derivative first-order forms of the half-linear equations.
//!
//! Second order, `[p φ(u')]' + q φ(u) = 0`, uses the state
//! `(u, p φ(u'))`:
//!
//! ```text
//! y1' = φ⁻¹(y2 / p)        y2' = -q φ(y1)
//! ```
//!
//! Fourth order, `[a φ(u'')]'' - [b φ(u')]' + c φ(u) = 0`, uses
//! `(u, u', a φ(u''), [a φ(u'')]' - b φ(u'))`:
//!
//! ```text
//! y1' = y2    y2' = φ⁻¹(y3 / a)    y3' = y4 + b φ(y2)    y4' = -c φ(y1)
//! ```
//!
//! With the second-derivative reading of the middle term, `y4` is
//! `[a φ(u'')]' - [b φ(u')]'` and `y3' = y4 + b' φ(y2) + b α |y2|^(α-1) u''`.
//!
//! No coefficient is ever differentiated numerically: the bracket
//! quantities the identities need are components of the state.

mod dopri;
mod trajectory;

use alloc::format;

pub use dopri::{integrate, StepStats, Tolerance};
pub use trajectory::Trajectory;

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::sgnpow::{abs_pow, SignedPowerParam};

pub type QuasiState2 = [f64; 2];
pub type QuasiState4 = [f64; 4];

pub type SecondOrderTrajectory = Trajectory<SecondOrderProblem, 2>;
pub type FourthOrderTrajectory = Trajectory<FourthOrderProblem, 4>;

/// Number of points used to check that a leading coefficient does not vanish.
const COEFF_CHECK_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Interval> {
        if start.is_finite() && end.is_finite() && start < end {
            Ok(Interval { start, end })
        } else {
            Err(Error::InvalidParameter(format!("interval [{start}, {end}] must satisfy x0 < x1")))
        }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    /// The `i`-th of `n` uniformly spaced points, endpoints included.
    pub fn grid_point(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.end
        } else {
            self.start + self.len() * (i as f64) / ((n - 1) as f64)
        }
    }

    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        (0..n).map(move |i| self.grid_point(i, n))
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.len();
        x >= self.start - slack && x <= self.end + slack
    }
}

/// How the middle term `[b φ(u')]` of the fourth-order operator is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MiddleTerm {
    /// `[b φ(u')]'`.
    #[default]
    FirstDerivative,
    /// `[b φ(u')]''`.
    AsPrintedSecondDerivative,
}

/// A first-order system integrated by [`integrate`].
pub trait QuasiSystem<const N: usize> {
    fn interval(&self) -> Interval;
    fn rhs(&self, x: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

fn check_nonvanishing(name: &str, coeff: &CoeffExpr, interval: Interval) -> Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    for x in interval.grid(COEFF_CHECK_POINTS) {
        let v = coeff.eval(x)?;
        if v == 0.0 {
            return Err(Error::SingularCoefficient { x });
        }
        if let Some((px, pv)) = prev {
            if (pv < 0.0) != (v < 0.0) {
                return Err(Error::InvalidParameter(format!("leading coefficient {name} changes sign in [{px}, {x}]")));
            }
        }
        prev = Some((x, v));
    }
    Ok(())
}

fn leading(coeff: &CoeffExpr, x: f64) -> Result<f64> {
    let v = coeff.eval(x)?;
    if v == 0.0 {
        Err(Error::SingularCoefficient { x })
    } else {
        Ok(v)
    }
}

/// `[p φ(u')]' + q φ(u) = 0` on an interval.
#[derive(Debug, Clone)]
pub struct SecondOrderProblem {
    pub p: CoeffExpr,
    pub q: CoeffExpr,
    pub alpha: SignedPowerParam,
    pub interval: Interval,
}

/// Quantities recovered from a second-order quasi-state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderFields {
    pub u: f64,
    pub du: f64,
    /// `p φ(u')`.
    pub flux: f64,
}

impl SecondOrderProblem {
    pub fn new(p: CoeffExpr, q: CoeffExpr, alpha: SignedPowerParam, interval: Interval) -> Result<Self> {
        check_nonvanishing("p", &p, interval)?;
        q.eval(interval.start)?;
        Ok(SecondOrderProblem { p, q, alpha, interval })
    }

    /// Same problem with `q` replaced, skipping the leading-coefficient check.
    pub(crate) fn with_q_unchecked(&self, q: CoeffExpr) -> Self {
        SecondOrderProblem { q, ..self.clone() }
    }

    pub fn with_q(&self, q: CoeffExpr) -> Result<Self> {
        SecondOrderProblem::new(self.p.clone(), q, self.alpha, self.interval)
    }

    pub fn fields(&self, x: f64, y: &QuasiState2) -> Result<SecondOrderFields> {
        let p = leading(&self.p, x)?;
        Ok(SecondOrderFields { u: y[0], du: self.alpha.phi_inv(y[1] / p), flux: y[1] })
    }

    /// The quasi-state of a solution with value `u` and slope `du` at `x`.
    pub fn state_from(&self, x: f64, u: f64, du: f64) -> Result<QuasiState2> {
        Ok([u, self.p.eval(x)? * self.alpha.phi(du)])
    }

    /// `(c y1, φ(c) y2)`: the state of `c u` when `y` is the state of `u`.
    pub fn scale_state(&self, y: &QuasiState2, c: f64) -> QuasiState2 {
        [c * y[0], self.alpha.phi(c) * y[1]]
    }
}

impl QuasiSystem<2> for SecondOrderProblem {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn rhs(&self, x: f64, y: &QuasiState2) -> Result<QuasiState2> {
        let p = leading(&self.p, x)?;
        let q = self.q.eval(x)?;
        Ok([self.alpha.phi_inv(y[1] / p), -q * self.alpha.phi(y[0])])
    }
}

pub fn rhs2(problem: &SecondOrderProblem, x: f64, s: &QuasiState2) -> Result<QuasiState2> {
    problem.rhs(x, s)
}

/// `[a φ(u'')]'' - [b φ(u')]^(k) + c φ(u) = 0` on an interval.
#[derive(Debug, Clone)]
pub struct FourthOrderProblem {
    pub a: CoeffExpr,
    pub b: CoeffExpr,
    pub c: CoeffExpr,
    pub alpha: SignedPowerParam,
    pub interval: Interval,
    pub middle: MiddleTerm,
    db: CoeffExpr,
}

/// Quantities recovered from a fourth-order quasi-state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthOrderFields {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    /// `a φ(u'')`.
    pub moment: f64,
    /// `(a φ(u''))'`.
    pub shear: f64,
    /// `b φ(u')`.
    pub bterm: f64,
}

impl FourthOrderProblem {
    pub fn new(
        a: CoeffExpr,
        b: CoeffExpr,
        c: CoeffExpr,
        alpha: SignedPowerParam,
        interval: Interval,
        middle: MiddleTerm,
    ) -> Result<Self> {
        check_nonvanishing("a", &a, interval)?;
        b.eval(interval.start)?;
        c.eval(interval.start)?;
        let db = b.derive();
        Ok(FourthOrderProblem { a, b, c, alpha, interval, middle, db })
    }

    pub fn with_c(&self, c: CoeffExpr) -> Result<Self> {
        FourthOrderProblem::new(self.a.clone(), self.b.clone(), c, self.alpha, self.interval, self.middle)
    }

    /// Same problem with `c` replaced, skipping the leading-coefficient check.
    pub(crate) fn with_c_unchecked(&self, c: CoeffExpr) -> Self {
        FourthOrderProblem { c, ..self.clone() }
    }

    pub fn with_middle(&self, middle: MiddleTerm) -> Self {
        FourthOrderProblem { middle, ..self.clone() }
    }

    /// `(d/dx)[b φ(u')]` given `u'`, `u''`.
    fn dbterm(&self, x: f64, du: f64, d2u: f64) -> Result<f64> {
        let al = self.alpha.get();
        let b = self.b.eval(x)?;
        let db = self.db.eval(x)?;
        Ok(db * self.alpha.phi(du) + b * al * abs_pow(du, al - 1.0) * d2u)
    }

    pub fn fields(&self, x: f64, y: &QuasiState4) -> Result<FourthOrderFields> {
        let a = leading(&self.a, x)?;
        let d2u = self.alpha.phi_inv(y[2] / a);
        let bterm = self.b.eval(x)? * self.alpha.phi(y[1]);
        let shear = match self.middle {
            MiddleTerm::FirstDerivative => y[3] + bterm,
            MiddleTerm::AsPrintedSecondDerivative => y[3] + self.dbterm(x, y[1], d2u)?,
        };
        Ok(FourthOrderFields { u: y[0], du: y[1], d2u, moment: y[2], shear, bterm })
    }

    /// The quasi-state of a solution with the given `u, u', u'', (a φ(u''))'` at `x`.
    pub fn state_from(&self, x: f64, u: f64, du: f64, d2u: f64, shear: f64) -> Result<QuasiState4> {
        let moment = self.a.eval(x)? * self.alpha.phi(d2u);
        let y4 = match self.middle {
            MiddleTerm::FirstDerivative => shear - self.b.eval(x)? * self.alpha.phi(du),
            MiddleTerm::AsPrintedSecondDerivative => shear - self.dbterm(x, du, d2u)?,
        };
        Ok([u, du, moment, y4])
    }

    /// `(c y1, c y2, φ(c) y3, φ(c) y4)`: the state of `c u`.
    pub fn scale_state(&self, y: &QuasiState4, c: f64) -> QuasiState4 {
        let pc = self.alpha.phi(c);
        [c * y[0], c * y[1], pc * y[2], pc * y[3]]
    }
}

impl QuasiSystem<4> for FourthOrderProblem {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn rhs(&self, x: f64, y: &QuasiState4) -> Result<QuasiState4> {
        let a = leading(&self.a, x)?;
        let d2u = self.alpha.phi_inv(y[2] / a);
        let c = self.c.eval(x)?;
        let dy3 = match self.middle {
            MiddleTerm::FirstDerivative => y[3] + self.b.eval(x)? * self.alpha.phi(y[1]),
            MiddleTerm::AsPrintedSecondDerivative => y[3] + self.dbterm(x, y[1], d2u)?,
        };
        Ok([y[1], d2u, dy3, -c * self.alpha.phi(y[0])])
    }
}

pub fn rhs4(problem: &FourthOrderProblem, x: f64, s: &QuasiState4) -> Result<QuasiState4> {
    problem.rhs(x, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    fn al(a: f64) -> SignedPowerParam {
        SignedPowerParam::new(a).unwrap()
    }

    fn unit() -> Interval {
        Interval::new(-5.0, 5.0).unwrap()
    }

    #[test]
    fn rhs2_examples() {
        let pr = SecondOrderProblem::new(e("1"), e("1"), al(1.0), unit()).unwrap();
        assert_eq!(rhs2(&pr, 0.3, &[0.0, 1.0]).unwrap(), [1.0, 0.0]);
        let pr = SecondOrderProblem::new(e("1"), e("0"), al(1.7), unit()).unwrap();
        assert_eq!(rhs2(&pr, 0.3, &[2.0, -1.0]).unwrap()[1], 0.0);
        let pr = SecondOrderProblem::new(e("2"), e("1"), al(2.0), unit()).unwrap();
        assert_eq!(rhs2(&pr, 1.9, &[1.0, 2.0]).unwrap(), [1.0, -1.0]);
    }

    #[test]
    fn singular_leading_coefficient() {
        assert!(SecondOrderProblem::new(e("x"), e("1"), al(1.0), unit()).is_err());
        assert!(SecondOrderProblem::new(e("0"), e("1"), al(1.0), unit()).is_err());
        let pr = SecondOrderProblem::new(e("x - 10"), e("1"), al(1.0), unit()).unwrap();
        assert_eq!(rhs2(&pr, 10.0, &[1.0, 1.0]), Err(Error::SingularCoefficient { x: 10.0 }));
    }

    #[test]
    fn rhs4_examples() {
        let pr = FourthOrderProblem::new(e("1"), e("0"), e("0"), al(1.0), unit(), MiddleTerm::FirstDerivative).unwrap();
        let x: f64 = 1.3;
        let s = [x * x * x, 3.0 * x * x, 6.0 * x, 6.0];
        assert_eq!(rhs4(&pr, x, &s).unwrap(), [3.0 * x * x, 6.0 * x, 6.0, 0.0]);
        let pr =
            FourthOrderProblem::new(e("1"), e("0"), e("-1"), al(1.0), unit(), MiddleTerm::FirstDerivative).unwrap();
        assert_eq!(rhs4(&pr, 0.0, &[1.0; 4]).unwrap(), [1.0; 4]);
    }

    #[test]
    fn state_round_trip_through_fields() {
        for middle in [MiddleTerm::FirstDerivative, MiddleTerm::AsPrintedSecondDerivative] {
            let pr = FourthOrderProblem::new(e("6 + x"), e("cos(x)"), e("1"), al(1.5), unit(), middle).unwrap();
            let y = pr.state_from(0.4, 0.3, -1.2, 0.7, 2.5).unwrap();
            let f = pr.fields(0.4, &y).unwrap();
            assert!((f.u - 0.3).abs() < 1e-15);
            assert!((f.du + 1.2).abs() < 1e-15);
            assert!((f.d2u - 0.7).abs() < 1e-14);
            assert!((f.shear - 2.5).abs() < 1e-14);
        }
    }
}
