//! Exact operator application for expression-defined functions:
//! `l[u] = [p φ(u')]' + q φ(u)` and
//! `l[u] = [a φ(u'')]'' - [b φ(u')]^(k) + c φ(u)` with `k` = 1 or 2.

use super::CoeffExpr;
use crate::error::Result;
use crate::ode::MiddleTerm;
use crate::sgnpow::SignedPowerParam;

/// Derivatives and quasi-derivatives of an expression `u` for a
/// second-order problem, built once and evaluated pointwise.
#[derive(Debug, Clone)]
pub struct SecondOrderExprFields {
    alpha: SignedPowerParam,
    q: CoeffExpr,
    u: CoeffExpr,
    du: CoeffExpr,
    flux: CoeffExpr,
    dflux: CoeffExpr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderPoint {
    pub u: f64,
    pub du: f64,
    /// `p φ(u')`.
    pub flux: f64,
    /// `l[u]`.
    pub op: f64,
    pub kink_hits: usize,
}

impl SecondOrderExprFields {
    pub fn new(p: &CoeffExpr, q: &CoeffExpr, alpha: SignedPowerParam, u: &CoeffExpr) -> Self {
        let du = u.derive();
        let flux = p.mul(&du.sgnpow(alpha.get()));
        let dflux = flux.derive();
        SecondOrderExprFields { alpha, q: q.clone(), u: u.clone(), du, flux, dflux }
    }

    pub fn at(&self, x: f64) -> Result<SecondOrderPoint> {
        let u = self.u.eval_flagged(x)?;
        let du = self.du.eval_flagged(x)?;
        let flux = self.flux.eval_flagged(x)?;
        let dflux = self.dflux.eval_flagged(x)?;
        let q = self.q.eval(x)?;
        Ok(SecondOrderPoint {
            u: u.value,
            du: du.value,
            flux: flux.value,
            op: dflux.value + q * self.alpha.phi(u.value),
            kink_hits: u.kink_hits + du.kink_hits + flux.kink_hits + dflux.kink_hits,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FourthOrderExprFields {
    alpha: SignedPowerParam,
    c: CoeffExpr,
    middle: MiddleTerm,
    u: CoeffExpr,
    du: CoeffExpr,
    d2u: CoeffExpr,
    moment: CoeffExpr,
    shear: CoeffExpr,
    dshear: CoeffExpr,
    bterm: CoeffExpr,
    dbterm: CoeffExpr,
    d2bterm: CoeffExpr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthOrderPoint {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    /// `a φ(u'')`.
    pub moment: f64,
    /// `(a φ(u''))'`.
    pub shear: f64,
    /// `b φ(u')`.
    pub bterm: f64,
    /// `l[u]` under the selected middle-term reading.
    pub op: f64,
    pub kink_hits: usize,
}

impl FourthOrderExprFields {
    pub fn new(
        a: &CoeffExpr,
        b: &CoeffExpr,
        c: &CoeffExpr,
        alpha: SignedPowerParam,
        middle: MiddleTerm,
        u: &CoeffExpr,
    ) -> Self {
        let du = u.derive();
        let d2u = du.derive();
        let moment = a.mul(&d2u.sgnpow(alpha.get()));
        let shear = moment.derive();
        let dshear = shear.derive();
        let bterm = b.mul(&du.sgnpow(alpha.get()));
        let dbterm = bterm.derive();
        let d2bterm = match middle {
            MiddleTerm::FirstDerivative => CoeffExpr::constant(0.0),
            MiddleTerm::AsPrintedSecondDerivative => dbterm.derive(),
        };
        FourthOrderExprFields {
            alpha,
            c: c.clone(),
            middle,
            u: u.clone(),
            du,
            d2u,
            moment,
            shear,
            dshear,
            bterm,
            dbterm,
            d2bterm,
        }
    }

    pub fn at(&self, x: f64) -> Result<FourthOrderPoint> {
        let mut hits = 0;
        let mut ev = |e: &CoeffExpr| -> Result<f64> {
            let r = e.eval_flagged(x)?;
            hits += r.kink_hits;
            Ok(r.value)
        };
        let u = ev(&self.u)?;
        let du = ev(&self.du)?;
        let d2u = ev(&self.d2u)?;
        let moment = ev(&self.moment)?;
        let shear = ev(&self.shear)?;
        let dshear = ev(&self.dshear)?;
        let bterm = ev(&self.bterm)?;
        let middle = match self.middle {
            MiddleTerm::FirstDerivative => ev(&self.dbterm)?,
            MiddleTerm::AsPrintedSecondDerivative => ev(&self.d2bterm)?,
        };
        let c = self.c.eval(x)?;
        Ok(FourthOrderPoint {
            u,
            du,
            d2u,
            moment,
            shear,
            bterm,
            op: dshear - middle + c * self.alpha.phi(u),
            kink_hits: hits,
        })
    }
}

/// `[p φ(u')]'(x) + q(x) φ(u(x))`.
pub fn apply_operator_2nd(p: &CoeffExpr, q: &CoeffExpr, alpha: SignedPowerParam, u: &CoeffExpr, x: f64) -> Result<f64> {
    SecondOrderExprFields::new(p, q, alpha, u).at(x).map(|pt| pt.op)
}

/// `[a φ(u'')]''(x) - [b φ(u')]^(k)(x) + c(x) φ(u(x))`, `k` chosen by `middle`.
pub fn apply_operator_4th(
    a: &CoeffExpr,
    b: &CoeffExpr,
    c: &CoeffExpr,
    alpha: SignedPowerParam,
    middle: MiddleTerm,
    u: &CoeffExpr,
    x: f64,
) -> Result<f64> {
    FourthOrderExprFields::new(a, b, c, alpha, middle, u).at(x).map(|pt| pt.op)
}
