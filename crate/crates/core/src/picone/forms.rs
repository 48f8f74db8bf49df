//! Pointwise bracket `F` and right-hand side `R` of each identity.

use alloc::vec::Vec;

use super::{BracketPower, ConditionPower, InnerBracket};
use crate::sgnpow::SignedPowerParam;

/// Second-order data at one point: the function, its quasi-derivative,
/// the operator value and the coefficients of its own equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub u: f64,
    pub du: f64,
    /// `p φ(u')`.
    pub flux: f64,
    /// `l[u]`; zero for solutions.
    pub op: f64,
    pub p: f64,
    pub q: f64,
}

/// Fourth-order data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point4 {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    /// `a φ(u'')`.
    pub moment: f64,
    /// `(a φ(u''))'`.
    pub shear: f64,
    /// `b φ(u')`.
    pub bterm: f64,
    pub op: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue {
    pub f: f64,
    pub r: f64,
}

fn apow(al: SignedPowerParam, s: f64) -> f64 {
    al.abs_pow_next(s)
}

pub fn p13(u: &Point2, v: &Point2) -> FormValue {
    let f = (u.u / v.u) * (v.u * u.flux - u.u * v.flux);
    let y = u.du - (u.u / v.u) * v.du;
    let r = (u.p - v.p) * u.du * u.du + (v.q - u.q) * u.u * u.u + v.p * y * y;
    FormValue { f, r }
}

pub fn p16(al: SignedPowerParam, power: BracketPower, u: &Point2, v: &Point2) -> FormValue {
    let a = al.get();
    let (pu, pv) = (al.phi(u.u), al.phi(v.u));
    let f = (u.u / pv) * (pv * u.flux - pu * v.flux);
    let y = u.u * v.du / v.u;
    let q = match power {
        BracketPower::Corrected => al.q_form(u.du, y),
        BracketPower::AsPrinted => apow(al, u.u) + a * apow(al, y) - (a + 1.0) * u.du * al.phi(y),
    };
    let r = (u.p - v.p) * apow(al, u.du) + (v.q - u.q) * apow(al, u.u) + v.p * q + (u.u / pv) * (pv * u.op - pu * v.op);
    FormValue { f, r }
}

/// `W = u φ(u) / φ(v)` and its closed-form derivative.
pub fn p23_inner(al: SignedPowerParam, u: f64, du: f64, v: f64, dv: f64) -> (f64, f64) {
    let a = al.get();
    let pv = al.phi(v);
    let uu = apow(al, u);
    let w = uu / pv;
    let dw = (a + 1.0) * al.phi(u) * du / pv - a * uu * crate::sgnpow::abs_pow(v, a - 1.0) * dv / (pv * pv);
    (w, dw)
}

pub fn p23(al: SignedPowerParam, u: &Point4, v: &Point4) -> FormValue {
    let a = al.get();
    let (pu, pv) = (al.phi(u.u), al.phi(v.u));
    let (w, dw) = p23_inner(al, u.u, u.du, v.u, v.du);
    let f =
        (u.u * u.shear - u.moment * u.du) + (v.moment * dw - w * v.shear) - (u.u / pv) * (pv * u.bterm - pu * v.bterm);
    let cross = (u.du * v.u - u.u * v.du) / v.u;
    let r = (u.u / pv) * (pv * u.op - pu * v.op)
        + v.a * a * (a + 1.0) * crate::sgnpow::abs_pow(u.u, a - 1.0) * al.phi(v.d2u / v.u) * cross * cross
        - v.a * al.q_form(u.d2u, u.u * v.d2u / v.u)
        - v.b * al.q_form(u.du, u.u * v.du / v.u)
        + (v.a - u.a) * apow(al, u.d2u)
        + (v.b - u.b) * apow(al, u.du)
        + (v.c - u.c) * apow(al, u.u);
    FormValue { f, r }
}

pub fn p24(
    al: SignedPowerParam,
    power: BracketPower,
    condition: ConditionPower,
    inner: InnerBracket,
    u: &Point4,
    v: &Point4,
) -> FormValue {
    let (pu, pv) = (al.phi(u.u), al.phi(v.u));
    let (pdu, pdv) = (al.phi(u.du), al.phi(v.du));
    let second = match inner {
        InnerBracket::Undifferentiated => pdv * u.moment - pdu * v.moment,
        InnerBracket::AsPrinted => pdv * u.shear - pdu * v.shear,
    };
    let f =
        (u.u / pv) * (pu * v.shear - pv * u.shear) + (u.du / pdv) * second + (u.u / pv) * (pv * u.bterm - pu * v.bterm);
    let lead = match power {
        BracketPower::Corrected => apow(al, u.d2u),
        BracketPower::AsPrinted => apow(al, u.du),
    };
    let cond = match condition {
        ConditionPower::VPrime => apow(al, v.du),
        ConditionPower::AsPrintedV => apow(al, v.u),
    };
    let r = (u.a - v.a) * lead
        + (u.b - v.b) * apow(al, u.du)
        + (u.c - v.c) * apow(al, u.u)
        + v.a * al.q_form(u.d2u, u.du * v.d2u / v.du)
        + (v.b * cond - v.du * v.shear) * al.q_form(u.du / v.du, u.u / v.u)
        + (u.u / pv) * (pu * v.op - pv * u.op);
    FormValue { f, r }
}

/// Weights `(-1)^(N-k-1) C(N-1, k)`, `k = 0..N`.
pub fn binomial_weights(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut c: u128 = 1;
    for k in 0..n {
        let sign = if (n - k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        out.push(sign * c as f64);
        // C(n-1, k+1) = C(n-1, k) (n-1-k) / (k+1)
        c = c * (n - 1 - k) as u128 / (k as u128 + 1);
    }
    out
}

/// The N-equation identity with distinguished member `m` (zero-based).
pub fn p26(al: SignedPowerParam, weights: &[f64], m: usize, pts: &[Point2]) -> FormValue {
    let um = &pts[m];
    let mut sum_flux = 0.0;
    let mut sum_p = 0.0;
    let mut sum_q = 0.0;
    let mut sum_qf = 0.0;
    for (k, (w, pt)) in weights.iter().zip(pts).enumerate() {
        sum_flux += w * pt.flux / al.phi(pt.u);
        sum_p += w * pt.p;
        sum_q += w * pt.q;
        let y = if k == m { um.du } else { um.u * pt.du / pt.u };
        sum_qf += w * pt.p * al.q_form(um.du, y);
    }
    let f = apow(al, um.u) * sum_flux;
    let r = sum_p * apow(al, um.du) - sum_q * apow(al, um.u) - sum_qf;
    FormValue { f, r }
}
