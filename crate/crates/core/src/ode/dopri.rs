//! Dormand–Prince 5(4) with step-size control, first-same-as-last stages
//! and the method's fourth-order continuous extension for dense output.

use alloc::format;
use alloc::vec::Vec;

use super::trajectory::Trajectory;
use super::QuasiSystem;
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus the embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous extension of order 4.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
/// Minimum step as a fraction of the span length.
const MIN_STEP_FRACTION: f64 = 1e-12;

/// Error tolerances and step limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 1e-12, max_step: None, max_steps: 2_000_000 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Tolerance {
        Tolerance { rel, abs, ..Tolerance::default() }
    }

    pub fn with_max_step(self, h: f64) -> Tolerance {
        Tolerance { max_step: Some(h), ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub min_step: f64,
    pub max_step: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (w, k) in terms {
            s += w * k[i];
        }
        *o += h * s;
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerance) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.abs + tol.rel * libm::fmax(libm::fabs(y0[i]), libm::fabs(y1[i]));
        let r = err[i] / sc;
        acc += r * r;
    }
    libm::sqrt(acc / N as f64)
}

fn initial_step<S: QuasiSystem<N>, const N: usize>(
    system: &S,
    x: f64,
    y: &[f64; N],
    f: &[f64; N],
    tol: &Tolerance,
    h_cap: f64,
) -> Result<f64> {
    let zero = [0.0; N];
    let d0 = error_norm(y, &zero, &zero, tol);
    let d1 = error_norm(f, &zero, &zero, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = libm::fmin(h0, h_cap);
    let y1 = axpy(y, h0, &[(1.0, f)]);
    let f1 = system.rhs(x + h0, &y1)?;
    let mut df = [0.0; N];
    for i in 0..N {
        df[i] = f1[i] - f[i];
    }
    let d2 = error_norm(&df, &zero, &zero, tol) / h0;
    let dm = libm::fmax(d1, d2);
    let h1 = if dm <= 1e-15 { libm::fmax(1e-6, h0 * 1e-3) } else { libm::pow(0.01 / dm, 0.2) };
    let h = libm::fmin(100.0 * h0, h1);
    Ok(if h.is_finite() && h > 0.0 { libm::fmin(h, h_cap) } else { h0 })
}

/// Integrates `system` from `initial` at `span.0` to `span.1` (forward only).
///
/// Steps are accepted when the mixed absolute/relative RMS error estimate
/// is at most one. A step below `1e-12 · (span.1 - span.0)` is an error.
pub fn integrate<S, const N: usize>(
    system: &S,
    initial: [f64; N],
    span: (f64, f64),
    tol: &Tolerance,
) -> Result<Trajectory<S, N>>
where
    S: QuasiSystem<N> + Clone,
{
    let (xa, xb) = span;
    let domain = system.interval();
    if !(xa < xb) || !domain.contains(xa) || !domain.contains(xb) {
        return Err(Error::Precondition(format!(
            "span [{xa}, {xb}] must be increasing and inside [{}, {}]",
            domain.start, domain.end
        )));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition(format!("initial state {initial:?} is not finite")));
    }
    if !(tol.rel >= 0.0 && tol.abs >= 0.0 && tol.rel + tol.abs > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerances rel={} abs={}", tol.rel, tol.abs)));
    }

    let len = xb - xa;
    let h_min = MIN_STEP_FRACTION * len;
    let h_cap = tol.max_step.map_or(len, |m| libm::fmin(m, len));

    let mut stats = StepStats { min_step: f64::INFINITY, ..StepStats::default() };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dys = Vec::new();
    let mut conts = Vec::new();

    let mut x = xa;
    let mut y = initial;
    let mut k1 = system.rhs(x, &y)?;
    stats.evaluations += 1;
    xs.push(x);
    ys.push(y);
    dys.push(k1);

    let mut h = initial_step(system, x, &y, &k1, tol, h_cap)?;
    stats.evaluations += 1;
    let mut last_rejected = false;

    while x < xb {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::TooManySteps { x, steps: tol.max_steps });
        }
        h = libm::fmin(h, h_cap);
        let last = x + 1.01 * h >= xb;
        if last {
            h = xb - x;
        }

        let k2 = system.rhs(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = system.rhs(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = system.rhs(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = system.rhs(x + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = system.rhs(x + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let x_new = if last { xb } else { x + h };
        let k7 = system.rhs(x_new, &y_new)?;
        stats.evaluations += 6;

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, tol);
        let finite = en.is_finite() && y_new.iter().all(|v| v.is_finite());

        if finite && en <= 1.0 {
            stats.accepted += 1;
            stats.min_step = libm::fmin(stats.min_step, h);
            stats.max_step = libm::fmax(stats.max_step, h);
            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = bspl;
                cont[3][i] = dy - h * k7[i] - bspl;
                cont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            conts.push(cont);
            x = x_new;
            y = y_new;
            k1 = k7;
            xs.push(x);
            ys.push(y);
            dys.push(k1);
            let mut fac = if en == 0.0 { FAC_MAX } else { SAFETY * libm::pow(en, -0.2) };
            fac = libm::fmin(FAC_MAX, libm::fmax(FAC_MIN, fac));
            if last_rejected {
                fac = libm::fmin(fac, 1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if finite { libm::fmax(FAC_MIN, SAFETY * libm::pow(en, -0.2)) } else { FAC_MIN };
            h *= libm::fmin(fac, 0.9);
            last_rejected = true;
            if h < h_min {
                return Err(Error::StepUnderflow { x, h });
            }
        }
    }

    if stats.accepted == 0 {
        stats.min_step = 0.0;
    }
    Ok(Trajectory::from_parts(system.clone(), xs, ys, dys, conts, stats))
}
