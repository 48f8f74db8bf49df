//! Smallest eigenvalues by shooting: Dirichlet for the second-order equation,
//! clamped for the fourth-order one.

use alloc::format;

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::ode::{
    integrate, FourthOrderProblem, FourthOrderTrajectory, Interval, MiddleTerm, SecondOrderProblem,
    SecondOrderTrajectory, Tolerance,
};
use crate::sgnpow::SignedPowerParam;

const COEFF_GRID: usize = 1001;
const MAX_DOUBLINGS: usize = 80;
const MAX_SCAN: usize = 400;
const MAX_NEWTON: usize = 100;
const THETA_SAMPLES: usize = 17;

/// Dirichlet eigenpair of `[p φ(u')]' + (q0 + λ) φ(u) = 0`.
#[derive(Debug, Clone)]
pub struct DirichletEigen {
    pub lambda: f64,
    pub trajectory: SecondOrderTrajectory,
    /// `|u(x1)| / max|u|`.
    pub boundary_residual: f64,
}

/// Clamped eigenpair of `[a φ(u'')]'' - [b φ(u')]' + (c0 - λ) φ(u) = 0`.
#[derive(Debug, Clone)]
pub struct ClampedEigen {
    pub lambda: f64,
    /// Angle of the initial `(y3, y4)` on the unit circle.
    pub theta: f64,
    pub trajectory: FourthOrderTrajectory,
    /// `u(x0), u'(x0), u(x1), u'(x1)`, each divided by `max|u|`.
    pub boundary_residuals: [f64; 4],
    pub newton_iterations: usize,
}

fn grid_extrema(f: &CoeffExpr, interval: &Interval) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in interval.grid(COEFF_GRID) {
        let v = f.eval(x)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

struct Dirichlet<'a> {
    base: SecondOrderProblem,
    q0: &'a CoeffExpr,
    tol: &'a Tolerance,
}

impl Dirichlet<'_> {
    fn solve(&self, lambda: f64) -> Result<SecondOrderTrajectory> {
        let problem = self.base.with_q_unchecked(self.q0.add_constant(lambda));
        let iv = problem.interval;
        integrate(&problem, [0.0, 1.0], (iv.start, iv.end), self.tol)
    }

    /// Whether `u` reaches zero again before the right end.
    fn crosses(&self, lambda: f64) -> Result<bool> {
        let traj = self.solve(lambda)?;
        Ok(traj.states().iter().skip(1).any(|s| s[0] <= 0.0))
    }
}

/// Smallest Dirichlet eigenvalue, bracketed from below by `-max q0` and from
/// above by doubling, then bisected on whether `u` returns to zero.
pub fn eigen_shoot_2nd(
    p: &CoeffExpr,
    q0: &CoeffExpr,
    alpha: SignedPowerParam,
    interval: Interval,
    tol: &Tolerance,
) -> Result<DirichletEigen> {
    for x in interval.grid(COEFF_GRID) {
        if p.eval(x)? <= 0.0 {
            return Err(Error::Precondition(format!("p must be positive, p({x}) <= 0")));
        }
    }
    let base = SecondOrderProblem::new(p.clone(), q0.clone(), alpha, interval)?;
    let shoot = Dirichlet { base, q0, tol };
    let (_, qmax) = grid_extrema(q0, &interval)?;
    let mut lo = -qmax;
    if shoot.crosses(lo)? {
        return Err(Error::NotFound(format!("u already vanishes inside the interval at lambda = {lo}")));
    }
    let mut step = 1.0;
    let mut hi = lo + step;
    let mut found = false;
    for _ in 0..MAX_DOUBLINGS {
        if shoot.crosses(hi)? {
            found = true;
            break;
        }
        lo = hi;
        step *= 2.0;
        hi = lo + step;
    }
    if !found {
        return Err(Error::NotFound(format!("no sign change of u(x1) for lambda in [{}, {hi}]", -qmax)));
    }
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot.crosses(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let residual_of = |t: &SecondOrderTrajectory| t.final_state()[0].abs() / t.max_abs(0);
    let (t_lo, t_hi) = (shoot.solve(lo)?, shoot.solve(hi)?);
    let (lambda, trajectory) = if residual_of(&t_lo) <= residual_of(&t_hi) { (lo, t_lo) } else { (hi, t_hi) };
    let boundary_residual = residual_of(&trajectory);
    if !(boundary_residual <= 1e-8) {
        return Err(Error::NotFound(format!(
            "bisection stalled at lambda = {lambda} with |u(x1)|/max|u| = {boundary_residual:e}"
        )));
    }
    Ok(DirichletEigen { lambda, trajectory, boundary_residual })
}

struct Clamped<'a> {
    base: FourthOrderProblem,
    c0: &'a CoeffExpr,
    tol: &'a Tolerance,
}

struct EndPoint {
    u: f64,
    du: f64,
    scale: f64,
}

impl Clamped<'_> {
    fn solve(&self, lambda: f64, theta: f64) -> Result<FourthOrderTrajectory> {
        let problem = self.base.with_c_unchecked(self.c0.add_constant(-lambda));
        let iv = problem.interval;
        let init = [0.0, 0.0, libm::cos(theta), libm::sin(theta)];
        integrate(&problem, init, (iv.start, iv.end), self.tol)
    }

    fn end(&self, lambda: f64, theta: f64) -> Result<EndPoint> {
        let t = self.solve(lambda, theta)?;
        let y = t.final_state();
        Ok(EndPoint { u: y[0], du: y[1], scale: t.max_abs(0) })
    }

    fn g(&self, lambda: f64, theta: f64) -> Result<f64> {
        let e = self.end(lambda, theta)?;
        Ok(e.u / e.scale)
    }

    fn bisect_theta(&self, lambda: f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<(f64, f64)> {
        let orientation = if g_lo < 0.0 { 1.0 } else { -1.0 };
        while (hi - lo).abs() > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let gm = self.g(lambda, mid)?;
            if gm == 0.0 {
                return Ok((mid, orientation));
            }
            if (gm < 0.0) == (g_lo < 0.0) {
                lo = mid;
                g_lo = gm;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi), orientation))
    }

    /// A root of `θ -> u(x1)`; near `guess` when given, otherwise the first on
    /// a coarse scan of `[0, π]` (roots repeat with period π). Returns the
    /// root and the sign of the slope of `u(x1)` through it.
    fn theta_root(&self, lambda: f64, guess: Option<f64>) -> Result<(f64, f64)> {
        if let Some(t0) = guess {
            let g0 = self.g(lambda, t0)?;
            let mut w = 1e-3;
            let mut prev = (t0, g0);
            let mut prev_left = (t0, g0);
            while w <= core::f64::consts::FRAC_PI_2 {
                for (side, last) in [(t0 + w, &mut prev), (t0 - w, &mut prev_left)] {
                    let gs = self.g(lambda, side)?;
                    if (gs < 0.0) != (last.1 < 0.0) || gs == 0.0 {
                        let (a, ga, b) = if side > t0 { (last.0, last.1, side) } else { (side, gs, last.0) };
                        return self.bisect_theta(lambda, a, b, ga);
                    }
                    *last = (side, gs);
                }
                w *= 2.0;
            }
        }
        let step = core::f64::consts::PI / (THETA_SAMPLES - 1) as f64;
        let mut a = 0.0;
        let mut ga = self.g(lambda, a)?;
        for i in 1..THETA_SAMPLES {
            let b = i as f64 * step;
            let gb = self.g(lambda, b)?;
            if (ga < 0.0) != (gb < 0.0) || gb == 0.0 {
                return self.bisect_theta(lambda, a, b, ga);
            }
            a = b;
            ga = gb;
        }
        Err(Error::NotFound(format!("u(x1) has no root in theta at lambda = {lambda}")))
    }

    /// Scaled `u'(x1)` at the θ-root, oriented so that it varies continuously.
    fn h(&self, lambda: f64, guess: Option<f64>) -> Result<(f64, f64)> {
        let (theta, orientation) = self.theta_root(lambda, guess)?;
        let e = self.end(lambda, theta)?;
        Ok((orientation * e.du / e.scale, theta))
    }

    /// Scaled endpoint map and its norm.
    fn map(&self, lambda: f64, theta: f64, len: f64) -> Result<[f64; 2]> {
        let e = self.end(lambda, theta)?;
        Ok([e.u / e.scale, e.du * len / e.scale])
    }
}

fn norm(v: [f64; 2]) -> f64 {
    libm::hypot(v[0], v[1])
}

/// Smallest clamped eigenvalue. A geometric scan in λ brackets a sign change
/// of `u'(x1)` along the curve `u(x1) = 0`, bisection narrows it, and damped
/// Newton on `(u(x1), u'(x1))` over `(λ, θ)` polishes the pair. `c0`
/// defaults to zero.
pub fn eigen_shoot_4th_clamped(
    a: &CoeffExpr,
    b: &CoeffExpr,
    alpha: SignedPowerParam,
    interval: Interval,
    c0: Option<&CoeffExpr>,
    tol: &Tolerance,
) -> Result<ClampedEigen> {
    let zero = CoeffExpr::constant(0.0);
    let c0 = c0.unwrap_or(&zero);
    for x in interval.grid(COEFF_GRID) {
        if a.eval(x)? <= 0.0 {
            return Err(Error::Precondition(format!("a must be positive, a({x}) <= 0")));
        }
    }
    let base = FourthOrderProblem::new(a.clone(), b.clone(), c0.clone(), alpha, interval, MiddleTerm::FirstDerivative)?;
    let shoot = Clamped { base, c0, tol };
    let len = interval.len();
    let al = alpha.get();
    let (a_min, _) = grid_extrema(a, &interval)?;
    let (b_min, _) = grid_extrema(b, &interval)?;
    let (c_min, _) = grid_extrema(c0, &interval)?;
    let s = 1e-2 * a_min / libm::pow(len, 2.0 * al + 2.0);
    // below the bottom of the spectrum when b >= 0; a negative b lowers it by
    // at most roughly |b| times the first Dirichlet scale
    let mut start = c_min;
    if b_min < 0.0 {
        start -= -b_min * libm::pow(2.0 * core::f64::consts::PI / len, al + 1.0);
    }

    let mut prev_l = start;
    let (mut prev_h, mut prev_theta) = shoot.h(prev_l, None)?;
    let mut bracket = None;
    let mut k = 0;
    while k < MAX_SCAN {
        let l = start + s * libm::pow(1.25, k as f64);
        let (hl, th) = shoot.h(l, Some(prev_theta))?;
        if (hl < 0.0) != (prev_h < 0.0) {
            // bisect the bracket, then make sure it is a root and not a jump
            let (mut lo, mut hi, mut h_lo, mut t_lo) = (prev_l, l, prev_h, prev_theta);
            for _ in 0..200 {
                if hi - lo <= 1e-12 * hi.abs().max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let (hm, tm) = shoot.h(mid, Some(t_lo))?;
                if (hm < 0.0) == (h_lo < 0.0) {
                    lo = mid;
                    h_lo = hm;
                    t_lo = tm;
                } else {
                    hi = mid;
                }
            }
            if h_lo.abs() <= 1e-5 {
                bracket = Some((lo, t_lo));
                break;
            }
        }
        prev_l = l;
        prev_h = hl;
        prev_theta = th;
        k += 1;
    }
    let (mut lambda, mut theta) = bracket.ok_or_else(|| {
        Error::NotFound(format!("no clamped eigenvalue in [{start}, {}]", start + s * libm::pow(1.25, MAX_SCAN as f64)))
    })?;

    let mut gval = shoot.map(lambda, theta, len)?;
    let mut iterations = 0;
    let mut converged = norm(gval) <= 1e-12;
    while !converged && iterations < MAX_NEWTON {
        iterations += 1;
        let dl = 1e-7 * lambda.abs().max(1.0);
        let dt = 1e-7;
        let gl = shoot.map(lambda + dl, theta, len)?;
        let gt = shoot.map(lambda, theta + dt, len)?;
        let j = [[(gl[0] - gval[0]) / dl, (gt[0] - gval[0]) / dt], [(gl[1] - gval[1]) / dl, (gt[1] - gval[1]) / dt]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d_l = -(j[1][1] * gval[0] - j[0][1] * gval[1]) / det;
        let d_t = -(-j[1][0] * gval[0] + j[0][0] * gval[1]) / det;
        let mut t = 1.0;
        let current = norm(gval);
        loop {
            let cand = shoot.map(lambda + t * d_l, theta + t * d_t, len)?;
            if norm(cand) < current || t < 1e-4 {
                lambda += t * d_l;
                theta += t * d_t;
                gval = cand;
                break;
            }
            t *= 0.5;
        }
        let tiny_step = (t * d_l).abs() <= 1e-14 * lambda.abs().max(1.0) && (t * d_t).abs() <= 1e-14;
        converged = norm(gval) <= 1e-12 || (tiny_step && norm(gval) <= 1e-8);
        if tiny_step && !converged {
            break;
        }
    }
    if !(norm(gval) <= 1e-8) {
        return Err(Error::NotFound(format!(
            "clamped shooting did not converge: lambda = {lambda}, theta = {theta}, |map| = {:e}",
            norm(gval)
        )));
    }
    let trajectory = shoot.solve(lambda, theta)?;
    let m = trajectory.max_abs(0);
    let y0 = trajectory.initial_state();
    let y1 = trajectory.final_state();
    Ok(ClampedEigen {
        lambda,
        theta,
        boundary_residuals: [y0[0] / m, y0[1] / m, y1[0] / m, y1[1] / m],
        trajectory,
        newton_iterations: iterations,
    })
}
