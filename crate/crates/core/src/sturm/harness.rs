//! Hypothesis checks and sampled conclusion checks for the comparison theorems.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eigen::{eigen_shoot_2nd, eigen_shoot_4th_clamped};
use super::find_zeros;
use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::ode::{
    integrate, FourthOrderProblem, Interval, MiddleTerm, QuasiSystem, SecondOrderProblem, Tolerance, Trajectory,
};
use crate::picone::{ConditionPower, DEFAULT_GRID};
use crate::sgnpow::SignedPowerParam;

/// Default number of sampled comparison solutions.
pub const DEFAULT_SAMPLES: usize = 32;
/// Spread `(max - min) / |median|` of `v/u` below which `v` is a multiple of `u`.
pub const MULTIPLE_SPREAD: f64 = 1e-4;
/// `v/u` is only sampled where `|u| >= MULTIPLE_FLOOR * max|u|`.
pub const MULTIPLE_FLOOR: f64 = 1e-3;
/// Endpoint values below this fraction of `max|v|` count as zeros.
pub const ENDPOINT_ZERO: f64 = 1e-8;
const ZERO_TOL: f64 = 1e-10;
const BISECTIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Fourth order, side condition `v''/v < 0`.
    T1,
    /// Fourth order, side condition `B |v'|^(α+1) - v' (A φ(v''))' > 0`.
    T2,
    /// Three second-order equations, `u2` clamped between `u1` and `u3`.
    C3,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1 => "1",
            Theorem::T2 => "2",
            Theorem::C3 => "c3",
        }
    }

    pub fn from_name(s: &str) -> Option<Theorem> {
        match s {
            "1" | "t1" | "T1" => Some(Theorem::T1),
            "2" | "t2" | "T2" => Some(Theorem::T2),
            "c3" | "C3" => Some(Theorem::C3),
            _ => None,
        }
    }
}

/// Coefficients of the equations a theorem compares.
#[derive(Debug, Clone)]
pub enum HarnessProblems {
    /// `l` with `(a, b, c)` carries the manufactured solution; the sampled
    /// solutions solve `L` with `(A, B, C)`, or `l` itself when absent.
    /// `c` is shifted by the clamped eigenvalue.
    Fourth { a: CoeffExpr, b: CoeffExpr, c: CoeffExpr, comparison: Option<[CoeffExpr; 3]> },
    /// `p_k, q_k` for `k = 1, 2, 3`; `q2` is shifted by the Dirichlet eigenvalue.
    System { p: [CoeffExpr; 3], q: [CoeffExpr; 3] },
}

#[derive(Debug, Clone)]
pub struct TheoremCase {
    pub theorem: Theorem,
    pub alpha: SignedPowerParam,
    pub interval: Interval,
    pub problems: HarnessProblems,
    pub samples: usize,
    pub seed: u64,
    pub grid: usize,
    pub condition: ConditionPower,
    /// Factors `c`: extra samples started from `c` times the manufactured state.
    pub proportional_probes: Vec<f64>,
    pub tolerance: Tolerance,
}

impl TheoremCase {
    pub fn new(
        theorem: Theorem,
        alpha: SignedPowerParam,
        interval: Interval,
        problems: HarnessProblems,
    ) -> Result<Self> {
        let fits = matches!(
            (theorem, &problems),
            (Theorem::T1 | Theorem::T2, HarnessProblems::Fourth { .. }) | (Theorem::C3, HarnessProblems::System { .. })
        );
        if !fits {
            return Err(Error::InvalidParameter(format!(
                "theorem {} needs {} problems",
                theorem.name(),
                if theorem == Theorem::C3 { "three second-order" } else { "fourth-order" }
            )));
        }
        Ok(TheoremCase {
            theorem,
            alpha,
            interval,
            problems,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            grid: DEFAULT_GRID,
            condition: ConditionPower::VPrime,
            proportional_probes: Vec::new(),
            tolerance: Tolerance::default(),
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_condition(mut self, condition: ConditionPower) -> Self {
        self.condition = condition;
        self
    }

    pub fn with_proportional_probes(mut self, probes: Vec<f64>) -> Self {
        self.proportional_probes = probes;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// One coefficient inequality checked on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub name: String,
    pub holds: bool,
    pub first_violation: Option<f64>,
    /// Smallest grid value of the side that must be nonnegative (or positive).
    pub margin: f64,
}

struct Check<'a> {
    name: &'static str,
    strict: bool,
    /// Terms `(weight, coefficient)` summed, plus a constant.
    terms: Vec<(f64, &'a CoeffExpr)>,
    constant: f64,
}

impl Check<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        let mut s = self.constant;
        for (w, e) in &self.terms {
            s += w * e.eval(x)?;
        }
        Ok(s)
    }

    fn ok(&self, v: f64) -> bool {
        if self.strict {
            v > 0.0
        } else {
            v >= 0.0
        }
    }
}

fn run_check(check: &Check, interval: &Interval, grid: usize) -> Result<Inequality> {
    let mut margin = f64::INFINITY;
    let mut first = None;
    let mut prev = None;
    for i in 0..grid {
        let x = interval.grid_point(i, grid);
        let v = check.eval(x)?;
        margin = margin.min(v);
        if first.is_none() && !check.ok(v) {
            first = Some(match prev {
                None => x,
                Some(mut lo) => {
                    let mut hi = x;
                    for _ in 0..BISECTIONS {
                        let mid = 0.5 * (lo + hi);
                        if check.ok(check.eval(mid)?) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    hi
                }
            });
        }
        prev = Some(x);
    }
    Ok(Inequality { name: check.name.to_string(), holds: first.is_none(), first_violation: first, margin })
}

/// Coefficient hypotheses of the case's theorem on its grid. `lambda` is the
/// eigenvalue absorbed into the manufactured equation (`c - λ` for the
/// fourth-order theorems, `q2 + λ` for the system), so the inequalities are
/// checked against the equation `u` actually solves.
pub fn check_hypotheses(case: &TheoremCase, lambda: f64) -> Result<Vec<Inequality>> {
    let mut checks = Vec::new();
    match &case.problems {
        HarnessProblems::Fourth { a, b, c, comparison } => {
            let (ca, cb, cc) = match comparison {
                Some([ca, cb, cc]) => (ca, cb, cc),
                None => (a, b, c),
            };
            let c_shift = if comparison.is_some() { -lambda } else { 0.0 };
            checks.push(Check { name: "A >= 0", strict: false, terms: vec![(1.0, ca)], constant: 0.0 });
            checks.push(Check { name: "A <= a", strict: false, terms: vec![(1.0, a), (-1.0, ca)], constant: 0.0 });
            if case.theorem == Theorem::T1 {
                checks.push(Check { name: "B >= 0", strict: false, terms: vec![(1.0, cb)], constant: 0.0 });
            }
            checks.push(Check { name: "B <= b", strict: false, terms: vec![(1.0, b), (-1.0, cb)], constant: 0.0 });
            checks.push(Check { name: "C <= c", strict: false, terms: vec![(1.0, c), (-1.0, cc)], constant: c_shift });
        }
        HarnessProblems::System { p, q } => {
            checks.push(Check { name: "p1 > 0", strict: true, terms: vec![(1.0, &p[0])], constant: 0.0 });
            checks.push(Check { name: "p2 > 0", strict: true, terms: vec![(1.0, &p[1])], constant: 0.0 });
            checks.push(Check { name: "p3 > 0", strict: true, terms: vec![(1.0, &p[2])], constant: 0.0 });
            checks.push(Check {
                name: "p2 >= (p1 + p3)/2",
                strict: false,
                terms: vec![(1.0, &p[1]), (-0.5, &p[0]), (-0.5, &p[2])],
                constant: 0.0,
            });
            checks.push(Check {
                name: "q2 <= (q1 + q3)/2",
                strict: false,
                terms: vec![(0.5, &q[0]), (0.5, &q[2]), (-1.0, &q[1])],
                constant: -lambda,
            });
        }
    }
    checks.iter().map(|c| run_check(c, &case.interval, case.grid)).collect()
}

/// The manufactured solution `u` (`u2` for the system).
#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured {
    pub lambda: f64,
    /// Angle of the initial third and fourth quasi-components (fourth order).
    pub theta: Option<f64>,
    /// Boundary values divided by `max|u|`: `u(x0), u'(x0), u(x1), u'(x1)` for
    /// clamped, `u(x0), u(x1)` for Dirichlet.
    pub boundary_residuals: Vec<f64>,
    pub initial: Vec<f64>,
    pub max_abs: f64,
    pub mesh: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    ZeroFound {
        x: f64,
    },
    ConstantMultiple {
        ratio: f64,
        spread: f64,
    },
    /// The side condition fails at `x`; the theorem says nothing.
    Skipped {
        x: f64,
    },
    /// No zero, not a multiple, condition met: the trajectory is kept whole.
    Counterexample {
        spread: f64,
        mesh: Vec<f64>,
        states: Vec<Vec<f64>>,
    },
    IntegrationFailed {
        message: String,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::ZeroFound { .. } => "zero_found",
            Outcome::ConstantMultiple { .. } => "constant_multiple",
            Outcome::Skipped { .. } => "skipped",
            Outcome::Counterexample { .. } => "counterexample",
            Outcome::IntegrationFailed { .. } => "integration_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub index: usize,
    /// `v` for the fourth-order theorems, `u1` or `u3` for the system.
    pub equation: &'static str,
    /// Norm of the initial quasi-state (unit-sphere draws are scaled by 1 or 10).
    pub scale: f64,
    /// Proportional probe factor, when the sample is one.
    pub probe: Option<f64>,
    pub initial: Vec<f64>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub theorem: Theorem,
    pub alpha: f64,
    pub interval: Interval,
    pub hypotheses: Vec<Inequality>,
    pub hypotheses_hold: bool,
    pub manufactured: Manufactured,
    pub seed: u64,
    pub grid: usize,
    pub samples: Vec<SampleResult>,
}

impl ComparisonReport {
    pub fn count(&self, label: &str) -> usize {
        self.samples.iter().filter(|s| s.outcome.label() == label).count()
    }

    pub fn counterexamples(&self) -> usize {
        self.count("counterexample")
    }

    /// Hypotheses hold and every sample that met the side condition concluded.
    pub fn passed(&self) -> bool {
        self.hypotheses_hold
            && self
                .samples
                .iter()
                .all(|s| !matches!(s.outcome, Outcome::Counterexample { .. } | Outcome::IntegrationFailed { .. }))
    }
}

fn unit_sphere<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    loop {
        let mut y = [0.0; N];
        for c in y.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = libm::sqrt(y.iter().map(|c| c * c).sum::<f64>());
        if n > 1e-12 {
            return y.map(|c| c / n);
        }
    }
}

fn dump<S, const N: usize>(t: &Trajectory<S, N>) -> (Vec<f64>, Vec<Vec<f64>>) {
    (t.mesh().to_vec(), t.states().iter().map(|s| s.to_vec()).collect())
}

/// `v/u` on the grid points where `u` is not small; `(median, spread)`.
fn ratio_spread(u: &[f64], v: &[f64]) -> (f64, f64) {
    let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r: Vec<f64> =
        u.iter().zip(v).filter(|(a, _)| a.abs() >= MULTIPLE_FLOOR * umax).map(|(a, b)| b / a).collect();
    if r.is_empty() {
        return (f64::NAN, f64::INFINITY);
    }
    r.sort_by(|a, b| a.total_cmp(b));
    let median = r[r.len() / 2];
    let spread = (r[r.len() - 1] - r[0]) / median.abs();
    (median, if spread.is_nan() { f64::INFINITY } else { spread })
}

fn has_zero<S: QuasiSystem<N>, const N: usize>(t: &Trajectory<S, N>) -> Result<Option<f64>> {
    let zs = find_zeros(t, 0, ZERO_TOL)?;
    if let Some(&x) = zs.zeros.first() {
        return Ok(Some(x));
    }
    let m = t.max_abs(0);
    if t.initial_state()[0].abs() <= ENDPOINT_ZERO * m {
        return Ok(Some(t.start()));
    }
    if t.final_state()[0].abs() <= ENDPOINT_ZERO * m {
        return Ok(Some(t.end()));
    }
    Ok(None)
}

/// Runs the theorem's conclusion on sampled solutions. The manufactured
/// solution comes from the smallest eigenvalue (clamped or Dirichlet), and the
/// hypotheses are attached whatever they say.
///
/// Each sample is tested for being a multiple of `u` first (such samples
/// share `u`'s boundary zeros, where the side condition is undefined), then
/// for the side condition, then for a zero on the closed interval.
pub fn verify_conclusion(case: &TheoremCase) -> Result<ComparisonReport> {
    let xs: Vec<f64> = (0..case.grid).map(|i| case.interval.grid_point(i, case.grid)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let scale_of = |i: usize| if (i / 2).is_multiple_of(2) { 1.0 } else { 10.0 };
    let mut samples = Vec::new();
    let (manufactured, lambda) = match &case.problems {
        HarnessProblems::Fourth { a, b, c, comparison } => {
            let eig = eigen_shoot_4th_clamped(a, b, case.alpha, case.interval, Some(c), &case.tolerance)?;
            let u = &eig.trajectory;
            let u_vals = xs.iter().map(|&x| Ok(u.state_at(x)?[0])).collect::<Result<Vec<_>>>()?;
            let lhs = u.system().clone();
            let other = match comparison {
                Some([ca, cb, cc]) => FourthOrderProblem::new(
                    ca.clone(),
                    cb.clone(),
                    cc.clone(),
                    case.alpha,
                    case.interval,
                    MiddleTerm::FirstDerivative,
                )?,
                None => lhs.clone(),
            };
            let mut starts: Vec<(f64, Option<f64>, [f64; 4])> = Vec::new();
            for i in 0..case.samples {
                let s = scale_of(i);
                starts.push((s, None, unit_sphere::<4>(&mut rng).map(|c| c * s)));
            }
            for &c in &case.proportional_probes {
                starts.push((c.abs(), Some(c), lhs.scale_state(&u.initial_state(), c)));
            }
            for (index, (scale, probe, init)) in starts.into_iter().enumerate() {
                let tol = probe_tolerance(&case.tolerance, probe);
                let outcome = fourth_outcome(case, &other, init, &tol, &xs, &u_vals);
                samples.push(SampleResult { index, equation: "v", scale, probe, initial: init.to_vec(), outcome });
            }
            let (mesh, states) = dump(u);
            let m = Manufactured {
                lambda: eig.lambda,
                theta: Some(eig.theta),
                boundary_residuals: eig.boundary_residuals.to_vec(),
                initial: u.initial_state().to_vec(),
                max_abs: u.max_abs(0),
                mesh,
                states,
            };
            (m, eig.lambda)
        }
        HarnessProblems::System { p, q } => {
            let eig = eigen_shoot_2nd(&p[1], &q[1], case.alpha, case.interval, &case.tolerance)?;
            let u = &eig.trajectory;
            let u_vals = xs.iter().map(|&x| Ok(u.state_at(x)?[0])).collect::<Result<Vec<_>>>()?;
            let outer = [
                SecondOrderProblem::new(p[0].clone(), q[0].clone(), case.alpha, case.interval)?,
                SecondOrderProblem::new(p[2].clone(), q[2].clone(), case.alpha, case.interval)?,
            ];
            let mut starts: Vec<(f64, Option<f64>, usize, [f64; 2])> = Vec::new();
            for i in 0..case.samples {
                let s = scale_of(i);
                starts.push((s, None, i % 2, unit_sphere::<2>(&mut rng).map(|c| c * s)));
            }
            for (j, &c) in case.proportional_probes.iter().enumerate() {
                let which = j % 2;
                let init = outer[which].state_from(
                    case.interval.start,
                    c * u.initial_state()[0],
                    c * u.fields_at(case.interval.start)?.du,
                )?;
                starts.push((c.abs(), Some(c), which, init));
            }
            for (index, (scale, probe, which, init)) in starts.into_iter().enumerate() {
                let tol = probe_tolerance(&case.tolerance, probe);
                let outcome = second_outcome(case, &outer[which], init, &tol, &xs, &u_vals);
                let equation = if which == 0 { "u1" } else { "u3" };
                samples.push(SampleResult { index, equation, scale, probe, initial: init.to_vec(), outcome });
            }
            let mmax = u.max_abs(0);
            let (mesh, states) = dump(u);
            let m = Manufactured {
                lambda: eig.lambda,
                theta: None,
                boundary_residuals: vec![u.initial_state()[0] / mmax, u.final_state()[0] / mmax],
                initial: u.initial_state().to_vec(),
                max_abs: mmax,
                mesh,
                states,
            };
            (m, eig.lambda)
        }
    };
    let hypotheses = check_hypotheses(case, lambda)?;
    let hypotheses_hold = hypotheses.iter().all(|h| h.holds);
    Ok(ComparisonReport {
        theorem: case.theorem,
        alpha: case.alpha.get(),
        interval: case.interval,
        hypotheses,
        hypotheses_hold,
        manufactured,
        seed: case.seed,
        grid: case.grid,
        samples,
    })
}

/// A probe started from `c` times the manufactured state gets its absolute
/// tolerance scaled by `|c|`, so that in the linear case the step sequence,
/// and hence the trajectory, is exactly `c` times that of `u`.
fn probe_tolerance(tol: &Tolerance, probe: Option<f64>) -> Tolerance {
    match probe {
        Some(c) if c != 0.0 => Tolerance { abs: tol.abs * c.abs(), ..*tol },
        _ => *tol,
    }
}

fn failed(e: Error) -> Outcome {
    Outcome::IntegrationFailed { message: e.to_string() }
}

fn fourth_outcome(
    case: &TheoremCase,
    problem: &FourthOrderProblem,
    init: [f64; 4],
    tol: &Tolerance,
    xs: &[f64],
    u: &[f64],
) -> Outcome {
    let iv = case.interval;
    let t = match integrate(problem, init, (iv.start, iv.end), tol) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let mut fields = Vec::with_capacity(xs.len());
    for &x in xs {
        match t.fields_at(x) {
            Ok(f) => fields.push(f),
            Err(e) => return failed(e),
        }
    }
    let v: Vec<f64> = fields.iter().map(|f| f.u).collect();
    let (ratio, spread) = ratio_spread(u, &v);
    if spread <= MULTIPLE_SPREAD {
        return Outcome::ConstantMultiple { ratio, spread };
    }
    let last = xs.len() - 1;
    for (i, (&x, f)) in xs.iter().zip(&fields).enumerate() {
        let met = match case.theorem {
            Theorem::T1 => f.d2u * f.u < 0.0,
            _ => {
                if i == 0 || i == last {
                    continue;
                }
                let lead = match case.condition {
                    ConditionPower::VPrime => f.bterm * f.du,
                    ConditionPower::AsPrintedV => match problem.b.eval(x) {
                        Ok(bx) => bx * case.alpha.abs_pow_next(f.u),
                        Err(e) => return failed(e),
                    },
                };
                lead - f.du * f.shear > 0.0
            }
        };
        if !met {
            return Outcome::Skipped { x };
        }
    }
    match has_zero(&t) {
        Ok(Some(x)) => Outcome::ZeroFound { x },
        Ok(None) => {
            let (mesh, states) = dump(&t);
            Outcome::Counterexample { spread, mesh, states }
        }
        Err(e) => failed(e),
    }
}

fn second_outcome(
    case: &TheoremCase,
    problem: &SecondOrderProblem,
    init: [f64; 2],
    tol: &Tolerance,
    xs: &[f64],
    u: &[f64],
) -> Outcome {
    let iv = case.interval;
    let t = match integrate(problem, init, (iv.start, iv.end), tol) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let mut v = Vec::with_capacity(xs.len());
    for &x in xs {
        match t.state_at(x) {
            Ok(s) => v.push(s[0]),
            Err(e) => return failed(e),
        }
    }
    let (ratio, spread) = ratio_spread(u, &v);
    if spread <= MULTIPLE_SPREAD {
        return Outcome::ConstantMultiple { ratio, spread };
    }
    match has_zero(&t) {
        Ok(Some(x)) => Outcome::ZeroFound { x },
        Ok(None) => {
            let (mesh, states) = dump(&t);
            Outcome::Counterexample { spread, mesh, states }
        }
        Err(e) => failed(e),
    }
}
