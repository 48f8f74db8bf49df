use alloc::format;
use alloc::vec::Vec;

use super::{FourthOrderFields, FourthOrderProblem, QuasiSystem, SecondOrderFields, SecondOrderProblem, StepStats};
use crate::error::{Error, Result};

/// Accepted-step mesh of an integration with dense output.
///
/// Between nodes the state is the integrator's fourth-order continuous
/// extension. The mesh is strictly increasing; at a mesh node the
/// interpolated state is the stored state.
#[derive(Debug, Clone)]
pub struct Trajectory<S, const N: usize> {
    system: S,
    xs: Vec<f64>,
    ys: Vec<[f64; N]>,
    dys: Vec<[f64; N]>,
    conts: Vec<[[f64; N]; 5]>,
    stats: StepStats,
}

impl<S, const N: usize> Trajectory<S, N> {
    pub(super) fn from_parts(
        system: S,
        xs: Vec<f64>,
        ys: Vec<[f64; N]>,
        dys: Vec<[f64; N]>,
        conts: Vec<[[f64; N]; 5]>,
        stats: StepStats,
    ) -> Self {
        Trajectory { system, xs, ys, dys, conts, stats }
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    pub fn mesh(&self) -> &[f64] {
        &self.xs
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.ys
    }

    pub fn derivatives(&self) -> &[[f64; N]] {
        &self.dys
    }

    pub fn stats(&self) -> &StepStats {
        &self.stats
    }

    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    pub fn end(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn initial_state(&self) -> [f64; N] {
        self.ys[0]
    }

    pub fn final_state(&self) -> [f64; N] {
        self.ys[self.ys.len() - 1]
    }

    /// Index `i` of the step `[xs[i], xs[i+1]]` containing `x`, or an exact node hit.
    fn locate(&self, x: f64) -> Result<Located> {
        let (a, b) = (self.start(), self.end());
        let slack = 1e-12 * (b - a);
        if !(x >= a - slack && x <= b + slack) {
            return Err(Error::Precondition(format!("x = {x} outside trajectory span [{a}, {b}]")));
        }
        let x = libm::fmin(libm::fmax(x, a), b);
        let i = self.xs.partition_point(|&m| m <= x);
        // xs[i-1] <= x < xs[i]
        let node = i - 1;
        if self.xs[node] == x {
            Ok(Located::Node(node))
        } else {
            Ok(Located::Step(node, x))
        }
    }

    /// Dense-output state at `x`.
    pub fn state_at(&self, x: f64) -> Result<[f64; N]> {
        Ok(match self.locate(x)? {
            Located::Node(i) => self.ys[i],
            Located::Step(i, x) => {
                let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                let s = 1.0 - t;
                let c = &self.conts[i];
                let mut out = [0.0; N];
                for k in 0..N {
                    out[k] = c[0][k] + t * (c[1][k] + s * (c[2][k] + t * (c[3][k] + s * c[4][k])));
                }
                out
            }
        })
    }

    /// Largest magnitude of component `k` over the mesh nodes.
    pub fn max_abs(&self, k: usize) -> f64 {
        self.ys.iter().fold(0.0, |m, y| libm::fmax(m, libm::fabs(y[k])))
    }
}

impl<S: QuasiSystem<N>, const N: usize> Trajectory<S, N> {
    /// State derivative at `x`, from the right-hand side at the dense-output state.
    pub fn derivative_at(&self, x: f64) -> Result<[f64; N]> {
        match self.locate(x)? {
            Located::Node(i) => Ok(self.dys[i]),
            Located::Step(_, x) => self.system.rhs(x, &self.state_at(x)?),
        }
    }
}

enum Located {
    Node(usize),
    Step(usize, f64),
}

impl Trajectory<SecondOrderProblem, 2> {
    pub fn fields_at(&self, x: f64) -> Result<SecondOrderFields> {
        let y = self.state_at(x)?;
        self.system.fields(x, &y)
    }
}

impl Trajectory<FourthOrderProblem, 4> {
    pub fn fields_at(&self, x: f64) -> Result<FourthOrderFields> {
        let y = self.state_at(x)?;
        self.system.fields(x, &y)
    }
}
