//! Zeros, eigenvalue shooting and the comparison-theorem harnesses.

mod eigen;
mod harness;

use alloc::vec::Vec;

pub use eigen::{eigen_shoot_2nd, eigen_shoot_4th_clamped, ClampedEigen, DirichletEigen};
pub use harness::{
    check_hypotheses, verify_conclusion, ComparisonReport, HarnessProblems, Inequality, Manufactured, Outcome,
    SampleResult, Theorem, TheoremCase, DEFAULT_SAMPLES, ENDPOINT_ZERO, MULTIPLE_FLOOR, MULTIPLE_SPREAD,
};

use crate::error::Result;
use crate::ode::{QuasiSystem, Trajectory};

/// Sub-samples per accepted step when scanning for sign changes.
const SUBSAMPLES: usize = 4;

/// Sign-change zeros of a trajectory component, refined by bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub tol: f64,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }
}

/// Zeros of `f` on `[mesh[0], mesh[last]]` bracketed by a sign change among
/// `SUBSAMPLES` points per mesh step. Tangential zeros are not reported, and
/// neither are zeros at the two ends (no sign change can bracket them).
pub fn zeros_of(mesh: &[f64], tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<ZeroSet> {
    let mut xs = Vec::with_capacity(mesh.len() * SUBSAMPLES);
    for w in mesh.windows(2) {
        for k in 0..SUBSAMPLES {
            xs.push(w[0] + (w[1] - w[0]) * k as f64 / SUBSAMPLES as f64);
        }
    }
    if let Some(last) = mesh.last() {
        xs.push(*last);
    }
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(f(x)?);
    }
    let mut zeros = Vec::new();
    let n = xs.len();
    let mut i = 0;
    while i + 1 < n {
        let (a, b) = (vals[i], vals[i + 1]);
        if a != 0.0 && b == 0.0 {
            // exact zero at a sample: claim it only if the sign changes across it
            let mut j = i + 1;
            while j < n && vals[j] == 0.0 {
                j += 1;
            }
            if j < n && (a < 0.0) != (vals[j] < 0.0) {
                zeros.push(xs[i + 1]);
            }
            i = j;
            continue;
        }
        if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            let neg_lo = a < 0.0;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let v = f(mid)?;
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (v < 0.0) == neg_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        i += 1;
    }
    Ok(ZeroSet { zeros, tol })
}

/// Zeros of state component `component` along `traj`.
pub fn find_zeros<S: QuasiSystem<N>, const N: usize>(
    traj: &Trajectory<S, N>,
    component: usize,
    tol: f64,
) -> Result<ZeroSet> {
    zeros_of(traj.mesh(), tol, |x| Ok(traj.state_at(x)?[component]))
}
