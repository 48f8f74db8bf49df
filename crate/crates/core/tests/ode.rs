use core::f64::consts::PI;

use hlpicone_core::ode::{integrate, FourthOrderProblem, Interval, MiddleTerm, SecondOrderProblem, Tolerance};
use hlpicone_core::{CoeffExpr, SignedPowerParam};

fn e(s: &str) -> CoeffExpr {
    CoeffExpr::parse(s).unwrap()
}

fn al(a: f64) -> SignedPowerParam {
    SignedPowerParam::new(a).unwrap()
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn sine(span: f64, tol: &Tolerance) -> hlpicone_core::ode::SecondOrderTrajectory {
    let pr = SecondOrderProblem::new(e("1"), e("1"), al(1.0), iv(0.0, span)).unwrap();
    integrate(&pr, [0.0, 1.0], (0.0, span), tol).unwrap()
}

#[test]
fn sine_quarter_period() {
    let t = sine(PI / 2.0, &Tolerance::default());
    assert!((t.final_state()[0] - 1.0).abs() < 1e-8);
}

#[test]
fn sine_fields_at_pi() {
    let t = sine(4.0, &Tolerance::default());
    let f = t.fields_at(PI).unwrap();
    assert!(f.u.abs() < 1e-8);
    assert!((f.du + 1.0).abs() < 1e-8);
}

#[test]
fn cubic_from_fourth_order() {
    let pr =
        FourthOrderProblem::new(e("1"), e("0"), e("0"), al(1.0), iv(0.0, 3.0), MiddleTerm::FirstDerivative).unwrap();
    let t = integrate(&pr, [0.0, 0.0, 0.0, 6.0], (0.0, 3.0), &Tolerance::default()).unwrap();
    assert!((t.state_at(1.0).unwrap()[0] - 1.0).abs() < 1e-10);
    assert!((t.fields_at(2.0).unwrap().d2u - 12.0).abs() < 1e-9);
}

/// Classical RK4 with a fixed step on `(φ(u'))' + α φ(u) = 0`, stepping until
/// `u` changes sign, then bisecting the last step by re-integration.
fn fixed_step_first_zero(alpha: f64, h: f64) -> f64 {
    let a = al(alpha);
    let f = |y: [f64; 2]| [a.phi_inv(y[1]), -alpha * a.phi(y[0])];
    let step = |y: [f64; 2], h: f64| {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let mut x = 0.0;
    let mut y = [0.0, 1.0];
    loop {
        let next = step(y, h);
        if next[0] <= 0.0 && x > 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if step(y, mid)[0] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return x + 0.5 * (lo + hi);
        }
        x += h;
        y = next;
    }
}

#[test]
fn generalized_sine_first_zero() {
    let closed = 4.0 * PI / (3.0 * libm::sqrt(3.0));
    let oracle = fixed_step_first_zero(2.0, 1e-4);
    assert!((oracle - closed).abs() < 1e-6, "oracle {oracle} vs {closed}");

    let pr = SecondOrderProblem::new(e("1"), e("2"), al(2.0), iv(0.0, 3.0)).unwrap();
    let t = integrate(&pr, [0.0, 1.0], (0.0, 3.0), &Tolerance::default()).unwrap();
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if t.state_at(mid).unwrap()[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - closed).abs() < 1e-6, "{lo} vs {closed}");
}

#[test]
fn tighter_tolerance_reduces_error() {
    let mut errs = Vec::new();
    for rel in [1e-6, 1e-8, 1e-10] {
        let t = sine(10.0, &Tolerance::new(rel, rel * 1e-2));
        errs.push((t.final_state()[0] - libm::sin(10.0)).abs());
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-8);
}

#[test]
fn homogeneity_second_order() {
    for alpha in [0.5, 1.0, 2.0] {
        let pr = SecondOrderProblem::new(e("1 + x/4"), e("2 + sin(x)"), al(alpha), iv(0.0, 2.0)).unwrap();
        let y0 = [0.3, 1.1];
        let base = integrate(&pr, y0, (0.0, 2.0), &Tolerance::default()).unwrap();
        for c in [2.0, -3.0, 0.5] {
            let scaled = integrate(&pr, pr.scale_state(&y0, c), (0.0, 2.0), &Tolerance::default()).unwrap();
            let max = base.max_abs(0) * libm::fabs(c);
            for x in Interval::new(0.0, 2.0).unwrap().grid(101) {
                let want = pr.scale_state(&base.state_at(x).unwrap(), c);
                let got = scaled.state_at(x).unwrap();
                assert!((want[0] - got[0]).abs() <= 1e-7 * max, "alpha {alpha} c {c} x {x}");
            }
        }
    }
}

#[test]
fn homogeneity_fourth_order() {
    for alpha in [1.0, 2.0] {
        let pr = FourthOrderProblem::new(
            e("1 + x^2"),
            e("0.5"),
            e("-3 - x"),
            al(alpha),
            iv(0.0, 1.0),
            MiddleTerm::FirstDerivative,
        )
        .unwrap();
        let y0 = [0.2, 1.0, 1.5, -0.4];
        let base = integrate(&pr, y0, (0.0, 1.0), &Tolerance::default()).unwrap();
        for c in [2.0, -3.0, 0.5] {
            let scaled = integrate(&pr, pr.scale_state(&y0, c), (0.0, 1.0), &Tolerance::default()).unwrap();
            let max = base.max_abs(0) * libm::fabs(c);
            for x in Interval::new(0.0, 1.0).unwrap().grid(101) {
                let want = pr.scale_state(&base.state_at(x).unwrap(), c);
                let got = scaled.state_at(x).unwrap();
                assert!((want[0] - got[0]).abs() <= 1e-7 * max, "alpha {alpha} c {c} x {x}");
            }
        }
    }
}

#[test]
fn mesh_nodes_interpolate_exactly() {
    let t = sine(5.0, &Tolerance::default());
    for (x, y) in t.mesh().iter().zip(t.states()) {
        assert_eq!(t.state_at(*x).unwrap(), *y);
    }
    assert!(t.mesh().windows(2).all(|w| w[0] < w[1]));
    assert_eq!(t.start(), 0.0);
    assert_eq!(t.end(), 5.0);
    assert!(t.state_at(5.1).is_err());
}

fn check_dense_output(pr: &SecondOrderProblem, y0: [f64; 2], span: (f64, f64)) {
    let tol = Tolerance::default();
    let t = integrate(pr, y0, span, &tol).unwrap();
    let mesh = t.mesh();
    let fine = Tolerance::new(1e-13, 1e-15);
    for i in 0..mesh.len() - 1 {
        let mid = 0.5 * (mesh[i] + mesh[i + 1]);
        let sub = integrate(pr, t.states()[i], (mesh[i], mid), &fine).unwrap();
        let d = (sub.final_state()[0] - t.state_at(mid).unwrap()[0]).abs();
        assert!(d <= 10.0 * (tol.rel * t.max_abs(0) + tol.abs), "step {i} of {} at {}: {d}", mesh.len(), mesh[i]);
    }
}

#[test]
fn dense_output_matches_reintegration() {
    let pr = SecondOrderProblem::new(e("1 + x/4"), e("3 + sin(x)"), al(1.0), iv(0.0, 4.0)).unwrap();
    check_dense_output(&pr, [0.2, 1.0], (0.0, 4.0));
    // Away from zeros of u and u', where φ and φ⁻¹ are smooth.
    let pr = SecondOrderProblem::new(e("1"), e("-2"), al(2.0), iv(0.0, 0.8)).unwrap();
    check_dense_output(&pr, [1.0, 1.0], (0.0, 0.8));
}

#[test]
fn shear_matches_finite_differences_of_moment() {
    let pr = FourthOrderProblem::new(
        e("2 + sin(x)"),
        e("1 + x"),
        e("x^2 - 4"),
        al(1.7),
        iv(0.0, 1.0),
        MiddleTerm::FirstDerivative,
    )
    .unwrap();
    let t = integrate(&pr, [0.5, 0.8, 1.2, -0.3], (0.0, 1.0), &Tolerance::default().with_max_step(1e-3)).unwrap();
    let h = 1e-3;
    for x in [0.2, 0.45, 0.7] {
        let m = |s: f64| t.fields_at(s).unwrap().moment;
        let fd = (m(x - 2.0 * h) - 8.0 * m(x - h) + 8.0 * m(x + h) - m(x + 2.0 * h)) / (12.0 * h);
        let shear = t.fields_at(x).unwrap().shear;
        assert!((fd - shear).abs() <= 1e-5 * (1.0 + shear.abs()), "x {x}: {fd} vs {shear}");
    }
}

#[test]
fn singular_coefficient_stops_integration() {
    // u'' = u / (x - 1)^2 blows up at x = 1.
    let pr = SecondOrderProblem::new(e("1"), e("-1/(x - 1)^2"), al(1.0), iv(0.0, 2.0)).unwrap();
    assert!(integrate(&pr, [1.0, 0.0], (0.0, 2.0), &Tolerance::default()).is_err());
}
