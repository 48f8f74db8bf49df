use hlpicone_core::ode::{FourthOrderProblem, Interval, MiddleTerm, SecondOrderProblem};
use hlpicone_core::picone::{
    binomial_weights, sweep_variants, CaseSpec, FunctionSpec, IdentityKind, IdentityTag, Mode, ProblemSet, Variants,
    Verdict,
};
use hlpicone_core::{CoeffExpr, SignedPowerParam};

fn e(s: &str) -> CoeffExpr {
    CoeffExpr::parse(s).unwrap()
}

fn p2(p: &str, q: &str, alpha: f64, a: f64, b: f64) -> SecondOrderProblem {
    SecondOrderProblem::new(e(p), e(q), SignedPowerParam::new(alpha).unwrap(), Interval::new(a, b).unwrap()).unwrap()
}

fn p4(a: &str, b: &str, c: &str, alpha: f64, x0: f64, x1: f64) -> FourthOrderProblem {
    FourthOrderProblem::new(
        e(a),
        e(b),
        e(c),
        SignedPowerParam::new(alpha).unwrap(),
        Interval::new(x0, x1).unwrap(),
        MiddleTerm::FirstDerivative,
    )
    .unwrap()
}

fn second(
    tag: IdentityTag,
    u: (SecondOrderProblem, FunctionSpec<2>),
    v: (SecondOrderProblem, FunctionSpec<2>),
) -> CaseSpec {
    CaseSpec::new(IdentityKind::plain(tag), ProblemSet::Second { problems: [u.0, v.0], functions: [u.1, v.1] })
}

fn fourth(
    tag: IdentityTag,
    u: (FourthOrderProblem, FunctionSpec<4>),
    v: (FourthOrderProblem, FunctionSpec<4>),
) -> CaseSpec {
    CaseSpec::new(IdentityKind::plain(tag), ProblemSet::Fourth { problems: [u.0, v.0], functions: [u.1, v.1] })
}

fn sol2(y: [f64; 2]) -> FunctionSpec<2> {
    FunctionSpec::Solution(y)
}

fn sol4(y: [f64; 4]) -> FunctionSpec<4> {
    FunctionSpec::Solution(y)
}

fn assert_holds(spec: &CaseSpec, int_tol: f64, diff_tol: f64) {
    let r = spec.verify().unwrap();
    assert!(
        r.residual_int <= int_tol && r.residual_diff <= diff_tol,
        "{}: int {:e} diff {:e} scale {} excluded {:?}",
        r.tag.name(),
        r.residual_int,
        r.residual_diff,
        r.scale,
        r.excluded
    );
}

#[test]
fn p13_sine_against_faster_sine() {
    let (s1, c1) = (libm::sin(0.1), libm::cos(0.1));
    let (s3, c3) = (libm::sin(0.3), libm::cos(0.3));
    let spec = second(
        IdentityTag::P13,
        (p2("1", "1", 1.0, 0.1, 1.4), sol2([s1, c1])),
        (p2("1", "4", 1.0, 0.1, 1.4), sol2([s3, 2.0 * c3])),
    );
    assert_holds(&spec, 1e-6, 1e-4);
}

#[test]
fn p13_rejects_nonlinear_and_expressions() {
    let spec = second(
        IdentityTag::P13,
        (p2("1", "1", 2.0, 0.0, 1.0), sol2([0.0, 1.0])),
        (p2("1", "1", 2.0, 0.0, 1.0), sol2([1.0, 0.0])),
    );
    assert!(spec.prepare().is_err());
    let spec = second(
        IdentityTag::P13,
        (p2("1", "1", 1.0, 0.0, 1.0), FunctionSpec::Expression(e("sin(x)"))),
        (p2("1", "1", 1.0, 0.0, 1.0), sol2([1.0, 0.0])),
    );
    assert!(spec.prepare().is_err());
}

#[test]
fn p16_coincides_with_p13_at_alpha_one() {
    let u = (p2("1", "1", 1.0, 0.0, 1.4), sol2([0.0, 1.0]));
    let v = (p2("1", "1", 1.0, 0.0, 1.4), sol2([1.0, 0.0]));
    let c13 = second(IdentityTag::P13, u.clone(), v.clone()).prepare().unwrap();
    let c16 = second(IdentityTag::P16, u, v).prepare().unwrap();
    let r = c16.verify().unwrap();
    for x in Interval::new(0.0, 1.4).unwrap().grid(2001) {
        assert!((c13.bracket(x).unwrap() - c16.bracket(x).unwrap()).abs() <= 1e-12 * r.scale);
        assert!((c13.rhs(x).unwrap() - c16.rhs(x).unwrap()).abs() <= 1e-12 * r.scale);
        // p = P, q = Q: only the Q-form survives.
        let (s, c) = (libm::sin(x), libm::cos(x));
        let y = c - s * (-s) / c;
        assert!((c16.rhs(x).unwrap() - y * y).abs() <= 1e-10 * (1.0 + y * y), "x {x}");
    }
}

#[test]
fn p16_bracket_vanishes_for_equal_inputs() {
    let u = (p2("1 + x", "2", 1.7, 0.0, 1.0), sol2([1.0, 0.2]));
    let c = second(IdentityTag::P16, u.clone(), u).prepare().unwrap();
    for x in Interval::new(0.0, 1.0).unwrap().grid(101) {
        assert_eq!(c.bracket(x).unwrap(), 0.0);
    }
}

#[test]
fn p16_half_linear_solutions() {
    let spec = second(
        IdentityTag::P16,
        (p2("1", "2", 2.0, 0.0, 1.2), sol2([0.0, 1.0])),
        (p2("1", "2", 2.0, 0.0, 1.2), sol2([1.0, 0.3])),
    );
    assert_holds(&spec, 1e-6, 1e-4);
}

#[test]
fn p16_expression_inputs_carry_operator_terms() {
    for alpha in [0.5, 1.0, 2.0] {
        let spec = second(
            IdentityTag::P16,
            (p2("1 + x^2", "cos(x)", alpha, 0.2, 1.0), FunctionSpec::Expression(e("2 + sin(x)"))),
            (p2("2 - x", "x", alpha, 0.2, 1.0), FunctionSpec::Expression(e("exp(x) + x^3"))),
        );
        assert_holds(&spec, 1e-8, 1e-6);
    }
}

#[test]
fn p16_as_printed_bracket_fails() {
    let spec = second(
        IdentityTag::P16,
        (p2("1", "2", 2.0, 0.0, 1.2), sol2([0.0, 1.0])),
        (p2("1", "2", 2.0, 0.0, 1.2), sol2([1.0, 0.3])),
    );
    let mut v = Variants::default();
    v.set("bracket_power", "as_printed").unwrap();
    let r = spec.with_kind(IdentityKind::new(IdentityTag::P16, v).unwrap()).verify().unwrap();
    assert_eq!(r.verdict(Mode::Both, 1e-5), Verdict::Fail, "{r:?}");
}

#[test]
fn p16_scaling_covariance() {
    let alpha = 1.6;
    let pu = p2("1 + x", "3", alpha, 0.0, 1.0);
    let pv = p2("2", "1 + x", alpha, 0.0, 1.0);
    let u = e("1 + x + sin(2*x)/4");
    let case = |u: CoeffExpr| {
        second(
            IdentityTag::P16,
            (pu.clone(), FunctionSpec::Expression(u)),
            (pv.clone(), FunctionSpec::Expression(e("2 - x^2"))),
        )
        .prepare()
        .unwrap()
    };
    let base = case(u.clone());
    for c in [2.0, -1.0] {
        let scaled = case(u.mul(&CoeffExpr::constant(c)));
        let k = libm::pow(libm::fabs(c), alpha + 1.0);
        for x in Interval::new(0.0, 1.0).unwrap().grid(51) {
            let (f0, f1) = (base.bracket(x).unwrap(), scaled.bracket(x).unwrap());
            let (r0, r1) = (base.rhs(x).unwrap(), scaled.rhs(x).unwrap());
            assert!((k * f0 - f1).abs() <= 1e-9 * f1.abs(), "c {c} x {x}");
            assert!((k * r0 - r1).abs() <= 1e-9 * r1.abs(), "c {c} x {x}");
        }
    }
}

#[test]
fn p16_continuity_in_alpha() {
    let res = |alpha: f64| {
        second(
            IdentityTag::P16,
            (p2("1 + x", "2", alpha, 0.0, 1.0), sol2([0.5, 1.0])),
            (p2("1", "3 - x", alpha, 0.0, 1.0), sol2([1.0, 0.1])),
        )
        .verify()
        .unwrap()
    };
    let (a, b) = (res(1.0), res(1.0 + 1e-6));
    assert!((a.residual_int - b.residual_int).abs() <= 1e-3);
    assert!((a.residual_diff - b.residual_diff).abs() <= 1e-3);
}

#[test]
fn p23_linear_polynomial_coefficients() {
    let spec = fourth(
        IdentityTag::P23,
        (p4("1 + x^2", "0.5 + x", "2 - x", 1.0, 0.0, 1.0), sol4([0.5, 1.0, 0.3, -0.2])),
        (p4("1 + x/2", "x^2", "1", 1.0, 0.0, 1.0), sol4([1.0, 0.2, -0.5, 0.4])),
    );
    assert_holds(&spec, 1e-6, 1e-4);
}

#[test]
fn p23_inner_derivative_matches_differences() {
    let al = SignedPowerParam::new(1.8).unwrap();
    let w = |x: f64| hlpicone_core::picone::p23_inner(al, 1.0 + x * x, 2.0 * x, 2.0 + libm::sin(x), libm::cos(x));
    let h = 1e-4;
    for x in [0.1, 0.5, 0.9] {
        let fd = (w(x - 2.0 * h).0 - 8.0 * w(x - h).0 + 8.0 * w(x + h).0 - w(x + 2.0 * h).0) / (12.0 * h);
        assert!((fd - w(x).1).abs() < 1e-9, "x {x}");
    }
}

#[test]
fn p24_default_variant_holds() {
    let spec = fourth(
        IdentityTag::P24,
        (p4("1 + x^2", "0.5", "1", 2.0, 0.0, 0.6), sol4([0.5, 1.0, 1.3, 0.2])),
        (p4("2", "x", "1 + x", 2.0, 0.0, 0.6), sol4([1.0, 0.8, 0.9, -0.4])),
    );
    assert_holds(&spec, 1e-6, 1e-4);
}

#[test]
fn p24_sweep_names_a_passing_variant() {
    let spec = fourth(
        IdentityTag::P24,
        (p4("1 + x", "0.3", "2", 1.0, 0.0, 0.5), sol4([0.5, 1.0, 1.3, 0.2])),
        (p4("1", "x", "1 + x", 1.0, 0.0, 0.5), sol4([1.0, 0.8, 0.9, -0.4])),
    );
    let sweep = sweep_variants(&spec);
    assert_eq!(sweep.entries.len(), 16);
    let best = sweep.best_entry().unwrap();
    let r = best.outcome.as_ref().unwrap();
    assert!(r.worst_residual() <= 1e-5, "{:?}", best.kind.flags());
    assert_eq!(
        best.kind.flags(),
        vec![
            ("middle_term", "first_derivative"),
            ("bracket_power", "corrected"),
            ("condition_power", "v_prime"),
            ("inner_bracket", "undifferentiated")
        ]
    );
}

fn system(n: usize, alpha: f64, index: Option<&str>) -> CaseSpec {
    // Slopes and values stay away from 0 on the interval, where φ or φ⁻¹
    // would be non-smooth.
    let ps = ["1", "1 + x/2", "2 - x/3", "1.5", "1 + x^2/4", "3"];
    let qs = ["0.5", "-1 - x", "0.3", "-2", "x", "-0.5"];
    let problems: Vec<_> = (0..n).map(|k| p2(ps[k], qs[k], alpha, 0.0, 0.8)).collect();
    let initial: Vec<_> = (0..n).map(|k| [1.0 + 0.1 * k as f64, 1.0 + 0.3 * k as f64]).collect();
    let mut v = Variants::default();
    if let Some(i) = index {
        v.set("distinguished_index", i).unwrap();
    }
    CaseSpec::new(IdentityKind::new(IdentityTag::P26, v).unwrap(), ProblemSet::System { problems, initial })
}

#[test]
fn p26_holds_for_several_n() {
    for n in 2..=4 {
        for alpha in [1.0, 2.0] {
            for idx in ["n_minus_one", "n"] {
                assert_holds(&system(n, alpha, Some(idx)), 1e-6, 1e-4);
            }
        }
    }
}

#[test]
fn p26_two_members_is_minus_p16() {
    let spec26 = system(2, 1.5, None);
    let ProblemSet::System { problems, initial } = &spec26.problems else { unreachable!() };
    let c26 = spec26.prepare().unwrap();
    let c16 =
        second(IdentityTag::P16, (problems[0].clone(), sol2(initial[0])), (problems[1].clone(), sol2(initial[1])))
            .prepare()
            .unwrap();
    let scale = c16.verify().unwrap().scale;
    for x in Interval::new(0.0, 0.8).unwrap().grid(201) {
        assert!((c26.bracket(x).unwrap() + c16.bracket(x).unwrap()).abs() <= 1e-10 * scale);
        assert!((c26.rhs(x).unwrap() + c16.rhs(x).unwrap()).abs() <= 1e-10 * scale);
    }
    assert!(c26.verify().unwrap().notes.iter().any(|n| n.contains("-1")));
}

#[test]
fn binomial_weights_sum_to_zero() {
    for n in 2..=6 {
        let w = binomial_weights(n);
        assert_eq!(w.len(), n);
        assert_eq!(w.iter().sum::<f64>(), 0.0);
        assert_eq!(w[n - 1], 1.0);
    }
    assert_eq!(binomial_weights(3), vec![1.0, -2.0, 1.0]);
}

#[test]
fn flags_are_validated_per_kind() {
    let mut v = Variants::default();
    v.set("inner_bracket", "as_printed").unwrap();
    assert!(IdentityKind::new(IdentityTag::P16, v).is_err());
    assert!(IdentityKind::new(IdentityTag::P24, v).is_ok());
    let mut v = Variants::default();
    v.set("middle_term", "as_printed").unwrap();
    assert!(IdentityKind::new(IdentityTag::P13, v).is_err());
    assert!(v.set("middle_term", "sideways").is_err());
    assert!(v.set("colour", "red").is_err());
    assert_eq!(IdentityKind::all_variants(IdentityTag::P13).len(), 1);
    assert_eq!(IdentityKind::all_variants(IdentityTag::P26).len(), 2);
}

#[test]
fn zero_denominator_points_are_excluded_and_reported() {
    // v = cos(x) vanishes at the grid midpoint π/2.
    let pi = core::f64::consts::PI;
    let spec = second(
        IdentityTag::P16,
        (p2("1", "1", 1.0, 0.0, pi), sol2([0.0, 1.0])),
        (p2("1", "1", 1.0, 0.0, pi), sol2([1.0, 0.0])),
    );
    let r = spec.verify().unwrap();
    assert_eq!(r.excluded.len(), 1);
    let (a, b) = r.excluded[0];
    assert!(a <= core::f64::consts::FRAC_PI_2 && core::f64::consts::FRAC_PI_2 <= b);
    assert_eq!(r.runs, 2);
}

#[test]
fn denominator_sign_change_between_grid_points_splits_runs() {
    // v = cos(x) vanishes at π/2, which is not a grid point of [0, 3].
    let spec = second(
        IdentityTag::P16,
        (p2("1", "1", 1.0, 0.0, 3.0), sol2([0.0, 1.0])),
        (p2("1", "1", 1.0, 0.0, 3.0), sol2([1.0, 0.0])),
    );
    let r = spec.verify().unwrap();
    assert!(r.excluded.is_empty());
    assert_eq!(r.runs, 2);
    assert!(r.notes.iter().any(|n| n.contains("changes sign")), "{:?}", r.notes);
}
