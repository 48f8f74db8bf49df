//! The four subcommands. Each returns its exit code or an error that maps to one.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hlpicone_core::ode::{
    integrate, FourthOrderProblem, Interval, MiddleTerm, SecondOrderProblem, StepStats, Trajectory,
};
use hlpicone_core::picone::{
    sweep_variants, CaseSpec, ConditionPower, FunctionSpec, IdentityKind, IdentityReport, IdentityTag, Mode,
    ProblemSet, Verdict,
};
use hlpicone_core::sturm::{
    eigen_shoot_2nd, eigen_shoot_4th_clamped, find_zeros, verify_conclusion, ComparisonReport, HarnessProblems,
    Outcome, Theorem, TheoremCase,
};
use serde::Serialize;

use crate::output::{emit, fmt_num, nums, to_json, write_csv, Num};
use crate::problem::{Order, Problem, Settings};
use crate::{CliError, Command, ModeArg};

const ZERO_TOL: f64 = 1e-12;

pub fn dispatch(cmd: &Command) -> Result<u8, CliError> {
    match cmd {
        Command::Solve { common, mesh } => {
            let p = Problem::load(&common.problem)?;
            solve(&p, common.out.as_deref(), common.csv.as_deref(), *mesh)
        }
        Command::Verify { common, identity, mode, variants, grid, sweep } => {
            let mut p = Problem::load(&common.problem)?;
            if let Some(n) = grid {
                if *n < 5 {
                    return Err(CliError::Input(format!("--grid must be at least 5, got {n}")));
                }
                p.settings.grid = *n;
            }
            for kv in variants {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Input(format!("--variant expects KEY=VAL, got {kv:?}")))?;
                p.variants.set(k.trim(), v.trim())?;
            }
            let tag = IdentityTag::from_name(identity)
                .ok_or_else(|| CliError::Input(format!("unknown identity {identity:?} (1.3, 1.6, 2.3, 2.4, 2.6)")))?;
            let mode = match mode {
                ModeArg::Diff => Mode::Differential,
                ModeArg::Int => Mode::Integral,
                ModeArg::Both => Mode::Both,
            };
            if *sweep {
                verify_sweep(&p, tag, mode, common.out.as_deref())
            } else {
                verify(&p, tag, mode, common.out.as_deref(), common.csv.as_deref())
            }
        }
        Command::Compare { common, theorem, samples, seed } => {
            let mut p = Problem::load(&common.problem)?;
            let theorem = Theorem::from_name(theorem)
                .ok_or_else(|| CliError::Input(format!("unknown theorem {theorem:?} (1, 2, c3)")))?;
            if let Some(k) = samples {
                p.settings.samples = *k;
            }
            if let Some(s) = seed {
                p.settings.seed = *s;
            }
            compare(&p, theorem, common.out.as_deref(), common.csv.as_deref())
        }
        Command::Eigen { common, order } => {
            let p = Problem::load(&common.problem)?;
            eigen(&p, *order, common.out.as_deref(), common.csv.as_deref())
        }
    }
}

#[derive(Serialize)]
struct SettingsOut {
    grid: usize,
    rtol: Num,
    atol: Num,
    delta: Num,
    threshold: Num,
}

impl From<&Settings> for SettingsOut {
    fn from(s: &Settings) -> Self {
        SettingsOut {
            grid: s.grid,
            rtol: Num(s.rtol),
            atol: Num(s.atol),
            delta: Num(s.delta),
            threshold: Num(s.threshold),
        }
    }
}

#[derive(Serialize)]
struct StepsOut {
    accepted: usize,
    rejected: usize,
    evaluations: usize,
    min_step: Num,
    max_step: Num,
}

impl From<&StepStats> for StepsOut {
    fn from(s: &StepStats) -> Self {
        StepsOut {
            accepted: s.accepted,
            rejected: s.rejected,
            evaluations: s.evaluations,
            min_step: Num(s.min_step),
            max_step: Num(s.max_step),
        }
    }
}

fn interval_out(iv: &Interval) -> [Num; 2] {
    [Num(iv.start), Num(iv.end)]
}

fn path_string(p: Option<&Path>) -> Option<String> {
    p.map(|p| p.display().to_string())
}

fn middle_name(m: MiddleTerm) -> &'static str {
    match m {
        MiddleTerm::FirstDerivative => "first_derivative",
        MiddleTerm::AsPrintedSecondDerivative => "as_printed",
    }
}

const HEADER2: [&str; 6] = ["x", "y1", "y2", "u", "du", "flux"];
const HEADER4: [&str; 11] = ["x", "y1", "y2", "y3", "y4", "u", "du", "d2u", "moment", "shear", "bterm"];

fn sample_points<S, const N: usize>(t: &Trajectory<S, N>, grid: usize, mesh: bool) -> Vec<f64> {
    if mesh {
        t.mesh().to_vec()
    } else {
        let iv = Interval::new(t.start(), t.end()).expect("trajectory spans a proper interval");
        iv.grid(grid).collect()
    }
}

fn rows2(t: &Trajectory<SecondOrderProblem, 2>, xs: &[f64]) -> Result<Vec<Vec<f64>>, CliError> {
    xs.iter()
        .map(|&x| {
            let y = t.state_at(x)?;
            let f = t.fields_at(x)?;
            Ok(vec![x, y[0], y[1], f.u, f.du, f.flux])
        })
        .collect()
}

fn rows4(t: &Trajectory<FourthOrderProblem, 4>, xs: &[f64]) -> Result<Vec<Vec<f64>>, CliError> {
    xs.iter()
        .map(|&x| {
            let y = t.state_at(x)?;
            let f = t.fields_at(x)?;
            Ok(vec![x, y[0], y[1], y[2], y[3], f.u, f.du, f.d2u, f.moment, f.shear, f.bterm])
        })
        .collect()
}

/// Raw quasi-states on a mesh: `x, y1..yN`.
fn write_states(path: &Path, mesh: &[f64], states: &[Vec<f64>]) -> Result<(), CliError> {
    let n = states.first().map_or(0, Vec::len);
    let mut header = vec!["x".to_string()];
    header.extend((1..=n).map(|k| format!("y{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = mesh.iter().zip(states).map(|(&x, y)| {
        let mut row = vec![x];
        row.extend_from_slice(y);
        row
    });
    write_csv(path, &header, rows)
}

#[derive(Serialize)]
struct SolveReport {
    command: &'static str,
    order: &'static str,
    alpha: Num,
    interval: [Num; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    middle_term: Option<&'static str>,
    settings: SettingsOut,
    initial: Vec<Num>,
    final_state: Vec<Num>,
    steps: StepsOut,
    zeros: Vec<Num>,
    csv: Option<String>,
}

fn solve(p: &Problem, out: Option<&Path>, csv: Option<&Path>, mesh: bool) -> Result<u8, CliError> {
    let iv = p.interval;
    let span = (iv.start, iv.end);
    let tol = p.settings.tolerance();
    let report = match p.order {
        Order::Second => {
            let [l, _] = p.second_order_pair()?;
            let y0 = p.initial_state::<2>(0)?;
            let t = integrate(&l, y0, span, &tol)?;
            if let Some(path) = csv {
                let rows = rows2(&t, &sample_points(&t, p.settings.grid, mesh))?;
                write_csv(path, &HEADER2, rows)?;
            }
            SolveReport {
                command: "solve",
                order: "second",
                alpha: Num(p.alpha.get()),
                interval: interval_out(&iv),
                middle_term: None,
                settings: (&p.settings).into(),
                initial: nums(&y0),
                final_state: nums(&t.final_state()),
                steps: t.stats().into(),
                zeros: nums(&find_zeros(&t, 0, ZERO_TOL)?.zeros),
                csv: path_string(csv),
            }
        }
        Order::Fourth => {
            let [l, _] = p.fourth_order_pair()?;
            let y0 = p.initial_state::<4>(0)?;
            let t = integrate(&l, y0, span, &tol)?;
            if let Some(path) = csv {
                let rows = rows4(&t, &sample_points(&t, p.settings.grid, mesh))?;
                write_csv(path, &HEADER4, rows)?;
            }
            SolveReport {
                command: "solve",
                order: "fourth",
                alpha: Num(p.alpha.get()),
                interval: interval_out(&iv),
                middle_term: Some(middle_name(l.middle)),
                settings: (&p.settings).into(),
                initial: nums(&y0),
                final_state: nums(&t.final_state()),
                steps: t.stats().into(),
                zeros: nums(&find_zeros(&t, 0, ZERO_TOL)?.zeros),
                csv: path_string(csv),
            }
        }
        Order::System => return Err(CliError::Input("solve takes a second or fourth order problem".into())),
    };
    emit(out, &to_json(&report))?;
    Ok(0)
}

fn case_spec(p: &Problem, kind: IdentityKind) -> Result<CaseSpec, CliError> {
    let problems = match p.order {
        Order::Second => {
            let problems = p.second_order_pair()?;
            let f = |i: usize| -> Result<FunctionSpec<2>, CliError> {
                Ok(match p.function(i) {
                    Some(e) => FunctionSpec::Expression(e.clone()),
                    None => FunctionSpec::Solution(p.initial_state::<2>(i)?),
                })
            };
            ProblemSet::Second { problems, functions: [f(0)?, f(1)?] }
        }
        Order::Fourth => {
            let problems = p.fourth_order_pair()?;
            let f = |i: usize| -> Result<FunctionSpec<4>, CliError> {
                Ok(match p.function(i) {
                    Some(e) => FunctionSpec::Expression(e.clone()),
                    None => FunctionSpec::Solution(p.initial_state::<4>(i)?),
                })
            };
            ProblemSet::Fourth { problems, functions: [f(0)?, f(1)?] }
        }
        Order::System => {
            let problems = p.system()?;
            let initial = (0..problems.len()).map(|i| p.initial_state::<2>(i)).collect::<Result<Vec<_>, _>>()?;
            ProblemSet::System { problems, initial }
        }
    };
    let mut spec = CaseSpec::new(kind, problems);
    spec.grid = p.settings.grid;
    spec.tolerance = p.settings.tolerance();
    spec.delta_factor = p.settings.delta;
    Ok(spec)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Differential => "diff",
        Mode::Integral => "int",
        Mode::Both => "both",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Anomaly => "anomaly",
    }
}

fn flags_map(kind: &IdentityKind) -> BTreeMap<&'static str, &'static str> {
    kind.flags().into_iter().collect()
}

#[derive(Serialize)]
struct DeltaOut {
    name: String,
    value: Num,
}

#[derive(Serialize)]
struct DeltaBlock {
    factor: Num,
    values: Vec<DeltaOut>,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    kind: &'static str,
    label: &'static str,
    variant: BTreeMap<&'static str, &'static str>,
    alpha: Num,
    interval: [Num; 2],
    grid_n: usize,
    delta: DeltaBlock,
    mode: &'static str,
    threshold: Num,
    verdict: &'static str,
    residual_diff: Num,
    residual_int: Num,
    scale: Num,
    max_abs_f: Num,
    max_abs_r: Num,
    runs: usize,
    excluded: Vec<[Num; 2]>,
    kink_hits: usize,
    notes: Vec<String>,
    settings: SettingsOut,
    samples_csv_path: Option<String>,
}

fn verify_report(
    p: &Problem,
    kind: &IdentityKind,
    r: &IdentityReport,
    mode: Mode,
    csv: Option<&Path>,
) -> (VerifyReport, Verdict) {
    let verdict = r.verdict(mode, p.settings.threshold);
    let report = VerifyReport {
        command: "verify",
        kind: r.tag.name(),
        label: r.tag.label(),
        variant: flags_map(kind),
        alpha: Num(r.alpha),
        interval: [Num(r.interval.0), Num(r.interval.1)],
        grid_n: r.grid_n,
        delta: DeltaBlock {
            factor: Num(p.settings.delta),
            values: r.deltas.iter().map(|d| DeltaOut { name: d.name.clone(), value: Num(d.value) }).collect(),
        },
        mode: mode_name(mode),
        threshold: Num(p.settings.threshold),
        verdict: verdict_name(verdict),
        residual_diff: Num(r.residual_diff),
        residual_int: Num(r.residual_int),
        scale: Num(r.scale),
        max_abs_f: Num(r.max_abs_f),
        max_abs_r: Num(r.max_abs_r),
        runs: r.runs,
        excluded: r.excluded.iter().map(|&(a, b)| [Num(a), Num(b)]).collect(),
        kink_hits: r.kink_hits,
        notes: r.notes.clone(),
        settings: (&p.settings).into(),
        samples_csv_path: path_string(csv),
    };
    (report, verdict)
}

fn verify(p: &Problem, tag: IdentityTag, mode: Mode, out: Option<&Path>, csv: Option<&Path>) -> Result<u8, CliError> {
    let kind = IdentityKind::new(tag, p.variants)?;
    let r = case_spec(p, kind)?.verify()?;
    if let Some(path) = csv {
        write_csv(path, &["x", "F", "dF", "R"], r.samples.iter().map(|s| vec![s.x, s.f, s.df, s.r]))?;
    }
    let (report, verdict) = verify_report(p, &kind, &r, mode, csv);
    emit(out, &to_json(&report))?;
    Ok(if verdict == Verdict::Pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct SweepEntryOut {
    variant: BTreeMap<&'static str, &'static str>,
    verdict: &'static str,
    residual_diff: Option<Num>,
    residual_int: Option<Num>,
    scale: Option<Num>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepReport {
    command: &'static str,
    kind: &'static str,
    label: &'static str,
    mode: &'static str,
    threshold: Num,
    settings: SettingsOut,
    entries: Vec<SweepEntryOut>,
    best: Option<usize>,
    best_variant: Option<BTreeMap<&'static str, &'static str>>,
    best_verdict: Option<&'static str>,
}

fn verify_sweep(p: &Problem, tag: IdentityTag, mode: Mode, out: Option<&Path>) -> Result<u8, CliError> {
    // the sweep spans every flag of the identity, so the file's own flags are ignored
    let spec = case_spec(p, IdentityKind::plain(tag))?;
    let sweep = sweep_variants(&spec);
    let threshold = p.settings.threshold;
    let entries: Vec<SweepEntryOut> = sweep
        .entries
        .iter()
        .map(|e| match &e.outcome {
            Ok(r) => SweepEntryOut {
                variant: flags_map(&e.kind),
                verdict: verdict_name(r.verdict(mode, threshold)),
                residual_diff: Some(Num(r.residual_diff)),
                residual_int: Some(Num(r.residual_int)),
                scale: Some(Num(r.scale)),
                error: None,
            },
            Err(err) => SweepEntryOut {
                variant: flags_map(&e.kind),
                verdict: "error",
                residual_diff: None,
                residual_int: None,
                scale: None,
                error: Some(err.to_string()),
            },
        })
        .collect();
    let best_verdict = sweep.best.map(|i| entries[i].verdict);
    let report = SweepReport {
        command: "verify",
        kind: tag.name(),
        label: tag.label(),
        mode: mode_name(mode),
        threshold: Num(threshold),
        settings: (&p.settings).into(),
        best: sweep.best,
        best_variant: sweep.best_entry().map(|e| flags_map(&e.kind)),
        best_verdict,
        entries,
    };
    emit(out, &to_json(&report))?;
    match best_verdict {
        Some("pass") => Ok(0),
        Some(_) => Ok(1),
        None => Err(CliError::Numerical("no variant could be evaluated".into())),
    }
}

fn theorem_case(p: &Problem, theorem: Theorem) -> Result<TheoremCase, CliError> {
    let problems = match theorem {
        Theorem::T1 | Theorem::T2 => {
            if p.order != Order::Fourth {
                return Err(CliError::Input(format!("theorem {} needs a fourth order problem", theorem.name())));
            }
            if p.variants.middle_term.unwrap_or_default() != MiddleTerm::FirstDerivative {
                return Err(CliError::Input("compare uses the first-derivative middle term only".into()));
            }
            HarnessProblems::Fourth {
                a: p.coef("a", None)?,
                b: p.coef("b", Some("0"))?,
                c: p.coef("c", Some("0"))?,
                comparison: p.comparison_fourth()?,
            }
        }
        Theorem::C3 => {
            if p.order != Order::System {
                return Err(CliError::Input("theorem c3 needs a system problem".into()));
            }
            let (ps, qs) = (p.coefs("p")?, p.coefs("q")?);
            if ps.len() != 3 {
                return Err(CliError::Input(format!("theorem c3 needs three equations, got {}", ps.len())));
            }
            HarnessProblems::System {
                p: [ps[0].clone(), ps[1].clone(), ps[2].clone()],
                q: [qs[0].clone(), qs[1].clone(), qs[2].clone()],
            }
        }
    };
    Ok(TheoremCase::new(theorem, p.alpha, p.interval, problems)?
        .with_samples(p.settings.samples)
        .with_seed(p.settings.seed)
        .with_grid(p.settings.grid)
        .with_condition(p.variants.condition_power.unwrap_or(ConditionPower::VPrime))
        .with_proportional_probes(p.proportional_probes.clone())
        .with_tolerance(p.settings.tolerance()))
}

#[derive(Serialize)]
struct CompareSettings {
    grid: usize,
    rtol: Num,
    atol: Num,
    samples: usize,
    seed: u64,
    multiple_spread: Num,
    multiple_floor: Num,
}

#[derive(Serialize)]
struct InequalityOut {
    name: String,
    holds: bool,
    first_violation: Option<Num>,
    margin: Num,
}

#[derive(Serialize)]
struct ManufacturedOut {
    lambda: Num,
    theta: Option<Num>,
    boundary_residuals: Vec<Num>,
    max_abs: Num,
    initial: Vec<Num>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct Counts {
    zero_found: usize,
    constant_multiple: usize,
    skipped: usize,
    counterexample: usize,
    integration_failed: usize,
}

#[derive(Serialize)]
struct SampleOut {
    index: usize,
    equation: &'static str,
    scale: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<Num>,
    initial: Vec<Num>,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dump: Option<String>,
}

#[derive(Serialize)]
struct CompareReport {
    command: &'static str,
    theorem: &'static str,
    alpha: Num,
    interval: [Num; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_power: Option<&'static str>,
    settings: CompareSettings,
    hypotheses: Vec<InequalityOut>,
    hypotheses_hold: bool,
    manufactured: ManufacturedOut,
    counts: Counts,
    verdict: &'static str,
    samples: Vec<SampleOut>,
}

fn dump_dir(out: Option<&Path>) -> PathBuf {
    out.and_then(Path::parent)
        .filter(|d| !d.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ".".into())
}

fn compare(p: &Problem, theorem: Theorem, out: Option<&Path>, csv: Option<&Path>) -> Result<u8, CliError> {
    let case = theorem_case(p, theorem)?;
    let r: ComparisonReport = verify_conclusion(&case)?;
    let dir = dump_dir(out);
    let mut samples = Vec::with_capacity(r.samples.len());
    for s in &r.samples {
        let mut o = SampleOut {
            index: s.index,
            equation: s.equation,
            scale: Num(s.scale),
            probe: s.probe.map(Num),
            initial: nums(&s.initial),
            outcome: s.outcome.label(),
            x: None,
            ratio: None,
            spread: None,
            message: None,
            dump: None,
        };
        match &s.outcome {
            Outcome::ZeroFound { x } | Outcome::Skipped { x } => o.x = Some(Num(*x)),
            Outcome::ConstantMultiple { ratio, spread } => {
                o.ratio = Some(Num(*ratio));
                o.spread = Some(Num(*spread));
            }
            Outcome::Counterexample { spread, mesh, states } => {
                o.spread = Some(Num(*spread));
                let path = dir.join(format!("counterexample_t{}_s{}_{}.csv", theorem.name(), r.seed, s.index));
                write_states(&path, mesh, states)?;
                o.dump = Some(path.display().to_string());
            }
            Outcome::IntegrationFailed { message } => o.message = Some(message.clone()),
        }
        samples.push(o);
    }
    if let Some(path) = csv {
        write_states(path, &r.manufactured.mesh, &r.manufactured.states)?;
    }
    let counts = Counts {
        zero_found: r.count("zero_found"),
        constant_multiple: r.count("constant_multiple"),
        skipped: r.count("skipped"),
        counterexample: r.count("counterexample"),
        integration_failed: r.count("integration_failed"),
    };
    let (verdict, code) = if !r.hypotheses_hold {
        ("hypotheses_violated", 4)
    } else if counts.counterexample > 0 {
        ("counterexample", 1)
    } else if counts.integration_failed > 0 {
        ("integration_failed", 3)
    } else {
        ("pass", 0)
    };
    let report = CompareReport {
        command: "compare",
        theorem: theorem.name(),
        alpha: Num(r.alpha),
        interval: interval_out(&r.interval),
        condition_power: (theorem == Theorem::T2).then_some(match case.condition {
            ConditionPower::VPrime => "v_prime",
            ConditionPower::AsPrintedV => "as_printed",
        }),
        settings: CompareSettings {
            grid: r.grid,
            rtol: Num(case.tolerance.rel),
            atol: Num(case.tolerance.abs),
            samples: case.samples,
            seed: r.seed,
            multiple_spread: Num(hlpicone_core::sturm::MULTIPLE_SPREAD),
            multiple_floor: Num(hlpicone_core::sturm::MULTIPLE_FLOOR),
        },
        hypotheses: r
            .hypotheses
            .iter()
            .map(|h| InequalityOut {
                name: h.name.clone(),
                holds: h.holds,
                first_violation: h.first_violation.map(Num),
                margin: Num(h.margin),
            })
            .collect(),
        hypotheses_hold: r.hypotheses_hold,
        manufactured: ManufacturedOut {
            lambda: Num(r.manufactured.lambda),
            theta: r.manufactured.theta.map(Num),
            boundary_residuals: nums(&r.manufactured.boundary_residuals),
            max_abs: Num(r.manufactured.max_abs),
            initial: nums(&r.manufactured.initial),
            csv: path_string(csv),
        },
        counts,
        verdict,
        samples,
    };
    emit(out, &to_json(&report))?;
    Ok(code)
}

#[derive(Serialize)]
struct EigenReport {
    command: &'static str,
    order: u8,
    alpha: Num,
    interval: [Num; 2],
    lambda: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<Num>,
    boundary_residuals: Vec<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    newton_iterations: Option<usize>,
    settings: SettingsOut,
    csv: Option<String>,
}

fn eigen(p: &Problem, order: Option<u8>, out: Option<&Path>, csv: Option<&Path>) -> Result<u8, CliError> {
    let file_order = match p.order {
        Order::Second => 2,
        Order::Fourth => 4,
        Order::System => return Err(CliError::Input("eigen takes a second or fourth order problem".into())),
    };
    let order = order.unwrap_or(file_order);
    if order != file_order {
        return Err(CliError::Input(format!(
            "--order {order} does not match the file's {} order problem",
            p.order.name()
        )));
    }
    let tol = p.settings.tolerance();
    let report = if order == 2 {
        let (pc, q0) = (p.coef("p", None)?, p.coef("q", Some("0"))?);
        let r = eigen_shoot_2nd(&pc, &q0, p.alpha, p.interval, &tol)?;
        if let Some(path) = csv {
            let rows = rows2(&r.trajectory, &sample_points(&r.trajectory, p.settings.grid, false))?;
            write_csv(path, &HEADER2, rows)?;
        }
        let m = r.trajectory.max_abs(0);
        EigenReport {
            command: "eigen",
            order,
            alpha: Num(p.alpha.get()),
            interval: interval_out(&p.interval),
            lambda: Num(r.lambda),
            theta: None,
            boundary_residuals: nums(&[r.trajectory.initial_state()[0] / m, r.trajectory.final_state()[0] / m]),
            newton_iterations: None,
            settings: (&p.settings).into(),
            csv: path_string(csv),
        }
    } else {
        let (a, b, c0) = (p.coef("a", None)?, p.coef("b", Some("0"))?, p.coef("c", Some("0"))?);
        let r = eigen_shoot_4th_clamped(&a, &b, p.alpha, p.interval, Some(&c0), &tol)?;
        if let Some(path) = csv {
            let rows = rows4(&r.trajectory, &sample_points(&r.trajectory, p.settings.grid, false))?;
            write_csv(path, &HEADER4, rows)?;
        }
        EigenReport {
            command: "eigen",
            order,
            alpha: Num(p.alpha.get()),
            interval: interval_out(&p.interval),
            lambda: Num(r.lambda),
            theta: Some(Num(r.theta)),
            boundary_residuals: nums(&r.boundary_residuals),
            newton_iterations: Some(r.newton_iterations),
            settings: (&p.settings).into(),
            csv: path_string(csv),
        }
    };
    println!("{}", fmt_num(report.lambda.0));
    if let Some(path) = out {
        emit(Some(path), &to_json(&report))?;
    }
    Ok(0)
}
