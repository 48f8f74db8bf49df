//! Picone-type identities `F' = R` and their numerical verification.
//!
//! Each identity kind pairs a bracket `F(x)` with a right-hand side `R(x)`.
//! With `φ(s) = |s|^(α-1) s`, `Q(X, Y) = |X|^(α+1) + α|Y|^(α+1) - (α+1) X φ(Y)`
//! and `l`, `L` the operators of the two equations:
//!
//! | kind  | `F` |
//! |-------|-----|
//! | `P13` | `(u/v)(v p u' - u P v')` (α = 1, solutions only) |
//! | `P16` | `(u/φ(v))[φ(v) p φ(u') - φ(u) P φ(v')]` |
//! | `P23` | `[u (aφ(u''))' - aφ(u'') u'] + [Aφ(v'') W' - W (Aφ(v''))'] - (u/φ(v))[φ(v) bφ(u') - φ(u) Bφ(v')]`, `W = u φ(u)/φ(v)` |
//! | `P24` | `(u/φ(v))[φ(u)(Aφ(v''))' - φ(v)(aφ(u''))'] + (u'/φ(v'))[φ(v') aφ(u'') - φ(u') Aφ(v'')] + (u/φ(v))[φ(v) bφ(u') - φ(u) Bφ(v')]` |
//! | `P26` | `|u_M|^(α+1) Σ w_k p_k φ(u_k')/φ(u_k)`, `w_k = (-1)^(N-k-1) C(N-1, k)` |
//!
//! Every transcription alternative of a printed formula is selectable
//! through [`Variants`]; the defaults are the self-consistent readings.
//!
//! Verification samples `F` and `R` on a uniform grid, drops points where a
//! denominator is below `δ = factor · sup|denominator|`, and compares `F'`
//! (five-point differences) or `F(b) - F(a)` (Simpson) with `R` on every
//! maximal run of retained points.

mod forms;
mod residual;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use forms::{binomial_weights, p23_inner, FormValue, Point2, Point4};

use crate::error::{Error, Result};
use crate::expr::{CoeffExpr, FourthOrderExprFields, SecondOrderExprFields};
use crate::ode::{
    integrate, FourthOrderProblem, FourthOrderTrajectory, Interval, MiddleTerm, SecondOrderProblem,
    SecondOrderTrajectory, Tolerance,
};
use crate::sgnpow::SignedPowerParam;

pub const DEFAULT_GRID: usize = 2001;
pub const DEFAULT_DELTA_FACTOR: f64 = 1e-6;
/// Shortest run of retained grid points that is verified.
pub const MIN_RUN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityTag {
    P13,
    P16,
    P23,
    P24,
    P26,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 5] =
        [IdentityTag::P13, IdentityTag::P16, IdentityTag::P23, IdentityTag::P24, IdentityTag::P26];

    /// Command-line name: `1.3`, `1.6`, `2.3`, `2.4`, `2.6`.
    pub fn name(self) -> &'static str {
        match self {
            IdentityTag::P13 => "1.3",
            IdentityTag::P16 => "1.6",
            IdentityTag::P23 => "2.3",
            IdentityTag::P24 => "2.4",
            IdentityTag::P26 => "2.6",
        }
    }

    pub fn from_name(s: &str) -> Option<IdentityTag> {
        IdentityTag::ALL.into_iter().find(|t| t.name() == s || t.label() == s)
    }

    pub fn label(self) -> &'static str {
        match self {
            IdentityTag::P13 => "P13",
            IdentityTag::P16 => "P16",
            IdentityTag::P23 => "P23",
            IdentityTag::P24 => "P24",
            IdentityTag::P26 => "P26",
        }
    }
}

/// Power of the leading term of the first `Q`-bracket (`P16`) or of the
/// `(a - A)` term (`P24`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BracketPower {
    /// `|u'|^(α+1)` in `P16`, `|u''|^(α+1)` in `P24`.
    #[default]
    Corrected,
    /// `|u|^(α+1)` in `P16`, `|u'|^(α+1)` in `P24`.
    AsPrinted,
}

/// Power in `B|·|^(α+1) - v'(Aφ(v''))'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionPower {
    #[default]
    VPrime,
    AsPrintedV,
}

/// Second bracket of `P24`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerBracket {
    /// `φ(v') aφ(u'') - φ(u') Aφ(v'')`.
    #[default]
    Undifferentiated,
    /// `φ(v') (aφ(u''))' - φ(u') (Aφ(v''))'`.
    AsPrinted,
}

/// Which member of the family plays `u_M` in `P26`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistinguishedIndex {
    #[default]
    NMinusOne,
    N,
}

/// Explicitly selected variant flags; unset flags take their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Variants {
    pub middle_term: Option<MiddleTerm>,
    pub bracket_power: Option<BracketPower>,
    pub condition_power: Option<ConditionPower>,
    pub inner_bracket: Option<InnerBracket>,
    pub distinguished_index: Option<DistinguishedIndex>,
}

pub const FLAG_KEYS: [&str; 5] =
    ["middle_term", "bracket_power", "condition_power", "inner_bracket", "distinguished_index"];

fn bad_flag(key: &str, value: &str) -> Error {
    Error::InvalidParameter(format!("unknown value {value:?} for variant {key}"))
}

impl Variants {
    /// Sets a flag from its textual `key=value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "middle_term" => {
                self.middle_term = Some(match value {
                    "first_derivative" => MiddleTerm::FirstDerivative,
                    "as_printed" | "second_derivative" => MiddleTerm::AsPrintedSecondDerivative,
                    _ => return Err(bad_flag(key, value)),
                })
            }
            "bracket_power" => {
                self.bracket_power = Some(match value {
                    "corrected" => BracketPower::Corrected,
                    "as_printed" => BracketPower::AsPrinted,
                    _ => return Err(bad_flag(key, value)),
                })
            }
            "condition_power" => {
                self.condition_power = Some(match value {
                    "v_prime" => ConditionPower::VPrime,
                    "as_printed" | "v" => ConditionPower::AsPrintedV,
                    _ => return Err(bad_flag(key, value)),
                })
            }
            "inner_bracket" => {
                self.inner_bracket = Some(match value {
                    "undifferentiated" => InnerBracket::Undifferentiated,
                    "as_printed" => InnerBracket::AsPrinted,
                    _ => return Err(bad_flag(key, value)),
                })
            }
            "distinguished_index" => {
                self.distinguished_index = Some(match value {
                    "n_minus_one" => DistinguishedIndex::NMinusOne,
                    "n" => DistinguishedIndex::N,
                    _ => return Err(bad_flag(key, value)),
                })
            }
            _ => return Err(Error::InvalidParameter(format!("unknown variant flag {key:?}"))),
        }
        Ok(())
    }

    fn is_set(&self, key: &str) -> bool {
        match key {
            "middle_term" => self.middle_term.is_some(),
            "bracket_power" => self.bracket_power.is_some(),
            "condition_power" => self.condition_power.is_some(),
            "inner_bracket" => self.inner_bracket.is_some(),
            _ => self.distinguished_index.is_some(),
        }
    }
}

fn owns(tag: IdentityTag, key: &str) -> bool {
    use IdentityTag::*;
    matches!(
        (key, tag),
        ("middle_term", P23 | P24)
            | ("bracket_power", P16 | P24)
            | ("condition_power", P24)
            | ("inner_bracket", P24)
            | ("distinguished_index", P26)
    )
}

/// An identity with validated variant flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityKind {
    tag: IdentityTag,
    variants: Variants,
}

impl IdentityKind {
    /// Rejects flags set on a kind that does not own them.
    pub fn new(tag: IdentityTag, variants: Variants) -> Result<IdentityKind> {
        for key in FLAG_KEYS {
            if variants.is_set(key) && !owns(tag, key) {
                return Err(Error::InvalidParameter(format!(
                    "variant {key} does not apply to identity {}",
                    tag.name()
                )));
            }
        }
        Ok(IdentityKind { tag, variants })
    }

    pub fn plain(tag: IdentityTag) -> IdentityKind {
        IdentityKind { tag, variants: Variants::default() }
    }

    pub fn tag(&self) -> IdentityTag {
        self.tag
    }

    pub fn middle_term(&self) -> MiddleTerm {
        self.variants.middle_term.unwrap_or_default()
    }

    pub fn bracket_power(&self) -> BracketPower {
        self.variants.bracket_power.unwrap_or_default()
    }

    pub fn condition_power(&self) -> ConditionPower {
        self.variants.condition_power.unwrap_or_default()
    }

    pub fn inner_bracket(&self) -> InnerBracket {
        self.variants.inner_bracket.unwrap_or_default()
    }

    pub fn distinguished_index(&self) -> DistinguishedIndex {
        self.variants.distinguished_index.unwrap_or_default()
    }

    /// The flags this kind owns with their resolved values, in a fixed order.
    pub fn flags(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        for key in FLAG_KEYS {
            if !owns(self.tag, key) {
                continue;
            }
            let value = match key {
                "middle_term" => match self.middle_term() {
                    MiddleTerm::FirstDerivative => "first_derivative",
                    MiddleTerm::AsPrintedSecondDerivative => "as_printed",
                },
                "bracket_power" => match self.bracket_power() {
                    BracketPower::Corrected => "corrected",
                    BracketPower::AsPrinted => "as_printed",
                },
                "condition_power" => match self.condition_power() {
                    ConditionPower::VPrime => "v_prime",
                    ConditionPower::AsPrintedV => "as_printed",
                },
                "inner_bracket" => match self.inner_bracket() {
                    InnerBracket::Undifferentiated => "undifferentiated",
                    InnerBracket::AsPrinted => "as_printed",
                },
                _ => match self.distinguished_index() {
                    DistinguishedIndex::NMinusOne => "n_minus_one",
                    DistinguishedIndex::N => "n",
                },
            };
            out.push((key, value));
        }
        out
    }

    /// Every combination of the flags owned by `tag`, defaults first.
    pub fn all_variants(tag: IdentityTag) -> Vec<IdentityKind> {
        let mut out = vec![Variants::default()];
        for key in FLAG_KEYS {
            if !owns(tag, key) {
                continue;
            }
            let values: &[&str] = match key {
                "middle_term" => &["first_derivative", "as_printed"],
                "bracket_power" => &["corrected", "as_printed"],
                "condition_power" => &["v_prime", "as_printed"],
                "inner_bracket" => &["undifferentiated", "as_printed"],
                _ => &["n_minus_one", "n"],
            };
            let mut next = Vec::new();
            for base in &out {
                for v in values {
                    let mut var = *base;
                    var.set(key, v).expect("flag values are valid");
                    next.push(var);
                }
            }
            out = next;
        }
        out.into_iter().map(|variants| IdentityKind { tag, variants }).collect()
    }
}

/// How a function entering an identity is supplied before preparation.
#[derive(Debug, Clone)]
pub enum FunctionSpec<const N: usize> {
    /// Solution of its equation from this quasi-state at the interval start.
    Solution([f64; N]),
    /// An arbitrary function; operator terms are computed exactly.
    Expression(CoeffExpr),
}

#[derive(Debug, Clone)]
pub enum ProblemSet {
    Second {
        problems: [SecondOrderProblem; 2],
        functions: [FunctionSpec<2>; 2],
    },
    Fourth {
        problems: [FourthOrderProblem; 2],
        functions: [FunctionSpec<4>; 2],
    },
    /// `N` equations with solutions from the given initial quasi-states.
    System {
        problems: Vec<SecondOrderProblem>,
        initial: Vec<[f64; 2]>,
    },
}

/// An identity case before integration: every variant can be re-prepared
/// from it, including those that change the equations themselves.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub kind: IdentityKind,
    pub problems: ProblemSet,
    pub grid: usize,
    pub tolerance: Tolerance,
    pub delta_factor: f64,
}

impl CaseSpec {
    pub fn new(kind: IdentityKind, problems: ProblemSet) -> CaseSpec {
        CaseSpec {
            kind,
            problems,
            grid: DEFAULT_GRID,
            tolerance: Tolerance::default(),
            delta_factor: DEFAULT_DELTA_FACTOR,
        }
    }

    pub fn with_kind(&self, kind: IdentityKind) -> CaseSpec {
        CaseSpec { kind, ..self.clone() }
    }

    /// Integrates solution inputs and builds expression fields.
    pub fn prepare(&self) -> Result<IdentityCase> {
        let kind = self.kind;
        let inputs = match &self.problems {
            ProblemSet::Second { problems, functions } => {
                let mut sources = Vec::with_capacity(2);
                for (pr, f) in problems.iter().zip(functions) {
                    sources.push(match f {
                        FunctionSpec::Solution(y0) => Source2::Solution(integrate(
                            pr,
                            *y0,
                            (pr.interval.start, pr.interval.end),
                            &self.tolerance,
                        )?),
                        FunctionSpec::Expression(e) => {
                            Source2::Expression(SecondOrderExprFields::new(&pr.p, &pr.q, pr.alpha, e))
                        }
                    });
                }
                let v = sources.pop().expect("two sources");
                let u = sources.pop().expect("two sources");
                Inputs::Second { problems: problems.clone(), sources: [u, v] }
            }
            ProblemSet::Fourth { problems, functions } => {
                let middle = kind.middle_term();
                let problems = [problems[0].with_middle(middle), problems[1].with_middle(middle)];
                let mut sources = Vec::with_capacity(2);
                for (pr, f) in problems.iter().zip(functions) {
                    sources.push(match f {
                        FunctionSpec::Solution(y0) => Source4::Solution(integrate(
                            pr,
                            *y0,
                            (pr.interval.start, pr.interval.end),
                            &self.tolerance,
                        )?),
                        FunctionSpec::Expression(e) => {
                            Source4::Expression(FourthOrderExprFields::new(&pr.a, &pr.b, &pr.c, pr.alpha, middle, e))
                        }
                    });
                }
                let v = sources.pop().expect("two sources");
                let u = sources.pop().expect("two sources");
                Inputs::Fourth { problems, sources: [u, v] }
            }
            ProblemSet::System { problems, initial } => {
                if problems.len() != initial.len() {
                    return Err(Error::InvalidParameter(format!(
                        "{} equations but {} initial states",
                        problems.len(),
                        initial.len()
                    )));
                }
                let mut trajectories = Vec::with_capacity(problems.len());
                for (pr, y0) in problems.iter().zip(initial) {
                    trajectories.push(integrate(pr, *y0, (pr.interval.start, pr.interval.end), &self.tolerance)?);
                }
                Inputs::System { problems: problems.clone(), trajectories }
            }
        };
        IdentityCase::new(kind, inputs, self.grid, self.delta_factor)
    }

    pub fn verify(&self) -> Result<IdentityReport> {
        self.prepare()?.verify()
    }
}

#[derive(Debug, Clone)]
pub enum Source2 {
    Solution(SecondOrderTrajectory),
    Expression(SecondOrderExprFields),
}

#[derive(Debug, Clone)]
pub enum Source4 {
    Solution(FourthOrderTrajectory),
    Expression(FourthOrderExprFields),
}

impl Source2 {
    fn at(&self, pr: &SecondOrderProblem, x: f64) -> Result<(Point2, usize)> {
        let (p, q) = (pr.p.eval(x)?, pr.q.eval(x)?);
        Ok(match self {
            Source2::Solution(t) => {
                let f = t.fields_at(x)?;
                (Point2 { u: f.u, du: f.du, flux: f.flux, op: 0.0, p, q }, 0)
            }
            Source2::Expression(e) => {
                let f = e.at(x)?;
                (Point2 { u: f.u, du: f.du, flux: f.flux, op: f.op, p, q }, f.kink_hits)
            }
        })
    }

    fn is_solution(&self) -> bool {
        matches!(self, Source2::Solution(_))
    }
}

impl Source4 {
    fn at(&self, pr: &FourthOrderProblem, x: f64) -> Result<(Point4, usize)> {
        let (a, b, c) = (pr.a.eval(x)?, pr.b.eval(x)?, pr.c.eval(x)?);
        Ok(match self {
            Source4::Solution(t) => {
                let f = t.fields_at(x)?;
                let pt = Point4 {
                    u: f.u,
                    du: f.du,
                    d2u: f.d2u,
                    moment: f.moment,
                    shear: f.shear,
                    bterm: f.bterm,
                    op: 0.0,
                    a,
                    b,
                    c,
                };
                (pt, 0)
            }
            Source4::Expression(e) => {
                let f = e.at(x)?;
                let pt = Point4 {
                    u: f.u,
                    du: f.du,
                    d2u: f.d2u,
                    moment: f.moment,
                    shear: f.shear,
                    bterm: f.bterm,
                    op: f.op,
                    a,
                    b,
                    c,
                };
                (pt, f.kink_hits)
            }
        })
    }
}

/// Prepared inputs of an identity case.
#[derive(Debug, Clone)]
pub enum Inputs {
    Second { problems: [SecondOrderProblem; 2], sources: [Source2; 2] },
    Fourth { problems: [FourthOrderProblem; 2], sources: [Source4; 2] },
    System { problems: Vec<SecondOrderProblem>, trajectories: Vec<SecondOrderTrajectory> },
}

/// Exclusion threshold for one denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub name: String,
    pub value: f64,
}

struct PointEval {
    value: FormValue,
    denominators: Vec<f64>,
    kink_hits: usize,
}

/// A prepared identity case: inputs, grid and exclusion thresholds.
#[derive(Debug, Clone)]
pub struct IdentityCase {
    kind: IdentityKind,
    alpha: SignedPowerParam,
    interval: Interval,
    inputs: Inputs,
    grid: usize,
    deltas: Vec<Delta>,
    weights: Vec<f64>,
}

impl IdentityCase {
    pub fn new(kind: IdentityKind, inputs: Inputs, grid: usize, delta_factor: f64) -> Result<IdentityCase> {
        if grid < MIN_RUN {
            return Err(Error::InvalidParameter(format!("grid must have at least {MIN_RUN} points, got {grid}")));
        }
        if !(delta_factor >= 0.0 && delta_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta factor {delta_factor}")));
        }
        let tag = kind.tag();
        let (alphas, intervals): (Vec<SignedPowerParam>, Vec<Interval>) = match &inputs {
            Inputs::Second { problems, .. } => problems.iter().map(|p| (p.alpha, p.interval)).unzip(),
            Inputs::Fourth { problems, .. } => problems.iter().map(|p| (p.alpha, p.interval)).unzip(),
            Inputs::System { problems, .. } => problems.iter().map(|p| (p.alpha, p.interval)).unzip(),
        };
        match (&inputs, tag) {
            (Inputs::Second { .. }, IdentityTag::P13 | IdentityTag::P16) => {}
            (Inputs::Fourth { .. }, IdentityTag::P23 | IdentityTag::P24) => {}
            (Inputs::System { problems, trajectories }, IdentityTag::P26) => {
                if problems.len() < 2 || problems.len() != trajectories.len() {
                    return Err(Error::Precondition(format!(
                        "identity 2.6 needs N >= 2 equations with one solution each, got {} and {}",
                        problems.len(),
                        trajectories.len()
                    )));
                }
            }
            _ => return Err(Error::Precondition(format!("identity {} does not take these inputs", tag.name()))),
        }
        let alpha = alphas[0];
        if alphas.iter().any(|a| *a != alpha) {
            return Err(Error::Precondition("all equations must share alpha".into()));
        }
        let interval = intervals[0];
        if intervals.iter().any(|i| *i != interval) {
            return Err(Error::Precondition("all equations must share the interval".into()));
        }
        if tag == IdentityTag::P13 {
            if !alpha.is_linear() {
                return Err(Error::Precondition(format!("identity 1.3 is linear; alpha = {}", alpha.get())));
            }
            if let Inputs::Second { sources, .. } = &inputs {
                if !sources.iter().all(Source2::is_solution) {
                    return Err(Error::Precondition(
                        "identity 1.3 takes solutions only; use 1.6 at alpha = 1 for arbitrary functions".into(),
                    ));
                }
            }
        }
        let weights = match &inputs {
            Inputs::System { problems, .. } => binomial_weights(problems.len()),
            _ => Vec::new(),
        };
        let names: Vec<String> = match &inputs {
            Inputs::System { problems, .. } => (1..=problems.len()).map(|k| format!("u{k}")).collect(),
            _ if tag == IdentityTag::P24 => vec!["v".into(), "v'".into()],
            _ => vec!["v".into()],
        };
        let mut case = IdentityCase {
            kind,
            alpha,
            interval,
            inputs,
            grid,
            deltas: names.into_iter().map(|name| Delta { name, value: 0.0 }).collect(),
            weights,
        };
        let mut sup = vec![0.0f64; case.deltas.len()];
        for x in interval.grid(grid) {
            for (s, d) in sup.iter_mut().zip(case.denominators(x)?) {
                *s = libm::fmax(*s, libm::fabs(d));
            }
        }
        for (d, s) in case.deltas.iter_mut().zip(sup) {
            d.value = delta_factor * s;
        }
        Ok(case)
    }

    pub fn kind(&self) -> IdentityKind {
        self.kind
    }

    pub fn alpha(&self) -> SignedPowerParam {
        self.alpha
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn deltas(&self) -> &[Delta] {
        &self.deltas
    }

    pub fn inputs(&self) -> &Inputs {
        &self.inputs
    }

    fn distinguished(&self, n: usize) -> usize {
        match self.kind.distinguished_index() {
            DistinguishedIndex::NMinusOne => n - 2,
            DistinguishedIndex::N => n - 1,
        }
    }

    fn denominators(&self, x: f64) -> Result<Vec<f64>> {
        Ok(match &self.inputs {
            Inputs::Second { problems, sources } => vec![sources[1].at(&problems[1], x)?.0.u],
            Inputs::Fourth { problems, sources } => {
                let v = sources[1].at(&problems[1], x)?.0;
                if self.kind.tag() == IdentityTag::P24 {
                    vec![v.u, v.du]
                } else {
                    vec![v.u]
                }
            }
            Inputs::System { trajectories, .. } => {
                let mut out = Vec::with_capacity(trajectories.len());
                for t in trajectories {
                    out.push(t.state_at(x)?[0]);
                }
                out
            }
        })
    }

    fn eval_point(&self, x: f64) -> Result<PointEval> {
        let al = self.alpha;
        let k = self.kind;
        Ok(match &self.inputs {
            Inputs::Second { problems, sources } => {
                let (u, ku) = sources[0].at(&problems[0], x)?;
                let (v, kv) = sources[1].at(&problems[1], x)?;
                let value = match k.tag() {
                    IdentityTag::P13 => forms::p13(&u, &v),
                    _ => forms::p16(al, k.bracket_power(), &u, &v),
                };
                PointEval { value, denominators: vec![v.u], kink_hits: ku + kv }
            }
            Inputs::Fourth { problems, sources } => {
                let (u, ku) = sources[0].at(&problems[0], x)?;
                let (v, kv) = sources[1].at(&problems[1], x)?;
                match k.tag() {
                    IdentityTag::P23 => {
                        PointEval { value: forms::p23(al, &u, &v), denominators: vec![v.u], kink_hits: ku + kv }
                    }
                    _ => PointEval {
                        value: forms::p24(al, k.bracket_power(), k.condition_power(), k.inner_bracket(), &u, &v),
                        denominators: vec![v.u, v.du],
                        kink_hits: ku + kv,
                    },
                }
            }
            Inputs::System { problems, trajectories } => {
                let mut pts = Vec::with_capacity(problems.len());
                for (pr, t) in problems.iter().zip(trajectories) {
                    let f = t.fields_at(x)?;
                    pts.push(Point2 { u: f.u, du: f.du, flux: f.flux, op: 0.0, p: pr.p.eval(x)?, q: pr.q.eval(x)? });
                }
                let m = self.distinguished(pts.len());
                PointEval {
                    value: forms::p26(al, &self.weights, m, &pts),
                    denominators: pts.iter().map(|p| p.u).collect(),
                    kink_hits: 0,
                }
            }
        })
    }

    fn excluded_by(&self, e: &PointEval) -> Option<usize> {
        e.denominators.iter().zip(&self.deltas).position(|(d, delta)| !(libm::fabs(*d) >= delta.value && *d != 0.0))
    }

    fn checked(&self, x: f64) -> Result<FormValue> {
        if !self.interval.contains(x) {
            return Err(Error::Precondition(format!("x = {x} outside the case interval")));
        }
        let e = self.eval_point(x)?;
        if let Some(i) = self.excluded_by(&e) {
            return Err(Error::Precondition(format!(
                "|{}| = {} below delta {} at x = {x}",
                self.deltas[i].name,
                libm::fabs(e.denominators[i]),
                self.deltas[i].value
            )));
        }
        Ok(e.value)
    }

    /// The bracket `F(x)`.
    pub fn bracket(&self, x: f64) -> Result<f64> {
        self.checked(x).map(|v| v.f)
    }

    /// The right-hand side `R(x)`.
    pub fn rhs(&self, x: f64) -> Result<f64> {
        self.checked(x).map(|v| v.r)
    }

    /// Both residual modes on the case grid.
    pub fn verify(&self) -> Result<IdentityReport> {
        let n = self.grid;
        let h = self.interval.len() / (n - 1) as f64;
        let xs: Vec<f64> = self.interval.grid(n).collect();
        let mut values = Vec::with_capacity(n);
        let mut dens: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut keep = Vec::with_capacity(n);
        let mut kink_hits = 0;
        let mut notes = Vec::new();
        let mut nonfinite = 0usize;
        for &x in &xs {
            let e = self.eval_point(x)?;
            kink_hits += e.kink_hits;
            let ok_den = self.excluded_by(&e).is_none();
            let finite = e.value.f.is_finite() && e.value.r.is_finite();
            if ok_den && !finite {
                nonfinite += 1;
            }
            keep.push(ok_den && finite);
            values.push(e.value);
            dens.push(e.denominators);
        }
        if nonfinite > 0 {
            notes.push(format!("{nonfinite} grid points with non-finite F or R excluded"));
        }

        // A denominator changing sign between neighbours vanishes in between:
        // no run may straddle that point.
        let mut split_after = vec![false; n];
        for i in 0..n - 1 {
            if !(keep[i] && keep[i + 1]) {
                continue;
            }
            if let Some(k) = dens[i].iter().zip(&dens[i + 1]).position(|(a, b)| (*a < 0.0) != (*b < 0.0)) {
                split_after[i] = true;
                notes.push(format!(
                    "{} changes sign in ({}, {}); runs split there",
                    self.deltas[k].name,
                    xs[i],
                    xs[i + 1]
                ));
            }
        }

        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < n {
            if keep[i] {
                let s = i;
                i += 1;
                while i < n && keep[i] && !split_after[i - 1] {
                    i += 1;
                }
                runs.push((s, i));
            } else {
                i += 1;
            }
        }
        let mut short = 0usize;
        runs.retain(|&(s, e)| {
            if e - s < MIN_RUN {
                for k in &mut keep[s..e] {
                    *k = false;
                }
                short += 1;
                false
            } else {
                true
            }
        });
        if short > 0 {
            notes.push(format!("{short} runs shorter than {MIN_RUN} points excluded"));
        }
        if runs.is_empty() {
            return Err(Error::EmptyDomain(format!(
                "identity {}: every grid point is excluded",
                self.kind.tag().name()
            )));
        }

        let mut excluded = Vec::new();
        let mut i = 0;
        while i < n {
            if !keep[i] {
                let s = i;
                while i < n && !keep[i] {
                    i += 1;
                }
                excluded.push((xs[s], xs[i - 1]));
            } else {
                i += 1;
            }
        }

        let mut max_f = 0.0f64;
        let mut max_r = 0.0f64;
        for (v, k) in values.iter().zip(&keep) {
            if *k {
                max_f = libm::fmax(max_f, libm::fabs(v.f));
                max_r = libm::fmax(max_r, libm::fabs(v.r));
            }
        }
        let scale = 1.0 + max_f + max_r;

        let mut samples = Vec::new();
        let mut sup_diff = 0.0f64;
        let mut sum_int = 0.0;
        for &(s, e) in &runs {
            let f: Vec<f64> = values[s..e].iter().map(|v| v.f).collect();
            let r: Vec<f64> = values[s..e].iter().map(|v| v.r).collect();
            let df = residual::derivative(&f, h);
            for j in 0..f.len() {
                sup_diff = libm::fmax(sup_diff, libm::fabs(df[j] - r[j]));
                samples.push(Sample { x: xs[s + j], f: f[j], df: df[j], r: r[j] });
            }
            sum_int += libm::fabs(f[f.len() - 1] - f[0] - residual::integrate(&r, h));
        }

        if self.kind.tag() == IdentityTag::P26 {
            if let Inputs::System { problems, .. } = &self.inputs {
                if problems.len() == 2 {
                    notes.push("N = 2: F and R are -1 times those of identity 1.6 for (u, v) = (u1, u2)".into());
                }
            }
        }
        if kink_hits > 0 {
            notes.push(format!("{kink_hits} kink evaluations (abs/sign/abspow at 0) in expression inputs"));
        }

        Ok(IdentityReport {
            tag: self.kind.tag(),
            flags: self.kind.flags(),
            alpha: self.alpha.get(),
            interval: (self.interval.start, self.interval.end),
            grid_n: n,
            deltas: self.deltas.clone(),
            residual_diff: sup_diff / scale,
            residual_int: sum_int / scale,
            scale,
            max_abs_f: max_f,
            max_abs_r: max_r,
            samples,
            excluded,
            runs: runs.len(),
            kink_hits,
            notes,
        })
    }
}

/// One retained grid point: `F`, its difference estimate `F'` and `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub f: f64,
    pub df: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Differential,
    Integral,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The two residual modes disagree.
    Anomaly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub tag: IdentityTag,
    pub flags: Vec<(&'static str, &'static str)>,
    pub alpha: f64,
    pub interval: (f64, f64),
    pub grid_n: usize,
    pub deltas: Vec<Delta>,
    /// `sup |F' - R| / scale` over retained points.
    pub residual_diff: f64,
    /// `Σ_runs |F(end) - F(start) - ∫R| / scale`.
    pub residual_int: f64,
    /// `1 + max|F| + max|R|`.
    pub scale: f64,
    pub max_abs_f: f64,
    pub max_abs_r: f64,
    pub samples: Vec<Sample>,
    /// Maximal excluded grid stretches as `(first, last)` abscissas.
    pub excluded: Vec<(f64, f64)>,
    pub runs: usize,
    pub kink_hits: usize,
    pub notes: Vec<String>,
}

impl IdentityReport {
    /// Residuals are compared with `threshold` (already relative to `scale`).
    pub fn verdict(&self, mode: Mode, threshold: f64) -> Verdict {
        let d = self.residual_diff <= threshold;
        let i = self.residual_int <= threshold;
        match mode {
            Mode::Differential if d => Verdict::Pass,
            Mode::Integral if i => Verdict::Pass,
            Mode::Differential | Mode::Integral => Verdict::Fail,
            Mode::Both => match (d, i) {
                (true, true) => Verdict::Pass,
                (false, false) => Verdict::Fail,
                _ => Verdict::Anomaly,
            },
        }
    }

    pub fn worst_residual(&self) -> f64 {
        libm::fmax(self.residual_diff, self.residual_int)
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub kind: IdentityKind,
    pub outcome: Result<IdentityReport>,
}

#[derive(Debug, Clone)]
pub struct VariantSweep {
    pub entries: Vec<SweepEntry>,
    /// Entry with the smallest worst-mode residual.
    pub best: Option<usize>,
}

impl VariantSweep {
    pub fn best_entry(&self) -> Option<&SweepEntry> {
        self.best.map(|i| &self.entries[i])
    }
}

/// Verifies `spec` under every variant combination of its identity.
pub fn sweep_variants(spec: &CaseSpec) -> VariantSweep {
    let mut entries = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for kind in IdentityKind::all_variants(spec.kind.tag()) {
        let outcome = spec.with_kind(kind).verify();
        if let Ok(r) = &outcome {
            let w = r.worst_residual();
            if best.is_none_or(|(_, b)| w < b) {
                best = Some((entries.len(), w));
            }
        }
        entries.push(SweepEntry { kind, outcome });
    }
    VariantSweep { entries, best: best.map(|(i, _)| i) }
}
