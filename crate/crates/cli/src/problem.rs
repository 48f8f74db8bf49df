//! Problem files: a strict JSON schema and its translation into core types.

use std::collections::BTreeMap;
use std::path::Path;

use hlpicone_core::expr::CoeffExpr;
use hlpicone_core::ode::{FourthOrderProblem, Interval, SecondOrderProblem, Tolerance};
use hlpicone_core::picone::{Variants, DEFAULT_DELTA_FACTOR, DEFAULT_GRID};
use hlpicone_core::sturm::DEFAULT_SAMPLES;
use hlpicone_core::SignedPowerParam;
use serde::Deserialize;

use crate::CliError;

/// Residual threshold (relative to the report scale) when the file sets none.
pub const DEFAULT_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Second,
    Fourth,
    System,
}

impl Order {
    pub fn name(self) -> &'static str {
        match self {
            Order::Second => "second",
            Order::Fourth => "fourth",
            Order::System => "system",
        }
    }
}

/// An interval end: a number or a constant expression such as `"pi/2"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub p: Option<Coef>,
    pub q: Option<Coef>,
    pub a: Option<Coef>,
    pub b: Option<Coef>,
    pub c: Option<Coef>,
}

/// Coefficients of the second equation of a pair.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondCoefficients {
    #[serde(rename = "P")]
    pub p: Option<String>,
    #[serde(rename = "Q")]
    pub q: Option<String>,
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[serde(rename = "B")]
    pub b: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub alpha: f64,
    pub interval: [Bound; 2],
    pub order: Order,
    pub coefficients: Coefficients,
    pub second: Option<SecondCoefficients>,
    #[serde(default)]
    pub variants: BTreeMap<String, String>,
    /// Quasi-states at the interval start, one per function.
    pub initial: Option<Vec<Vec<f64>>>,
    /// Expression inputs; a non-null entry replaces the matching solution.
    pub functions: Option<Vec<Option<String>>>,
    pub grid: Option<usize>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub delta: Option<f64>,
    pub threshold: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub proportional_probes: Option<Vec<f64>>,
}

/// Effective numerical settings; every report prints them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub grid: usize,
    pub rtol: f64,
    pub atol: f64,
    pub delta: f64,
    pub threshold: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Settings {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rtol, self.atol)
    }
}

/// A validated problem file with every coefficient parsed.
#[derive(Debug, Clone)]
pub struct Problem {
    pub alpha: SignedPowerParam,
    pub interval: Interval,
    pub order: Order,
    pub variants: Variants,
    pub settings: Settings,
    pub initial: Vec<Vec<f64>>,
    pub functions: Vec<Option<CoeffExpr>>,
    pub proportional_probes: Vec<f64>,
    first: BTreeMap<&'static str, Vec<CoeffExpr>>,
    second: BTreeMap<&'static str, CoeffExpr>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn parse_coef(name: &str, text: &str) -> Result<CoeffExpr, CliError> {
    CoeffExpr::parse(text).map_err(|e| input(format!("coefficient {name} = {text:?}: {e}")))
}

fn bound(b: &Bound, which: &str) -> Result<f64, CliError> {
    match b {
        Bound::Number(x) => Ok(*x),
        Bound::Expr(s) => {
            let e = parse_coef(which, s)?;
            if e.node().depends_on_x() {
                return Err(input(format!("interval {which} must be constant, got {s:?}")));
            }
            e.eval(0.0).map_err(|err| input(format!("interval {which}: {err}")))
        }
    }
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Problem::from_json(&text).map_err(|e| match e {
            CliError::Input(m) => input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Problem, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| input(format!("schema: {e}")))?;
        Problem::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Problem, CliError> {
        if !(file.alpha > 0.0) || !file.alpha.is_finite() {
            return Err(input(format!("alpha must be positive, got {}", file.alpha)));
        }
        let alpha = SignedPowerParam::new(file.alpha).map_err(|e| input(e.to_string()))?;
        let (x0, x1) = (bound(&file.interval[0], "start")?, bound(&file.interval[1], "end")?);
        if !(x0 < x1) {
            return Err(input(format!("interval must satisfy x0 < x1, got [{x0}, {x1}]")));
        }
        let interval = Interval::new(x0, x1).map_err(|e| input(e.to_string()))?;

        let mut first = BTreeMap::new();
        let c = &file.coefficients;
        for (name, coef) in [("p", &c.p), ("q", &c.q), ("a", &c.a), ("b", &c.b), ("c", &c.c)] {
            let Some(coef) = coef else { continue };
            let parsed = match coef {
                Coef::One(s) => vec![parse_coef(name, s)?],
                Coef::Many(list) => list
                    .iter()
                    .enumerate()
                    .map(|(k, s)| parse_coef(&format!("{name}[{k}]"), s))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            first.insert(name, parsed);
        }
        let allowed: &[&str] = match file.order {
            Order::Second | Order::System => &["p", "q"],
            Order::Fourth => &["a", "b", "c"],
        };
        if let Some(k) = first.keys().find(|k| !allowed.contains(k)) {
            return Err(input(format!("coefficient {k} does not belong to a {} order problem", file.order.name())));
        }
        for (k, v) in &first {
            let many = matches!(file.order, Order::System);
            if many && v.len() < 2 {
                return Err(input(format!("system coefficient {k} needs an array of at least two entries")));
            }
            if !many && v.len() != 1 {
                return Err(input(format!("coefficient {k} must be a single expression")));
            }
        }
        if file.order == Order::System {
            let lens: Vec<usize> = first.values().map(Vec::len).collect();
            if lens.windows(2).any(|w| w[0] != w[1]) {
                return Err(input("system coefficient arrays differ in length"));
            }
        }

        let mut second = BTreeMap::new();
        if let Some(s) = &file.second {
            if file.order == Order::System {
                return Err(input("a system takes no `second` member"));
            }
            for (name, text) in [("P", &s.p), ("Q", &s.q), ("A", &s.a), ("B", &s.b), ("C", &s.c)] {
                let Some(text) = text else { continue };
                let ok = match file.order {
                    Order::Second => matches!(name, "P" | "Q"),
                    _ => matches!(name, "A" | "B" | "C"),
                };
                if !ok {
                    return Err(input(format!(
                        "coefficient {name} does not belong to a {} order problem",
                        file.order.name()
                    )));
                }
                second.insert(name, parse_coef(name, text)?);
            }
        }

        let mut variants = Variants::default();
        for (k, v) in &file.variants {
            variants.set(k, v).map_err(|e| input(format!("variants: {e}")))?;
        }

        let functions = match &file.functions {
            None => Vec::new(),
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, f)| f.as_ref().map(|s| parse_coef(&format!("functions[{i}]"), s)).transpose())
                .collect::<Result<Vec<_>, _>>()?,
        };

        let settings = Settings {
            grid: file.grid.unwrap_or(DEFAULT_GRID),
            rtol: file.rtol.unwrap_or(Tolerance::default().rel),
            atol: file.atol.unwrap_or(Tolerance::default().abs),
            delta: file.delta.unwrap_or(DEFAULT_DELTA_FACTOR),
            threshold: file.threshold.unwrap_or(DEFAULT_THRESHOLD),
            samples: file.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: file.seed.unwrap_or(0),
        };
        if settings.grid < 5 {
            return Err(input(format!("grid must have at least 5 points, got {}", settings.grid)));
        }
        if !(settings.rtol >= 0.0 && settings.atol >= 0.0 && settings.rtol + settings.atol > 0.0) {
            return Err(input("rtol and atol must be nonnegative and not both zero"));
        }
        if !(settings.delta >= 0.0) || !(settings.threshold >= 0.0) {
            return Err(input("delta and threshold must be nonnegative"));
        }

        Ok(Problem {
            alpha,
            interval,
            order: file.order,
            variants,
            settings,
            initial: file.initial.unwrap_or_default(),
            functions,
            proportional_probes: file.proportional_probes.unwrap_or_default(),
            first,
            second,
        })
    }

    /// A single coefficient of the first equation; `default` when absent.
    pub fn coef(&self, name: &str, default: Option<&str>) -> Result<CoeffExpr, CliError> {
        match self.first.get(name) {
            Some(v) => Ok(v[0].clone()),
            None => match default {
                Some(d) => parse_coef(name, d),
                None => Err(input(format!("missing coefficient {name}"))),
            },
        }
    }

    /// Coefficient arrays of a system.
    pub fn coefs(&self, name: &str) -> Result<Vec<CoeffExpr>, CliError> {
        self.first.get(name).cloned().ok_or_else(|| input(format!("missing coefficient array {name}")))
    }

    fn second_coef(&self, name: &str, fallback: &str) -> Result<CoeffExpr, CliError> {
        match self.second.get(name) {
            Some(e) => Ok(e.clone()),
            None => self.coef(fallback, if fallback == "p" || fallback == "a" { None } else { Some("0") }),
        }
    }

    pub fn has_second(&self) -> bool {
        !self.second.is_empty()
    }

    /// `(A, B, C)` when the file gives all three, `None` when it gives none.
    pub fn comparison_fourth(&self) -> Result<Option<[CoeffExpr; 3]>, CliError> {
        let got: Vec<_> = ["A", "B", "C"].iter().filter_map(|k| self.second.get(k).cloned()).collect();
        match got.len() {
            0 => Ok(None),
            3 => Ok(Some([got[0].clone(), got[1].clone(), got[2].clone()])),
            _ => Err(input("the comparison equation needs all of A, B, C")),
        }
    }

    fn require(&self, order: Order) -> Result<(), CliError> {
        if self.order != order {
            return Err(input(format!("expected a {} order problem, the file is {}", order.name(), self.order.name())));
        }
        Ok(())
    }

    fn second_order(&self, p: CoeffExpr, q: CoeffExpr) -> Result<SecondOrderProblem, CliError> {
        SecondOrderProblem::new(p, q, self.alpha, self.interval).map_err(CliError::from)
    }

    fn fourth_order(&self, a: CoeffExpr, b: CoeffExpr, c: CoeffExpr) -> Result<FourthOrderProblem, CliError> {
        let middle = self.variants.middle_term.unwrap_or_default();
        FourthOrderProblem::new(a, b, c, self.alpha, self.interval, middle).map_err(CliError::from)
    }

    /// `l` and `L`; `L` falls back to `l` coefficient by coefficient.
    pub fn second_order_pair(&self) -> Result<[SecondOrderProblem; 2], CliError> {
        self.require(Order::Second)?;
        let l = self.second_order(self.coef("p", None)?, self.coef("q", Some("0"))?)?;
        let big = self.second_order(self.second_coef("P", "p")?, self.second_coef("Q", "q")?)?;
        Ok([l, big])
    }

    pub fn fourth_order_pair(&self) -> Result<[FourthOrderProblem; 2], CliError> {
        self.require(Order::Fourth)?;
        let l = self.fourth_order(self.coef("a", None)?, self.coef("b", Some("0"))?, self.coef("c", Some("0"))?)?;
        let big =
            self.fourth_order(self.second_coef("A", "a")?, self.second_coef("B", "b")?, self.second_coef("C", "c")?)?;
        Ok([l, big])
    }

    pub fn system(&self) -> Result<Vec<SecondOrderProblem>, CliError> {
        self.require(Order::System)?;
        let ps = self.coefs("p")?;
        let qs = self.coefs("q")?;
        ps.into_iter().zip(qs).map(|(p, q)| self.second_order(p, q)).collect()
    }

    /// Initial quasi-state number `i`, checked for dimension `N`.
    pub fn initial_state<const N: usize>(&self, i: usize) -> Result<[f64; N], CliError> {
        let y = self.initial.get(i).ok_or_else(|| input(format!("missing initial state {i}")))?;
        <[f64; N]>::try_from(y.as_slice())
            .map_err(|_| input(format!("initial state {i} needs {N} components, got {}", y.len())))
    }

    pub fn function(&self, i: usize) -> Option<&CoeffExpr> {
        self.functions.get(i).and_then(Option::as_ref)
    }
}
