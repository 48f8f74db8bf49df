//! Coefficient and test-function expressions in one variable `x`.
//!
//! Grammar (EBNF), with `^` right-associative and binding tighter than a
//! leading unary minus (`-x^2` is `-(x^2)`):
//!
//! ```text
//! expr    = term , { ( "+" | "-" ) , term } ;
//! term    = unary , { ( "*" | "/" ) , unary } ;
//! unary   = "-" , unary | power ;
//! power   = atom , [ "^" , unary ] ;
//! atom    = number | "x" | "pi" | "e"
//!         | func , "(" , expr , ")"
//!         | ( "sgnpow" | "abspow" ) , "(" , expr , "," , literal , ")"
//!         | "(" , expr , ")" ;
//! func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "sign" ;
//! literal = [ "-" ] , number ;
//! ```
//!
//! `sgnpow(g, a)` is `φ_a(g) = |g|^(a-1) g` with `a > 0`; `abspow(g, e)` is
//! `|g|^e` and mostly shows up in derivatives. `Display` prints a canonical,
//! fully parenthesised form that parses back to the same tree.

mod derive;
mod eval;
mod operator;
mod parse;

use alloc::boxed::Box;
use alloc::sync::Arc;
use core::fmt;

pub use eval::Evaluated;
pub use operator::{
    apply_operator_2nd, apply_operator_4th, FourthOrderExprFields, FourthOrderPoint, SecondOrderExprFields,
    SecondOrderPoint,
};
pub use parse::{ParseError, ParseErrorKind};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    /// `sign(g)`, with `sign(0) = 0`.
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => core::f64::consts::PI,
            NamedConst::E => core::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Named(NamedConst),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// `φ_α(g)` with the exponent carried in the tree.
    SgnPow(Box<Node>, f64),
    /// `|g|^e`; evaluates to 0 at `g = 0` for `e < 0` (flagged as a kink hit).
    AbsPow(Box<Node>, f64),
}

impl Node {
    pub fn depends_on_x(&self) -> bool {
        match self {
            Node::Const(_) | Node::Named(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Call(_, a) | Node::SgnPow(a, _) | Node::AbsPow(a, _) => a.depends_on_x(),
            Node::Binary(_, a, b) => a.depends_on_x() || b.depends_on_x(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Named(_) | Node::Var => 1,
            Node::Neg(a) | Node::Call(_, a) | Node::SgnPow(a, _) | Node::AbsPow(a, _) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// An immutable parsed expression. Cloning is cheap (shared tree).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffExpr {
    root: Arc<Node>,
}

impl CoeffExpr {
    pub fn parse(text: &str) -> core::result::Result<CoeffExpr, ParseError> {
        parse::parse(text).map(CoeffExpr::from_node)
    }

    pub fn from_node(node: Node) -> CoeffExpr {
        CoeffExpr { root: Arc::new(node) }
    }

    pub fn constant(value: f64) -> CoeffExpr {
        CoeffExpr::from_node(Node::Const(value))
    }

    pub fn x() -> CoeffExpr {
        CoeffExpr::from_node(Node::Var)
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    pub fn is_constant(&self) -> bool {
        !self.root.depends_on_x()
    }

    /// Value at `x`, with domain errors for `log`/`sqrt` of negative
    /// arguments, division by zero and non-integer powers of negative bases.
    pub fn eval(&self, x: f64) -> Result<f64> {
        eval::eval(&self.root, x, &mut 0)
    }

    /// Like [`CoeffExpr::eval`] but also reports whether a derivative
    /// convention at a kink (`abs`, `sign`, `abspow` at a zero argument) was used.
    pub fn eval_flagged(&self, x: f64) -> Result<Evaluated> {
        let mut hits = 0;
        let value = eval::eval(&self.root, x, &mut hits)?;
        Ok(Evaluated { value, kink_hits: hits })
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derive(&self) -> CoeffExpr {
        CoeffExpr::from_node(derive::derive(&self.root))
    }

    pub fn add(&self, other: &CoeffExpr) -> CoeffExpr {
        CoeffExpr::from_node(derive::add(self.node().clone(), other.node().clone()))
    }

    pub fn sub(&self, other: &CoeffExpr) -> CoeffExpr {
        CoeffExpr::from_node(derive::sub(self.node().clone(), other.node().clone()))
    }

    pub fn mul(&self, other: &CoeffExpr) -> CoeffExpr {
        CoeffExpr::from_node(derive::mul(self.node().clone(), other.node().clone()))
    }

    pub fn add_constant(&self, c: f64) -> CoeffExpr {
        self.add(&CoeffExpr::constant(c))
    }

    pub fn sgnpow(&self, alpha: f64) -> CoeffExpr {
        CoeffExpr::from_node(derive::sgnpow(self.node().clone(), alpha))
    }
}

impl core::str::FromStr for CoeffExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        CoeffExpr::parse(s)
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&*self.root, f)
    }
}

fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(v) => fmt_number(*v, f),
            Node::Named(NamedConst::Pi) => f.write_str("pi"),
            Node::Named(NamedConst::E) => f.write_str("e"),
            Node::Var => f.write_str("x"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::SgnPow(a, e) => {
                write!(f, "sgnpow({a}, ")?;
                write!(f, "{e:?})")
            }
            Node::AbsPow(a, e) => {
                write!(f, "abspow({a}, ")?;
                if *e < 0.0 {
                    write!(f, "-{:?})", -e)
                } else {
                    write!(f, "{e:?})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use alloc::string::ToString;

    fn ev(s: &str, x: f64) -> f64 {
        CoeffExpr::parse(s).unwrap().eval(x).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(ev("2*x + sin(x)", 0.0), 0.0);
        assert_eq!(ev("x^2 * (1 - x)", 1.0), 0.0);
        assert_eq!(ev("sgnpow(x, 2)", -3.0), -9.0);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ev("pi", 123.0), core::f64::consts::PI);
        assert_eq!(ev("exp(0)+1", 0.0), 2.0);
        assert!(CoeffExpr::parse("x/x").unwrap().eval(0.0).is_err());
        assert!(CoeffExpr::parse("log(x)").unwrap().eval(-1.0).is_err());
        assert!(CoeffExpr::parse("sqrt(x)").unwrap().eval(-1.0).is_err());
        assert!(CoeffExpr::parse("x^0.5").unwrap().eval(-1.0).is_err());
        assert_eq!(ev("x^3", -2.0), -8.0);
        assert_eq!(ev("x^-2", -2.0), 0.25);
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("2 + 3 * 4", 0.0), 14.0);
        assert_eq!(ev("-2 * -3", 0.0), 6.0);
        assert!((ev("1e-3 * 2E2 + e - e", 0.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn derive_examples() {
        let d = CoeffExpr::parse("x^2").unwrap().derive();
        for x in [-1.5, 0.0, 0.3, 2.0] {
            assert!((d.eval(x).unwrap() - 2.0 * x).abs() < 1e-14);
        }
        assert_eq!(CoeffExpr::parse("sin(x)").unwrap().derive().eval(0.0).unwrap(), 1.0);
        assert_eq!(CoeffExpr::parse("sgnpow(x,2)").unwrap().derive().eval(-3.0).unwrap(), 6.0);
    }

    #[test]
    fn kink_convention_is_flagged() {
        let d = CoeffExpr::parse("abs(x)").unwrap().derive();
        let r = d.eval_flagged(0.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.kink_hits > 0);
        let d = CoeffExpr::parse("sgnpow(x, 0.5)").unwrap().derive();
        let r = d.eval_flagged(0.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.kink_hits > 0);
        assert_eq!(d.eval_flagged(4.0).unwrap().kink_hits, 0);
    }

    #[test]
    fn printer_round_trip() {
        for s in [
            "2*x + sin(x)",
            "-x^2 - 3/(1+x)",
            "sgnpow(cos(x) - 0.25, 1.5) * e^x",
            "abspow(x, -0.5) + sign(x) + abs(log(2 + x))",
            "1.5e-7 * pi - 1e300",
        ] {
            let e = CoeffExpr::parse(s).unwrap();
            let printed = e.to_string();
            assert_eq!(CoeffExpr::parse(&printed).unwrap(), e, "{printed}");
        }
    }

    #[test]
    fn derived_trees_print_parseably() {
        let e = CoeffExpr::parse("sgnpow(x^2 - 1, 2.5) / (2 + sin(x))").unwrap();
        let d = e.derive().derive();
        let back = CoeffExpr::parse(&d.to_string()).unwrap();
        for x in [0.3, 1.7, -2.2] {
            let (a, b) = (d.eval(x).unwrap(), back.eval(x).unwrap());
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
