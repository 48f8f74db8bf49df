use super::{BinOp, Func, Node};
use crate::error::{Error, Result};
use crate::sgnpow::{abs_pow, signed_pow};

/// A value together with the number of kink conventions used to compute it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub kink_hits: usize,
}

/// Integer exponents up to this magnitude use repeated multiplication.
const MAX_INT_EXPONENT: f64 = 1024.0;

fn domain(op: &'static str, arg: f64) -> Error {
    Error::Domain { op, arg }
}

pub(super) fn eval(node: &Node, x: f64, hits: &mut usize) -> Result<f64> {
    Ok(match node {
        Node::Const(v) => *v,
        Node::Named(c) => c.value(),
        Node::Var => x,
        Node::Neg(a) => -eval(a, x, hits)?,
        Node::Binary(op, a, b) => {
            let l = eval(a, x, hits)?;
            let r = eval(b, x, hits)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(domain("division", l));
                    }
                    l / r
                }
                BinOp::Pow => power(l, r)?,
            }
        }
        Node::Call(func, a) => {
            let g = eval(a, x, hits)?;
            match func {
                Func::Sin => libm::sin(g),
                Func::Cos => libm::cos(g),
                Func::Exp => libm::exp(g),
                Func::Log => {
                    if g <= 0.0 {
                        return Err(domain("log", g));
                    }
                    libm::log(g)
                }
                Func::Sqrt => {
                    if g < 0.0 {
                        return Err(domain("sqrt", g));
                    }
                    libm::sqrt(g)
                }
                Func::Abs => libm::fabs(g),
                Func::Sign => {
                    if g > 0.0 {
                        1.0
                    } else if g < 0.0 {
                        -1.0
                    } else {
                        *hits += 1;
                        0.0
                    }
                }
            }
        }
        Node::SgnPow(a, alpha) => signed_pow(eval(a, x, hits)?, *alpha),
        Node::AbsPow(a, e) => {
            let g = eval(a, x, hits)?;
            if g == 0.0 && *e <= 0.0 {
                *hits += 1;
                if *e == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                abs_pow(g, *e)
            }
        }
    })
}

fn power(base: f64, exponent: f64) -> Result<f64> {
    if exponent == libm::trunc(exponent) && libm::fabs(exponent) <= MAX_INT_EXPONENT {
        let n = libm::fabs(exponent) as u32;
        let mut acc = 1.0;
        let mut b = base;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc *= b;
            }
            b *= b;
            k >>= 1;
        }
        if exponent < 0.0 {
            if acc == 0.0 {
                return Err(domain("power", base));
            }
            acc = 1.0 / acc;
        }
        Ok(acc)
    } else if base > 0.0 {
        Ok(libm::pow(base, exponent))
    } else if base == 0.0 && exponent > 0.0 {
        Ok(0.0)
    } else {
        Err(domain("power", base))
    }
}
