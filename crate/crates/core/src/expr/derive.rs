use alloc::boxed::Box;

use super::{BinOp, Func, Node};

// Constructors folding only the trivial cases (0 and 1 operands), so that
// repeated differentiation does not drag dead subtrees along.

fn is_const(n: &Node, v: f64) -> bool {
    matches!(n, Node::Const(c) if *c == v)
}

fn bin(op: BinOp, a: Node, b: Node) -> Node {
    Node::Binary(op, Box::new(a), Box::new(b))
}

pub(super) fn add(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) {
        b
    } else if is_const(&b, 0.0) {
        a
    } else {
        bin(BinOp::Add, a, b)
    }
}

pub(super) fn sub(a: Node, b: Node) -> Node {
    if is_const(&b, 0.0) {
        a
    } else if is_const(&a, 0.0) {
        neg(b)
    } else {
        bin(BinOp::Sub, a, b)
    }
}

pub(super) fn mul(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        Node::Const(0.0)
    } else if is_const(&a, 1.0) {
        b
    } else if is_const(&b, 1.0) {
        a
    } else {
        bin(BinOp::Mul, a, b)
    }
}

fn div(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) {
        Node::Const(0.0)
    } else if is_const(&b, 1.0) {
        a
    } else {
        bin(BinOp::Div, a, b)
    }
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(0.0) => Node::Const(0.0),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

pub(super) fn sgnpow(a: Node, alpha: f64) -> Node {
    if alpha == 1.0 {
        a
    } else {
        Node::SgnPow(Box::new(a), alpha)
    }
}

fn abspow(a: Node, e: f64) -> Node {
    if e == 1.0 {
        call(Func::Abs, a)
    } else {
        Node::AbsPow(Box::new(a), e)
    }
}

pub(super) fn derive(node: &Node) -> Node {
    match node {
        Node::Const(_) | Node::Named(_) => Node::Const(0.0),
        Node::Var => Node::Const(1.0),
        Node::Neg(a) => neg(derive(a)),
        Node::Binary(op, a, b) => {
            let (a, b) = (&**a, &**b);
            match op {
                BinOp::Add => add(derive(a), derive(b)),
                BinOp::Sub => sub(derive(a), derive(b)),
                BinOp::Mul => add(mul(derive(a), b.clone()), mul(a.clone(), derive(b))),
                BinOp::Div => {
                    // (a'b - ab') / b^2
                    let num = sub(mul(derive(a), b.clone()), mul(a.clone(), derive(b)));
                    div(num, bin(BinOp::Pow, b.clone(), Node::Const(2.0)))
                }
                BinOp::Pow if !b.depends_on_x() => {
                    // b a^(b-1) a'
                    let lowered = match b {
                        Node::Const(c) => Node::Const(c - 1.0),
                        _ => sub(b.clone(), Node::Const(1.0)),
                    };
                    let power = if is_const(&lowered, 0.0) {
                        Node::Const(1.0)
                    } else if is_const(&lowered, 1.0) {
                        a.clone()
                    } else {
                        bin(BinOp::Pow, a.clone(), lowered)
                    };
                    mul(mul(b.clone(), power), derive(a))
                }
                BinOp::Pow => {
                    // a^b (b' log a + b a'/a)
                    let inner =
                        add(mul(derive(b), call(Func::Log, a.clone())), div(mul(b.clone(), derive(a)), a.clone()));
                    mul(node.clone(), inner)
                }
            }
        }
        Node::Call(f, a) => {
            let inner = &**a;
            let da = derive(inner);
            let outer = match f {
                Func::Sin => call(Func::Cos, inner.clone()),
                Func::Cos => neg(call(Func::Sin, inner.clone())),
                Func::Exp => node.clone(),
                Func::Log => div(Node::Const(1.0), inner.clone()),
                Func::Sqrt => div(Node::Const(0.5), node.clone()),
                Func::Abs => call(Func::Sign, inner.clone()),
                Func::Sign => Node::Const(0.0),
            };
            mul(outer, da)
        }
        Node::SgnPow(a, alpha) => {
            // α |g|^(α-1) g'
            let inner = &**a;
            let outer = if *alpha == 1.0 {
                Node::Const(1.0)
            } else {
                mul(Node::Const(*alpha), abspow(inner.clone(), alpha - 1.0))
            };
            mul(outer, derive(inner))
        }
        Node::AbsPow(a, e) => {
            // e |g|^(e-1) sign(g) g', i.e. e φ_(e-1)(g) g' when e > 1
            let inner = &**a;
            let outer = if *e == 0.0 {
                Node::Const(0.0)
            } else if *e > 1.0 {
                mul(Node::Const(*e), sgnpow(inner.clone(), e - 1.0))
            } else {
                mul(mul(Node::Const(*e), abspow(inner.clone(), e - 1.0)), call(Func::Sign, inner.clone()))
            };
            mul(outer, derive(inner))
        }
    }
}
