use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use super::{BinOp, Func, NamedConst, Node};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Something else was found where `expected` was required.
    Expected {
        expected: &'static str,
        found: String,
    },
    UnknownIdentifier(String),
    InvalidNumber(String),
    /// `sgnpow` needs a positive exponent literal.
    InvalidExponent(String),
}

/// A syntax error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::Expected { expected, found } => write!(f, "expected {expected}, found {found}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::InvalidNumber(text) => write!(f, "invalid number `{text}`"),
            ParseErrorKind::InvalidExponent(text) => write!(f, "invalid sgnpow exponent `{text}` (must be > 0)"),
        }
    }
}

impl core::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

pub(super) fn parse(text: &str) -> PResult<Node> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.expected("operator or end of input"));
    }
    Ok(node)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn found(&self) -> String {
        match self.text[self.pos..].chars().next() {
            None => "end of input".to_string(),
            Some(c) => {
                let mut s = String::from("`");
                s.push(c);
                s.push('`');
                s
            }
        }
    }

    fn expected(&self, what: &'static str) -> ParseError {
        ParseError { offset: self.pos, kind: ParseErrorKind::Expected { expected: what, found: self.found() } }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn expr(&mut self) -> PResult<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> PResult<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Node> {
        if self.eat(b'-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> PResult<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')', "`)`")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Node::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.expected("expression")),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mut look = self.pos + 1;
            if look < self.src.len() && matches!(self.src[look], b'+' | b'-') {
                look += 1;
            }
            if look < self.src.len() && self.src[look].is_ascii_digit() {
                self.pos = look;
                digits(self);
            }
        }
        let text = &self.text[start..self.pos];
        text.parse::<f64>()
            .map_err(|_| ParseError { offset: start, kind: ParseErrorKind::InvalidNumber(text.to_string()) })
    }

    fn identifier(&mut self) -> PResult<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.text[start..self.pos];
        match name {
            "x" => return Ok(Node::Var),
            "pi" => return Ok(Node::Named(NamedConst::Pi)),
            "e" => return Ok(Node::Named(NamedConst::E)),
            "sgnpow" | "abspow" => {
                self.expect(b'(', "`(`")?;
                let arg = self.expr()?;
                self.expect(b',', "`,`")?;
                let lit_start = self.pos;
                let negative = self.eat(b'-');
                if !matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                    return Err(self.expected("numeric literal"));
                }
                let mut value = self.number()?;
                if negative {
                    value = -value;
                }
                self.expect(b')', "`)`")?;
                if name == "sgnpow" {
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(ParseError {
                            offset: lit_start,
                            kind: ParseErrorKind::InvalidExponent(
                                self.text[lit_start..self.pos - 1].trim().to_string(),
                            ),
                        });
                    }
                    return Ok(Node::SgnPow(Box::new(arg), value));
                }
                return Ok(Node::AbsPow(Box::new(arg), value));
            }
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError { offset: start, kind: ParseErrorKind::UnknownIdentifier(name.to_string()) });
        };
        self.expect(b'(', "`(`")?;
        let arg = self.expr()?;
        self.expect(b')', "`)`")?;
        Ok(Node::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn err(s: &str) -> ParseError {
        parse(s).unwrap_err()
    }

    #[test]
    fn positioned_errors() {
        let e = err("2*");
        assert_eq!(e.offset, 2);
        assert!(matches!(e.kind, ParseErrorKind::Expected { expected: "expression", .. }));
        assert_eq!(err("sin(x").offset, 5);
        assert_eq!(err("1 + foo(x)").kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(err("1 + foo(x)").offset, 4);
        assert_eq!(err("2 3").offset, 2);
        assert!(matches!(err("sgnpow(x, 0)").kind, ParseErrorKind::InvalidExponent(_)));
        assert!(matches!(err("sgnpow(x, x)").kind, ParseErrorKind::Expected { expected: "numeric literal", .. }));
        assert!(matches!(err("sin x").kind, ParseErrorKind::Expected { expected: "`(`", .. }));
        assert!(matches!(err("").kind, ParseErrorKind::Expected { expected: "expression", .. }));
        assert!(matches!(err(".").kind, ParseErrorKind::InvalidNumber(_)));
    }

    #[test]
    fn error_message_mentions_offset() {
        use alloc::string::ToString;
        let msg = err("2*").to_string();
        assert!(msg.contains("byte 2"), "{msg}");
    }

    proptest! {
        // Every input either parses or reports an offset inside the input.
        #[test]
        fn parser_is_total(s in "[-+*/^()., x0-9a-z]{0,24}") {
            match parse(&s) {
                Ok(_) => {}
                Err(e) => prop_assert!(e.offset <= s.len()),
            }
        }
    }
}
