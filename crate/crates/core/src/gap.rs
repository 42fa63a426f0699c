//! Integer expressions in one variable `k`, used for gap functions such as
//! `k+3`, `5*k+3` or `10^(k^2)`.
//!
//! Grammar: sums and differences of products of powers; `^` is right
//! associative; literals are non-negative integers. Evaluation is checked
//! `i128`, so overflow is reported rather than wrapped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    K,
    Lit(i128),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Neg(Box<Node>),
}

impl Node {
    fn eval(&self, k: i128) -> Option<i128> {
        match self {
            Node::K => Some(k),
            Node::Lit(v) => Some(*v),
            Node::Add(a, b) => a.eval(k)?.checked_add(b.eval(k)?),
            Node::Sub(a, b) => a.eval(k)?.checked_sub(b.eval(k)?),
            Node::Mul(a, b) => a.eval(k)?.checked_mul(b.eval(k)?),
            Node::Neg(a) => a.eval(k)?.checked_neg(),
            Node::Pow(a, b) => {
                let e = u32::try_from(b.eval(k)?).ok()?;
                a.eval(k)?.checked_pow(e)
            }
        }
    }
}

/// A parsed gap function g(k). Serializes as its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct GapFn {
    source: String,
    root: Node,
}

impl GapFn {
    pub fn source(&self) -> &str {
        &self.source
    }

    /// g(k), or `None` on overflow or a negative exponent.
    pub fn eval(&self, k: u64) -> Option<i128> {
        self.root.eval(k as i128)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("gap expression at byte {}: {what}", self.pos))
    }

    fn expr(&mut self) -> Result<Node, Error> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, Error> {
        let mut lhs = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Node::Mul(Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Node, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.power()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, Error> {
        match self.peek() {
            Some(b'k') => {
                self.pos += 1;
                Ok(Node::K)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.atom()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                text.parse()
                    .map(Node::Lit)
                    .map_err(|_| self.err("literal too large"))
            }
            _ => Err(self.err("expected k, a number or '('")),
        }
    }
}

impl FromStr for GapFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let root = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(GapFn {
            source: s.trim().to_string(),
            root,
        })
    }
}

impl fmt::Display for GapFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for GapFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for GapFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
