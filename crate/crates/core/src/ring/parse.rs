//! Text tokens for ring descriptors and elements.
//!
//! Elements are read by a small expression evaluator (`+ - * / ^`, parentheses,
//! integers and the identifiers the ring defines), so every printed canonical
//! form parses back to the same element.

use num_bigint::BigInt;

use super::Ring;
use super::RingElem;
use crate::error::{Error, Result};

pub(crate) fn parse_ring(input: &str) -> Result<Ring> {
    let s = input.trim();
    let bad = |why: &str| Error::parse(input, why);
    match s {
        "Z" => return Ok(Ring::integers()),
        "Q" => return Ok(Ring::rationals()),
        _ => {}
    }
    if let Some(k) = s.strip_prefix("Z/") {
        let k: u64 = k.trim().parse().map_err(|_| bad("modulus is not an integer"))?;
        return Ring::modular(k);
    }
    if let Some(rest) = s.strip_prefix("poly(") {
        let body = rest.strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in body.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ';' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        let split = split.ok_or_else(|| bad("expected `poly(<base>; <vars>)`"))?;
        let base = parse_ring(&body[..split])?;
        let vars: Vec<&str> = body[split + 1..]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|v| !v.is_empty())
            .collect();
        return Ring::polynomial(base, vars);
    }
    if let Some(rest) = s.strip_prefix('F') {
        let (digits, dual) = match rest.strip_suffix("[d]") {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let p: u64 = digits.parse().map_err(|_| bad("expected F<prime> or F<prime>[d]"))?;
        return if dual { Ring::dual(p) } else { Ring::prime_field(p) };
    }
    Err(bad("unknown ring token"))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::parse(input, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<Tok>,
    pos: usize,
    input: &'a str,
}

impl Parser<'_> {
    fn err(&self, why: impl Into<String>) -> Error {
        Error::parse(self.input, why)
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<RingElem> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' {
                self.ring.add(&acc, &rhs)
            } else {
                self.ring.sub(&acc, &rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                self.ring.mul(&acc, &rhs)
            } else {
                self.ring
                    .div(&acc, &rhs)
                    .map_err(|e| self.err(format!("division failed: {e}")))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElem> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                let v = self.unary()?;
                Ok(self.ring.neg(&v))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => u64::try_from(n).map_err(|_| self.err("exponent too large"))?,
                _ => return Err(self.err("expected a non-negative integer exponent")),
            };
            self.pos += 1;
            return Ok(self.ring.pow(&base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RingElem> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(n)) => Ok(self.ring.from_bigint(&n)),
            Some(Tok::Ident(name)) => self
                .ring
                .resolve_ident(&name)
                .ok_or_else(|| self.err(format!("unknown identifier `{name}` in {}", self.ring))),
            Some(Tok::Op('(')) => {
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}

pub(crate) fn parse_elem(ring: &Ring, input: &str) -> Result<RingElem> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return Err(Error::parse(input, "empty expression"));
    }
    let mut p = Parser {
        ring,
        toks,
        pos: 0,
        input,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}
