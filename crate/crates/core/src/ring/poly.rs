use std::collections::BTreeMap;

use super::{Payload, Ring, RingElem};
use crate::error::{Error, Result};

/// Exponent vector stored sparsely as `(variable, exponent)` pairs sorted by
/// variable, exponents strictly positive. Ordered graded-lexicographically
/// with `x0 > x1 > ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(u32, u32)>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.degree().cmp(&other.degree()) {
            Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.0.cmp(&b.0) {
                Less => return Greater,
                Greater => return Less,
                Equal => match a.1.cmp(&b.1) {
                    Equal => {}
                    ord => return ord,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i as u32, 1)])
    }

    /// Build from `(variable, exponent)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *acc.entry(v as u32).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Total degree restricted to a family of variables.
    pub fn degree_in(&self, family: &[usize]) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| family.contains(&(*v as usize)))
            .map(|&(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0.iter().find(|(v, _)| *v as usize == var).map_or(0, |&(_, e)| e)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

/// Sparse multivariate polynomial; zero coefficients never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, RingElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(base: &Ring, c: RingElem) -> Self {
        let mut p = Poly::zero();
        if !base.is_zero(&c) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub(crate) fn var(base: &Ring, i: usize) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(Monomial::var(i), base.one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RingElem)> {
        self.terms.iter()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = &RingElem> {
        self.terms.values()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> Option<&RingElem> {
        self.terms.get(mono)
    }

    /// Largest monomial in the graded-lex order; among monomials of one
    /// degree this is the one with the lexicographically smallest variables.
    pub fn leading(&self) -> Option<(&Monomial, &RingElem)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Degrees per variable family of every monomial, if they all agree.
    pub fn multidegree(&self, families: &[Vec<usize>]) -> Option<Vec<u32>> {
        let mut out: Option<Vec<u32>> = None;
        for m in self.terms.keys() {
            let d: Vec<u32> = families.iter().map(|f| m.degree_in(f)).collect();
            match &out {
                None => out = Some(d),
                Some(prev) if *prev != d => return None,
                _ => {}
            }
        }
        out
    }

    pub(crate) fn add_term(&mut self, base: &Ring, mono: Monomial, c: &RingElem) {
        if base.is_zero(c) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = base.add(o.get(), c);
                if base.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

/// Polynomial ring over a base ring with named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    base: Ring,
    vars: Vec<String>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PolyRing {
    pub(crate) fn new(base: Ring, vars: Vec<String>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidRing("polynomial ring needs at least one variable".into()));
        }
        let reserved = base.identifiers();
        for (i, v) in vars.iter().enumerate() {
            if !valid_ident(v) {
                return Err(Error::InvalidRing(format!("`{v}` is not a valid variable name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidRing(format!("duplicate variable `{v}`")));
            }
            if reserved.contains(v) {
                return Err(Error::InvalidRing(format!("variable `{v}` shadows a name of {base}")));
            }
        }
        Ok(PolyRing { base, vars })
    }

    pub fn base(&self) -> &Ring {
        &self.base
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub(crate) fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.add_term(&self.base, m.clone(), c);
        }
        out
    }

    pub(crate) fn neg(&self, a: &Poly) -> Poly {
        Poly {
            terms: a.terms.iter().map(|(m, c)| (m.clone(), self.base.neg(c))).collect(),
        }
    }

    pub(crate) fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(&self.base, ma.mul(mb), &self.base.mul(ca, cb));
            }
        }
        out
    }

    pub(crate) fn scale(&self, c: &RingElem, a: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, x) in &a.terms {
            out.add_term(&self.base, m.clone(), &self.base.mul(c, x));
        }
        out
    }

    fn constant_term(&self, a: &Poly) -> RingElem {
        a.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(|| self.base.zero())
    }

    /// Units of `A[x]` are unit constants plus a nilpotent remainder.
    pub(crate) fn is_unit(&self, a: &Poly) -> bool {
        self.base.is_unit(&self.constant_term(a))
            && a.terms
                .iter()
                .filter(|(m, _)| !m.is_one())
                .all(|(_, c)| self.base.is_nilpotent(c))
    }

    pub(crate) fn inverse(&self, a: &Poly) -> Option<Poly> {
        if !self.is_unit(a) {
            return None;
        }
        // a = c (1 + u) with u nilpotent: a^{-1} = c^{-1} sum (-u)^i.
        let c_inv = self.base.inverse(&self.constant_term(a)).ok()?;
        let mut u = self.scale(&c_inv, a);
        u.terms.remove(&Monomial::one());
        let minus_u = self.neg(&u);
        let mut term = Poly::constant(&self.base, self.base.one());
        let mut acc = Poly::zero();
        while !term.is_zero() {
            acc = self.add(&acc, &term);
            term = self.mul(&term, &minus_u);
        }
        Some(self.scale(&c_inv, &acc))
    }

    pub(crate) fn format(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in p.terms.iter().rev() {
            let coeff = self.base.format_elem(c);
            let mono: Vec<String> = m
                .pairs()
                .map(|(v, e)| {
                    if e == 1 {
                        self.vars[v].clone()
                    } else {
                        format!("{}^{e}", self.vars[v])
                    }
                })
                .collect();
            let compound = coeff.contains(['+', '*']) || coeff[1..].contains('-');
            let term = if m.is_one() {
                if compound {
                    format!("({coeff})")
                } else {
                    coeff
                }
            } else if coeff == "1" {
                mono.join("*")
            } else if coeff == "-1" {
                format!("-{}", mono.join("*"))
            } else if compound {
                format!("({coeff})*{}", mono.join("*"))
            } else {
                format!("{coeff}*{}", mono.join("*"))
            };
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

impl Ring {
    /// Wrap a polynomial payload; `self` must be the polynomial ring it belongs to.
    pub fn poly_elem(&self, p: Poly) -> RingElem {
        debug_assert!(self.poly_ring().is_some());
        RingElem(Payload::Poly(p))
    }

    pub fn as_poly<'a>(&self, a: &'a RingElem) -> Option<&'a Poly> {
        match &a.0 {
            Payload::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// Substitute ring elements of `target` for the variables of a polynomial;
    /// `embed` maps base coefficients into `target`.
    pub fn eval_poly(
        &self,
        p: &RingElem,
        values: &[RingElem],
        target: &Ring,
        embed: impl Fn(&RingElem) -> RingElem,
    ) -> Result<RingElem> {
        let r = self
            .poly_ring()
            .ok_or_else(|| Error::InvalidParameters(format!("{self} is not a polynomial ring")))?;
        if values.len() != r.vars.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} variables",
                values.len(),
                r.vars.len()
            )));
        }
        let poly = self.as_poly(p).expect("polynomial payload");
        let mut acc = target.zero();
        for (m, c) in poly.terms() {
            let mut t = embed(c);
            for (v, e) in m.pairs() {
                t = target.mul(&t, &target.pow(&values[v], e as u64));
            }
            acc = target.add(&acc, &t);
        }
        Ok(acc)
    }
}
