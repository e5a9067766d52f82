//! Quadratic Plücker relations and the stabilizer of the ideal they generate.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde_json::{json, Value};

use super::Truth;
use crate::combinat::{sign_sequence, subsets_of_size, Subset, SubsetIndex};
use crate::error::{Error, Result};
use crate::extrep::RepMatrix;
use crate::linalg::echelon::{Arith, Backend, Echelon};
use crate::ring::Monomial;
use crate::ring::{Ring, RingElem, RingKind};

/// Variable name of the coordinate `x_I`: `x12` for `n <= 9`, else `x1_2_10`.
pub fn coordinate_name(s: &Subset) -> String {
    if s.n() <= 9 {
        format!("x{}", s.label())
    } else {
        let parts: Vec<String> = s.iter().map(|e| e.to_string()).collect();
        format!("x{}", parts.join("_"))
    }
}

/// Polynomial ring over `base` in the coordinates `x_I`, `I` an `m`-subset,
/// variables in lex order of `I`.
pub fn coordinate_ring(n: usize, m: usize, base: &Ring) -> Result<Ring> {
    let index = SubsetIndex::new(n, m)?;
    Ring::polynomial(base.clone(), index.subsets().iter().map(coordinate_name))
}

/// `x_{seq}` for an arbitrary index sequence: sign of the sorting
/// permutation times `x_{sorted}`, zero on repeats.
fn extended_coordinate(n: usize, seq: &[usize]) -> Option<(i8, Subset)> {
    let s = sign_sequence(&seq.iter().map(|&e| e as i64).collect::<Vec<_>>());
    if s == 0 {
        return None;
    }
    Some((s, Subset::from_unsorted(n, seq.iter().copied()).ok()?))
}

/// `f_{I,J} = Σ_h (-1)^h x_{i_1 ... i_{m-1} j_h} x_{j_1 ... ĵ_h ... j_{m+1}}`
/// in `coordinate_ring(n, m, Z)`.
pub fn plucker_poly(i: &Subset, j: &Subset) -> Result<RingElem> {
    let n = i.n();
    if j.n() != n {
        return Err(Error::DimensionMismatch(format!("subsets of [{n}] and [{}]", j.n())));
    }
    let m = i.len() + 1;
    if j.len() != m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "|I| = {} needs |J| = {}, got {}",
            i.len(),
            m + 1,
            j.len()
        )));
    }
    let ring = coordinate_ring(n, m, &Ring::integers())?;
    let mut acc = ring.zero();
    for (h, &jh) in j.elems().iter().enumerate() {
        let mut seq: Vec<usize> = i.elems().to_vec();
        seq.push(jh);
        let Some((s, a)) = extended_coordinate(n, &seq) else {
            continue;
        };
        let b = j.without(jh);
        // h is 0-based here, so (-1)^(h+1)
        let sign = if h % 2 == 0 { -s } else { s } as i64;
        let t = ring.mul(&ring.var(&coordinate_name(&a))?, &ring.var(&coordinate_name(&b))?);
        acc = ring.add(&acc, &ring.mul(&ring.from_i64(sign), &t));
    }
    Ok(acc)
}

/// Nonzero Plücker relations for `(n, m)`, normalized and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerSet {
    n: usize,
    m: usize,
    ring: Ring,
    polys: Vec<RingElem>,
}

impl PluckerSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `coordinate_ring(n, m, Z)`.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn polys(&self) -> &[RingElem] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "polys": self.polys.iter().map(|p| self.ring.format_elem(p)).collect::<Vec<_>>(),
        })
    }
}

/// Monomial as the ascending list of its variable indices (with multiplicity).
fn expanded(mono: &Monomial) -> Vec<usize> {
    mono.pairs()
        .flat_map(|(v, e)| std::iter::repeat_n(v, e as usize))
        .collect()
}

/// Multiply by `±1` so the lexicographically smallest monomial has
/// coefficient `+1`.
fn normalize_sign(ring: &Ring, p: RingElem) -> RingElem {
    let poly = ring.as_poly(&p).expect("polynomial");
    let Some((_, c)) = poly.terms().min_by_key(|(mono, _)| expanded(mono)) else {
        return p;
    };
    let base = ring.poly_ring().expect("polynomial ring").base();
    let negative = base.to_rational(c).is_some_and(|q| q.is_negative());
    if negative {
        ring.neg(&p)
    } else {
        p
    }
}

/// All `f_{I,J}` with `|I| = m - 1`, `|J| = m + 1`, zeros dropped, signs
/// normalized, duplicates removed; ordered by first occurrence.
pub fn plucker_set(n: usize, m: usize) -> Result<PluckerSet> {
    if m == 0 || m >= n {
        return Err(Error::params(format!("need 1 <= m <= n - 1, got n = {n}, m = {m}")));
    }
    let ring = coordinate_ring(n, m, &Ring::integers())?;
    let mut seen = BTreeSet::new();
    let mut polys = Vec::new();
    let js = subsets_of_size(n, m + 1);
    for i in subsets_of_size(n, m - 1) {
        for j in &js {
            let p = plucker_poly(&i, j)?;
            if ring.is_zero(&p) {
                continue;
            }
            let p = normalize_sign(&ring, p);
            if seen.insert(ring.format_elem(&p)) {
                polys.push(p);
            }
        }
    }
    Ok(PluckerSet { n, m, ring, polys })
}

fn coordinate_index(poly_ring: &Ring, index: &SubsetIndex) -> Result<Vec<usize>> {
    let r = poly_ring
        .poly_ring()
        .ok_or_else(|| Error::params(format!("{poly_ring} is not a polynomial ring")))?;
    let names: std::collections::HashMap<String, usize> = index
        .subsets()
        .iter()
        .enumerate()
        .map(|(i, s)| (coordinate_name(s), i))
        .collect();
    r.vars()
        .iter()
        .map(|v| {
            names.get(v).copied().ok_or_else(|| {
                Error::IndexMismatch(format!(
                    "variable `{v}` is not a coordinate for (n, m) = ({}, {})",
                    index.n(),
                    index.m()
                ))
            })
        })
        .collect()
}

fn map_coefficient(from: &Ring, to: &Ring, c: &RingElem) -> Result<RingElem> {
    if from == to {
        return Ok(c.clone());
    }
    match from.kind() {
        RingKind::Integers => Ok(to.from_bigint(&from.to_rational(c).expect("integer").to_integer())),
        _ => Err(Error::DimensionMismatch(format!(
            "cannot map coefficients from {from} to {to}"
        ))),
    }
}

/// `p(g x)`: each `x_I` replaced by `Σ_J g_{I,J} x_J`. The result lives in
/// `coordinate_ring(n, m, R)` for the ring `R` of `g`; coefficients of `p`
/// must lie in `R` or in `Z`. With this convention
/// `p((g h) x) = substitute_linear(substitute_linear(p, g), h)`.
pub fn substitute_linear(poly_ring: &Ring, poly: &RingElem, g: &RepMatrix) -> Result<RingElem> {
    let vars = coordinate_index(poly_ring, g.index())?;
    if vars.len() != g.size() {
        return Err(Error::IndexMismatch(format!(
            "{} variables for an index of size {}",
            vars.len(),
            g.size()
        )));
    }
    let src_base = poly_ring.poly_ring().unwrap().base().clone();
    let r = g.ring();
    let target = coordinate_ring(g.n(), g.m(), r)?;
    let p = poly_ring
        .as_poly(poly)
        .ok_or_else(|| Error::params("not a polynomial"))?;
    let rows = g.sparse_rows();
    let xs: Vec<RingElem> = g
        .index()
        .subsets()
        .iter()
        .map(|s| target.var(&coordinate_name(s)).unwrap())
        .collect();
    let mut images: Vec<Option<RingElem>> = vec![None; vars.len()];
    let mut acc = target.zero();
    for (mono, c) in p.terms() {
        let mut t = target.embed_base(&map_coefficient(&src_base, r, c)?);
        for (v, e) in mono.pairs() {
            let img = images[v].get_or_insert_with(|| {
                let mut l = target.zero();
                for (j, gij) in &rows[vars[v]] {
                    l = target.add(&l, &target.mul(&target.embed_base(gij), &xs[*j]));
                }
                l
            });
            t = target.mul(&t, &target.pow(img, e as u64));
        }
        acc = target.add(&acc, &t);
    }
    Ok(acc)
}

/// Result of the Plücker stabilizer test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerCheck {
    pub result: Truth,
    /// Index into `plucker_set(n, m)` of the first generator whose image
    /// left the span (for `False`) or had no integral expression (for
    /// `Indeterminate` over `Z`).
    pub failing_generator: Option<usize>,
}

/// Sparse coefficient row of a quadratic form; monomial `x_a x_b`
/// (`a <= b`) goes to column `a * N + b`.
fn quadric_row(ring: &Ring, p: &RingElem, nvars: usize) -> Vec<(usize, RingElem)> {
    ring.as_poly(p)
        .expect("polynomial")
        .terms()
        .map(|(mono, c)| {
            let e = expanded(mono);
            debug_assert_eq!(e.len(), 2);
            (e[0] * nvars + e[1], c.clone())
        })
        .collect()
}

enum Expressed<E> {
    All(Vec<Vec<(usize, E)>>),
    Outside(usize),
}

fn express_images<A: Arith>(
    a: A,
    set: &PluckerSet,
    images: &[Vec<(usize, RingElem)>],
) -> Result<(Expressed<A::E>, usize)> {
    let nvars = set.ring.poly_ring().unwrap().vars().len();
    let mut ech = Echelon::new(a, nvars * nvars, true);
    for p in &set.polys {
        let row: Vec<(usize, i64)> = quadric_row(&set.ring, p, nvars)
            .into_iter()
            .map(|(c, v)| {
                (
                    c,
                    set.ring
                        .poly_ring()
                        .unwrap()
                        .base()
                        .to_i64(&v)
                        .expect("integer coefficient"),
                )
            })
            .collect();
        ech.insert_i64(&row)?;
    }
    let rank = ech.rank();
    let mut out = Vec::with_capacity(images.len());
    for (t, img) in images.iter().enumerate() {
        let row = crate::linalg::echelon::lift_row(&ech.arith, img).expect("coefficients lie in the solving ring");
        match ech.express(row) {
            Some(c) => out.push(c),
            None => return Ok((Expressed::Outside(t), rank)),
        }
    }
    Ok((Expressed::All(out), rank))
}

/// Does `g` map the Plücker ideal into itself? Decided degree-wise: each
/// generator's image must lie in the `R`-span of the generators.
///
/// Over `Z` the span is solved over `Q` and the witness must be integral;
/// when the generators are dependent and the particular witness is not
/// integral the answer is `Indeterminate`. Over `Z/k` with composite `k` a
/// non-invertible pivot also gives `Indeterminate`.
pub fn stabilizes_plucker(g: &RepMatrix) -> Result<PluckerCheck> {
    let set = plucker_set(g.n(), g.m())?;
    let backend = Backend::for_ring(g.ring(), "stabilizes_plucker")?;
    let target = coordinate_ring(g.n(), g.m(), g.ring())?;
    let nvars = g.size();
    let images: Vec<Vec<(usize, RingElem)>> = set
        .polys
        .iter()
        .map(|p| substitute_linear(&set.ring, p, g).map(|q| quadric_row(&target, &q, nvars)))
        .collect::<Result<_>>()?;
    let outcome = match backend {
        Backend::Q(a) => express_images(a, &set, &images).map(|(e, rank)| match e {
            Expressed::Outside(t) => (Truth::False, Some(t)),
            Expressed::All(combos) => {
                let bad = matches!(g.ring().kind(), RingKind::Integers)
                    .then(|| combos.iter().position(|c| !crate::linalg::echelon::is_integral(c)))
                    .flatten();
                match bad {
                    None => (Truth::True, None),
                    Some(t) if rank < set.len() => (Truth::Indeterminate, Some(t)),
                    Some(t) => (Truth::False, Some(t)),
                }
            }
        }),
        Backend::Mod(a) => express_images(a, &set, &images).map(|(e, _)| match e {
            Expressed::Outside(t) => (Truth::False, Some(t)),
            Expressed::All(_) => (Truth::True, None),
        }),
    };
    match outcome {
        Ok((result, failing_generator)) => Ok(PluckerCheck {
            result,
            failing_generator,
        }),
        Err(Error::Indeterminate { .. }) => Ok(PluckerCheck {
            result: Truth::Indeterminate,
            failing_generator: None,
        }),
        Err(e) => Err(e),
    }
}
