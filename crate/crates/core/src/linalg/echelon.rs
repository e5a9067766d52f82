//! Sparse incremental row echelon form over a few concrete scalar backends.
//!
//! Rows are inserted one at a time and reduced against the stored pivots;
//! the leading entry of every stored row is normalized to 1. Backends whose
//! nonzero elements may fail to be invertible (`Z/k` with `k` composite)
//! report [`Error::Indeterminate`] instead of guessing.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::modular::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod};
use crate::ring::{Ring, RingElem, RingKind};

pub(crate) trait Arith {
    type E: Clone + Debug + PartialEq + Send + Sync;
    fn ring(&self) -> &Ring;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::E;
    fn lift(&self, a: &RingElem) -> Option<Self::E>;
    fn lower(&self, a: &Self::E) -> RingElem;
}

#[derive(Clone, Debug)]
pub(crate) struct QArith {
    ring: Ring,
}

impl QArith {
    pub(crate) fn new() -> Self {
        QArith {
            ring: Ring::rationals(),
        }
    }
}

impl Arith for QArith {
    type E = BigRational;
    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn lift(&self, a: &RingElem) -> Option<BigRational> {
        self.ring.to_rational(a)
    }
    fn lower(&self, a: &BigRational) -> RingElem {
        self.ring.from_rational(a).expect("rational into Q")
    }
}

/// `Z/k` on machine words. For prime `k` every nonzero element inverts.
#[derive(Clone, Debug)]
pub(crate) struct ModArith {
    ring: Ring,
    k: u64,
}

impl ModArith {
    pub(crate) fn new(k: u64) -> Result<Self> {
        Ok(ModArith {
            ring: Ring::modular(k)?,
            k,
        })
    }
}

impl Arith for ModArith {
    type E = u64;
    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.k
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.k)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.k)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.k)
    }
    fn neg(&self, a: &u64) -> u64 {
        neg_mod(*a, self.k)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.k)
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.k as i128) as u64
    }
    fn lift(&self, a: &RingElem) -> Option<u64> {
        self.ring.residue(a)
    }
    fn lower(&self, a: &u64) -> RingElem {
        self.ring.from_bigint(&BigInt::from(*a))
    }
}

/// Backend chosen from a ring descriptor.
#[derive(Clone, Debug)]
pub(crate) enum Backend {
    Q(QArith),
    Mod(ModArith),
}

impl Backend {
    /// `Q` for `Z` and `Q`; word arithmetic for `Z/k`. Other rings have no
    /// solving backend.
    pub(crate) fn for_ring(ring: &Ring, op: &'static str) -> Result<Backend> {
        match ring.kind() {
            RingKind::Integers | RingKind::Rationals => Ok(Backend::Q(QArith::new())),
            RingKind::Modular(k) => Ok(Backend::Mod(ModArith::new(k)?)),
            _ => Err(Error::UnsupportedRing {
                op,
                ring: ring.to_string(),
            }),
        }
    }

    /// Like [`Backend::for_ring`] but insists on a field.
    pub(crate) fn field(ring: &Ring, op: &'static str) -> Result<Backend> {
        match ring.kind() {
            RingKind::Rationals => Ok(Backend::Q(QArith::new())),
            RingKind::Modular(k) if ring.is_field() => Ok(Backend::Mod(ModArith::new(k)?)),
            _ => Err(Error::UnsupportedRing {
                op,
                ring: ring.to_string(),
            }),
        }
    }
}

type Row<E> = Vec<(usize, E)>;

#[derive(Clone, Debug)]
struct Stored<E> {
    row: Row<E>,
    // combination of inserted rows this stored row equals, when tracking
    combo: Row<E>,
}

/// Incremental echelon form with optional tracking of row combinations.
#[derive(Clone, Debug)]
pub(crate) struct Echelon<A: Arith> {
    pub(crate) arith: A,
    ncols: usize,
    stored: Vec<Stored<A::E>>,
    pivot_row: Vec<Option<u32>>,
    track: bool,
    inserted: usize,
}

fn merge_axpy<A: Arith>(a: &A, x: &[(usize, A::E)], c: &A::E, y: &[(usize, A::E)]) -> Row<A::E> {
    // x - c*y
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            let v = a.neg(&a.mul(c, &y[j].1));
            if !a.is_zero(&v) {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = a.sub(&x[i].1, &a.mul(c, &y[j].1));
            if !a.is_zero(&v) {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale_row<A: Arith>(a: &A, c: &A::E, row: &mut Row<A::E>) {
    for (_, v) in row.iter_mut() {
        *v = a.mul(c, v);
    }
}

pub(crate) fn normalize_row<A: Arith>(a: &A, mut row: Row<A::E>) -> Row<A::E> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Row<A::E> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv = a.add(lv, &v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !a.is_zero(v));
    out
}

impl<A: Arith> Echelon<A> {
    pub(crate) fn new(arith: A, ncols: usize, track: bool) -> Self {
        Echelon {
            arith,
            ncols,
            stored: Vec::new(),
            pivot_row: vec![None; ncols],
            track,
            inserted: 0,
        }
    }

    pub(crate) fn ncols(&self) -> usize {
        self.ncols
    }

    pub(crate) fn rank(&self) -> usize {
        self.stored.len()
    }

    /// Reduce a sorted sparse row until its leading column has no pivot.
    /// Returns the remainder and, when tracking, the combination subtracted.
    fn reduce_sorted(&self, mut row: Row<A::E>, mut combo: Row<A::E>) -> (Row<A::E>, Row<A::E>) {
        let a = &self.arith;
        let mut start = 0;
        loop {
            let Some(pos) = (start..row.len()).find(|&i| self.pivot_row[row[i].0].is_some()) else {
                return (row, combo);
            };
            let c = row[pos].0;
            let s = &self.stored[self.pivot_row[c].unwrap() as usize];
            let factor = row[pos].1.clone();
            // the pivot row only touches columns >= c
            let head: Row<A::E> = row[..pos].to_vec();
            let tail = merge_axpy(a, &row[pos..], &factor, &s.row);
            row = head;
            row.extend(tail);
            if self.track {
                combo = merge_axpy(a, &combo, &factor, &s.combo);
            }
            start = pos;
        }
    }

    /// Full reduction of a row against every pivot.
    pub(crate) fn reduce(&self, row: Row<A::E>) -> Row<A::E> {
        let row = normalize_row(&self.arith, row);
        self.reduce_sorted(row, Vec::new()).0
    }

    /// Insert a row; returns whether it increased the rank.
    pub(crate) fn insert(&mut self, row: Row<A::E>) -> Result<bool> {
        let a = &self.arith;
        let row = normalize_row(a, row);
        if let Some((c, _)) = row.last() {
            assert!(*c < self.ncols, "column {c} out of range");
        }
        let id = self.inserted;
        self.inserted += 1;
        let combo = if self.track { vec![(id, a.one())] } else { Vec::new() };
        let (mut row, mut combo) = self.reduce_sorted(row, combo);
        let Some((lead, lv)) = row.first().cloned() else {
            return Ok(false);
        };
        let inv = a.inv(&lv).ok_or_else(|| Error::Indeterminate {
            ring: a.ring().to_string(),
            pivot: a.ring().format_elem(&a.lower(&lv)),
        })?;
        scale_row(a, &inv, &mut row);
        if self.track {
            scale_row(a, &inv, &mut combo);
        }
        self.pivot_row[lead] = Some(self.stored.len() as u32);
        self.stored.push(Stored { row, combo });
        Ok(true)
    }

    pub(crate) fn insert_i64(&mut self, row: &[(usize, i64)]) -> Result<bool> {
        let r = row.iter().map(|&(c, v)| (c, self.arith.from_i64(v))).collect();
        self.insert(r)
    }

    /// Coefficients `c` with `row = Σ c_t · (inserted row t)`, if `row` lies
    /// in the span. Requires tracking.
    pub(crate) fn express(&self, row: Row<A::E>) -> Option<Row<A::E>> {
        assert!(self.track, "express needs a tracking echelon");
        let a = &self.arith;
        let row = normalize_row(a, row);
        // reduce with a zero combination; the subtracted combination is -combo
        let (rest, combo) = self.reduce_sorted(row, Vec::new());
        if !rest.is_empty() {
            return None;
        }
        Some(combo.into_iter().map(|(c, v)| (c, a.neg(&v))).collect())
    }

    pub(crate) fn pivot_cols(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    /// Basis of the kernel, one vector per free column, by back substitution.
    pub(crate) fn kernel(&self) -> Vec<Vec<A::E>> {
        let a = &self.arith;
        let mut order: Vec<usize> = self.pivot_cols();
        order.reverse();
        let free: Vec<usize> = (0..self.ncols).filter(|&c| self.pivot_row[c].is_none()).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![a.zero(); self.ncols];
                x[f] = a.one();
                for &p in &order {
                    let s = &self.stored[self.pivot_row[p].unwrap() as usize];
                    let mut acc = a.zero();
                    for (c, v) in &s.row[1..] {
                        if !a.is_zero(&x[*c]) {
                            acc = a.add(&acc, &a.mul(v, &x[*c]));
                        }
                    }
                    x[p] = a.neg(&acc);
                }
                x
            })
            .collect()
    }
}

/// Convert an arbitrary ring element row when it lives in the backend's ring
/// (or in `Z` when the backend is `Q`).
pub(crate) fn lift_row<A: Arith>(a: &A, row: &[(usize, RingElem)]) -> Option<Row<A::E>> {
    row.iter().map(|(c, v)| a.lift(v).map(|e| (*c, e))).collect()
}

/// `true` when every entry of a rational vector is an integer.
pub(crate) fn is_integral(v: &[(usize, BigRational)]) -> bool {
    v.iter().all(|(_, x)| x.is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn rank_and_kernel_over_q() {
        let mut e = Echelon::new(QArith::new(), 3, false);
        assert!(e.insert(vec![(0, q(1)), (1, q(2)), (2, q(3))]).unwrap());
        assert!(e.insert(vec![(0, q(2)), (1, q(4)), (2, q(7))]).unwrap());
        assert!(!e.insert(vec![(0, q(3)), (1, q(6)), (2, q(10))]).unwrap());
        assert_eq!(e.rank(), 2);
        let k = e.kernel();
        assert_eq!(k, vec![vec![q(-2), q(1), q(0)]]);
    }

    #[test]
    fn express_recovers_combination() {
        let mut e = Echelon::new(ModArith::new(7).unwrap(), 4, true);
        e.insert(vec![(0, 1), (2, 3)]).unwrap();
        e.insert(vec![(1, 2), (2, 1), (3, 5)]).unwrap();
        e.insert(vec![(0, 4), (3, 1)]).unwrap();
        // 2*r0 + 3*r1 + 1*r2
        let target = vec![(0, 6), (1, 6), (2, 2), (3, 2)];
        let c = e.express(target).unwrap();
        assert_eq!(c, vec![(0, 2), (1, 3), (2, 1)]);
        assert!(e.express(vec![(0, 1)]).is_none());
    }

    #[test]
    fn composite_modulus_is_indeterminate_on_zero_divisor_pivot() {
        let mut e = Echelon::new(ModArith::new(6).unwrap(), 2, false);
        assert!(e.insert(vec![(0, 5), (1, 1)]).unwrap());
        assert!(matches!(e.insert(vec![(1, 2)]), Err(Error::Indeterminate { .. })));
    }
}
