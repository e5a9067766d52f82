//! Staged contraction `T[J] = Σ_I c_I Π_l g[I_l, J_l]` of a k-linear
//! coefficient tensor against a matrix, one slot at a time, on a dense
//! `N^k` array.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::ring::modular::{add_mod, mul_mod, neg_mod};
use crate::ring::{Ring, RingElem, RingKind};

/// Largest dense tensor the kernel will allocate.
pub(crate) const MAX_TENSOR: usize = 1 << 25;

/// Which output keys are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outputs {
    All,
    /// `J_1 <= J_2 <= ...`; enough for symmetric tensors.
    NonDecreasing,
    /// `J_1 < J_2 < ...`; enough for alternating tensors.
    Increasing,
}

impl Outputs {
    #[inline]
    fn admits(self, prev: Option<usize>, next: usize) -> bool {
        match (self, prev) {
            (Outputs::All, _) | (_, None) => true,
            (Outputs::NonDecreasing, Some(p)) => next >= p,
            (Outputs::Increasing, Some(p)) => next > p,
        }
    }
}

pub(crate) trait KArith: Sync {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul_add(&self, acc: &mut Self::E, a: &Self::E, b: &Self::E);
    fn neg(&self, a: &Self::E) -> Self::E;
}

pub(crate) struct ModK(pub u64);

impl KArith for ModK {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    #[inline]
    fn mul_add(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = add_mod(*acc, mul_mod(*a, *b, self.0), self.0);
    }
    fn neg(&self, a: &u64) -> u64 {
        neg_mod(*a, self.0)
    }
}

/// Exact integers, valid only under a precomputed magnitude bound.
pub(crate) struct I128;

impl KArith for I128 {
    type E = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        a * b
    }
    #[inline]
    fn mul_add(&self, acc: &mut i128, a: &i128, b: &i128) {
        *acc += a * b;
    }
    fn neg(&self, a: &i128) -> i128 {
        -a
    }
}

pub(crate) struct Generic(pub Ring);

impl KArith for Generic {
    type E = RingElem;
    fn zero(&self) -> RingElem {
        self.0.zero()
    }
    fn is_zero(&self, a: &RingElem) -> bool {
        self.0.is_zero(a)
    }
    fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.0.mul(a, b)
    }
    fn mul_add(&self, acc: &mut RingElem, a: &RingElem, b: &RingElem) {
        *acc = self.0.add(acc, &self.0.mul(a, b));
    }
    fn neg(&self, a: &RingElem) -> RingElem {
        self.0.neg(a)
    }
}

/// Polynomials of degree `< len` over a base backend, truncated on product.
pub(crate) struct Trunc<A: KArith> {
    pub base: A,
    pub len: usize,
}

impl<A: KArith> KArith for Trunc<A> {
    type E = Vec<A::E>;
    fn zero(&self) -> Vec<A::E> {
        vec![self.base.zero(); self.len]
    }
    fn is_zero(&self, a: &Vec<A::E>) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
    fn mul(&self, a: &Vec<A::E>, b: &Vec<A::E>) -> Vec<A::E> {
        let mut out = self.zero();
        self.mul_add(&mut out, a, b);
        out
    }
    fn mul_add(&self, acc: &mut Vec<A::E>, a: &Vec<A::E>, b: &Vec<A::E>) {
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(self.len - i) {
                if !self.base.is_zero(y) {
                    self.base.mul_add(&mut acc[i + j], x, y);
                }
            }
        }
    }
    fn neg(&self, a: &Vec<A::E>) -> Vec<A::E> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
}

/// Sparse rows of the matrix in backend elements: `rows[I] = [(J, g[I,J])]`.
pub(crate) type Rows<E> = Vec<Vec<(u32, E)>>;

pub(crate) fn tensor_len(nidx: usize, k: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..k {
        len = len
            .checked_mul(nidx)
            .filter(|&l| l <= MAX_TENSOR)
            .ok_or_else(|| Error::params(format!("coefficient tensor {nidx}^{k} exceeds the supported size")))?;
    }
    Ok(len)
}

#[inline]
pub(crate) fn flat(key: &[u32], nidx: usize) -> usize {
    key.iter().fold(0usize, |acc, &x| acc * nidx + x as usize)
}

/// Dense `T` with `T[J]` correct at every key admitted by `outputs`.
pub(crate) fn contract<A: KArith>(
    a: &A,
    nidx: usize,
    k: usize,
    coeffs: &[(Vec<u32>, A::E)],
    rows: &Rows<A::E>,
    outputs: Outputs,
) -> Result<Vec<A::E>> {
    let len = tensor_len(nidx, k)?;
    let mut cur = vec![a.zero(); len];
    let mut live: Vec<usize> = Vec::with_capacity(coeffs.len());
    for (key, v) in coeffs {
        let p = flat(key, nidx);
        if a.is_zero(&cur[p]) {
            live.push(p);
        }
        cur[p] = v.clone();
    }
    // stride of slot l
    let strides: Vec<usize> = (0..k).map(|l| nidx.pow((k - 1 - l) as u32)).collect();
    for slot in 0..k {
        let mut next = vec![a.zero(); len];
        let mut next_live = Vec::new();
        let stride = strides[slot];
        for &p in &live {
            let v = &cur[p];
            if a.is_zero(v) {
                continue;
            }
            let i = (p / stride) % nidx;
            let prev = (slot > 0).then(|| (p / strides[slot - 1]) % nidx);
            let base = p - i * stride;
            for (j, gij) in &rows[i] {
                let j = *j as usize;
                if !outputs.admits(prev, j) {
                    continue;
                }
                let q = base + j * stride;
                if a.is_zero(&next[q]) {
                    next_live.push(q);
                }
                a.mul_add(&mut next[q], v, gij);
            }
        }
        next_live.sort_unstable();
        next_live.dedup();
        cur = next;
        live = next_live;
    }
    Ok(cur)
}

/// Visit every key admitted by `outputs` as `(flat position, key)`.
pub(crate) fn for_each_output(nidx: usize, k: usize, outputs: Outputs, mut f: impl FnMut(usize, &[u32]) -> bool) {
    if k == 0 {
        f(0, &[]);
        return;
    }
    let mut key = vec![0u32; k];
    fn first(outputs: Outputs, prev: u32) -> u32 {
        match outputs {
            Outputs::All => 0,
            Outputs::NonDecreasing => prev,
            Outputs::Increasing => prev + 1,
        }
    }
    // initialize
    for slot in 1..k {
        key[slot] = first(outputs, key[slot - 1]);
    }
    loop {
        if key.iter().all(|&x| (x as usize) < nidx) && !f(flat(&key, nidx), &key) {
            return;
        }
        // advance odometer from the last slot
        let mut slot = k;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            key[slot] += 1;
            if (key[slot] as usize) < nidx {
                break;
            }
        }
        for s in slot + 1..k {
            key[s] = first(outputs, key[s - 1]);
        }
    }
}

/// Result of comparing `T` against `λ c`.
pub(crate) enum Scalar<E> {
    /// `T = λ c` on all checked keys.
    Found(E),
    /// `T` differs from every multiple of `c`, first at this key.
    Absent(Vec<u32>),
}

/// Contract and test `T = λ c`, reading `λ = ±T[K0]` from a key with
/// coefficient `±1`.
pub(crate) fn scalar_multiple<A: KArith>(
    a: &A,
    nidx: usize,
    k: usize,
    coeffs: &[(Vec<u32>, A::E)],
    pivot: (usize, bool),
    rows: &Rows<A::E>,
    outputs: Outputs,
) -> Result<Scalar<A::E>> {
    let len = tensor_len(nidx, k)?;
    let t = contract(a, nidx, k, coeffs, rows, outputs)?;
    let (k0, negated) = pivot;
    let p0 = flat(&coeffs[k0].0, nidx);
    let lambda = if negated { a.neg(&t[p0]) } else { t[p0].clone() };
    let mut c = vec![a.zero(); len];
    for (key, v) in coeffs {
        c[flat(key, nidx)] = v.clone();
    }
    let mut bad = None;
    for_each_output(nidx, k, outputs, |p, key| {
        let want = if a.is_zero(&c[p]) {
            a.zero()
        } else {
            a.mul(&lambda, &c[p])
        };
        if t[p] != want {
            bad = Some(key.to_vec());
            return false;
        }
        true
    });
    Ok(match bad {
        Some(key) => Scalar::Absent(key),
        None => Scalar::Found(lambda),
    })
}

/// Integer view of a rational matrix after clearing denominators:
/// `(D, D*g)` when every scaled entry fits in `i64`.
pub(crate) fn scaled_integer_rows(ring: &Ring, rows: &[Vec<(u32, RingElem)>]) -> Option<(BigInt, Rows<i128>)> {
    if !matches!(ring.kind(), RingKind::Integers | RingKind::Rationals) {
        return None;
    }
    let mut d = BigInt::one();
    for row in rows {
        for (_, v) in row {
            d = d.lcm(ring.to_rational(v)?.denom());
        }
    }
    let dq = BigRational::from_integer(d.clone());
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for (j, v) in row {
            let x = (ring.to_rational(v)? * &dq).to_integer();
            r.push((*j, x.to_i64()? as i128));
        }
        out.push(r);
    }
    Some((d, out))
}

/// `true` when `cmax * (gmax * nidx)^k` stays below `2^125`.
pub(crate) fn i128_safe(cmax: u128, rows: &Rows<i128>, nidx: usize, k: usize) -> bool {
    let gmax = rows
        .iter()
        .flat_map(|r| r.iter().map(|(_, v)| v.unsigned_abs()))
        .max()
        .unwrap_or(0)
        .max(1);
    let step = match gmax.checked_mul(nidx as u128) {
        Some(s) => s,
        None => return false,
    };
    let mut bound = cmax.max(1);
    for _ in 0..k {
        bound = match bound.checked_mul(step) {
            Some(b) => b,
            None => return false,
        };
    }
    bound < (1u128 << 125)
}

pub(crate) fn i128_to_ring(ring: &Ring, v: i128, scale: &BigInt) -> RingElem {
    let q = BigRational::new(BigInt::from(v), scale.clone());
    match ring.kind() {
        RingKind::Integers => {
            assert!(q.is_integer(), "integral scalar over Z");
            ring.from_bigint(&q.to_integer())
        }
        _ => ring.from_rational(&q).expect("rational"),
    }
}

pub(crate) fn ring_to_i128(ring: &Ring, v: &RingElem) -> Option<i128> {
    let q = ring.to_rational(v)?;
    if !q.is_integer() || q.numer().abs() > BigInt::from(i64::MAX) {
        return None;
    }
    q.numer().to_i64().map(|x| x as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_enumeration_counts() {
        let count = |o| {
            let mut c = 0;
            for_each_output(5, 3, o, |_, _| {
                c += 1;
                true
            });
            c
        };
        assert_eq!(count(Outputs::All), 125);
        assert_eq!(count(Outputs::NonDecreasing), 35);
        assert_eq!(count(Outputs::Increasing), 10);
    }

    #[test]
    fn contraction_matches_direct_sum() {
        // 2-linear form on Z^3, g arbitrary
        let a = I128;
        let coeffs = vec![(vec![0, 1], 1i128), (vec![1, 0], 1), (vec![2, 2], -3)];
        let g = [[1i128, 2, 0], [0, 1, 5], [4, 0, 1]];
        let rows: Rows<i128> = g
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(j, v)| (j as u32, *v))
                    .collect()
            })
            .collect();
        let t = contract(&a, 3, 2, &coeffs, &rows, Outputs::All).unwrap();
        for j1 in 0..3 {
            for j2 in 0..3 {
                let mut want = 0;
                for (key, c) in &coeffs {
                    want += c * g[key[0] as usize][j1] * g[key[1] as usize][j2];
                }
                assert_eq!(t[j1 * 3 + j2], want);
            }
        }
    }

    #[test]
    fn truncated_products() {
        let a = Trunc { base: ModK(7), len: 3 };
        let x = vec![1, 2, 0];
        let y = vec![3, 1, 5];
        // (1 + 2t)(3 + t + 5t^2) = 3 + 7t + 7t^2 + ... = 3 + 0t + 0t^2 mod 7
        assert_eq!(a.mul(&x, &y), vec![3, 0, 0]);
    }
}
