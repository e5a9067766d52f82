//! Subsets of `[n]`, permutation signs, distances and partitions into blocks.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient size supported; subsets are tracked as 64-bit masks.
pub const MAX_N: usize = 63;

/// A strictly increasing list of elements of `[n] = {1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SubsetRepr", into = "SubsetRepr")]
pub struct Subset {
    n: u8,
    elems: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    elems: Vec<usize>,
}

impl TryFrom<SubsetRepr> for Subset {
    type Error = Error;
    fn try_from(r: SubsetRepr) -> Result<Self> {
        Subset::new(r.n, r.elems)
    }
}

impl From<Subset> for SubsetRepr {
    fn from(s: Subset) -> Self {
        SubsetRepr {
            n: s.n(),
            elems: s.iter().collect(),
        }
    }
}

impl Subset {
    pub fn new(n: usize, elems: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::params(format!("n = {n} exceeds the supported maximum {MAX_N}")));
        }
        let elems: Vec<usize> = elems.into_iter().collect();
        for w in elems.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::params(format!("subset {elems:?} is not strictly increasing")));
            }
        }
        if let Some(&e) = elems.iter().find(|&&e| e < 1 || e > n) {
            return Err(Error::params(format!("element {e} outside [1, {n}]")));
        }
        Ok(Subset {
            n: n as u8,
            elems: elems.into_iter().map(|e| e as u8).collect(),
        })
    }

    /// Sorts and deduplicates-checks an arbitrary list.
    pub fn from_unsorted(n: usize, elems: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = elems.into_iter().collect();
        v.sort_unstable();
        Subset::new(n, v)
    }

    /// `[n]` itself.
    pub fn full(n: usize) -> Result<Self> {
        Subset::new(n, 1..=n)
    }

    pub(crate) fn from_mask(n: usize, mask: u64) -> Self {
        Subset {
            n: n as u8,
            elems: (1..=n).filter(|&e| mask >> e & 1 == 1).map(|e| e as u8).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elems.iter().map(|&e| e as usize)
    }

    pub fn elems(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        i <= 255 && self.elems.binary_search(&(i as u8)).is_ok()
    }

    /// Bit `e` set for each element `e`.
    pub fn mask(&self) -> u64 {
        self.elems.iter().fold(0, |acc, &e| acc | 1 << e)
    }

    pub fn with(&self, i: usize) -> Result<Self> {
        if self.contains(i) {
            return Err(Error::params(format!("{i} already in {self}")));
        }
        Subset::from_unsorted(self.n(), self.iter().chain([i]))
    }

    pub fn without(&self, i: usize) -> Self {
        Subset {
            n: self.n,
            elems: self.elems.iter().copied().filter(|&e| e as usize != i).collect(),
        }
    }

    pub fn complement_in(&self, v: &Subset) -> Subset {
        Subset::from_mask(self.n(), v.mask() & !self.mask())
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.mask() & other.mask() == 0
    }

    /// Label in the index style `124` (or `1,2,10` when `n > 9`).
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems.iter().map(|e| e.to_string()).collect();
        if self.n <= 9 {
            write!(f, "{}", parts.concat())
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `m`-subsets of `[n]` (including `m = 0`) in lexicographic order.
pub(crate) fn subsets_of_size(n: usize, m: usize) -> Vec<Subset> {
    let mut out = Vec::with_capacity(binomial(n, m));
    if m > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=m).collect();
    loop {
        out.push(Subset {
            n: n as u8,
            elems: cur.iter().map(|&e| e as u8).collect(),
        });
        // rightmost position that can still move
        let Some(pos) = (0..m).rev().find(|&i| cur[i] < n - (m - 1 - i)) else {
            break;
        };
        cur[pos] += 1;
        for j in pos + 1..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// The index set of the representation: `m`-subsets of `[n]` in
/// lexicographic order. Position in the list is the row/column index.
pub fn enumerate_subsets(n: usize, m: usize) -> Result<Vec<Subset>> {
    if m == 0 || m > n {
        return Err(Error::params(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if n > MAX_N {
        return Err(Error::params(format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(subsets_of_size(n, m))
}

/// Sign of the permutation sorting `seq`, or 0 when an entry repeats.
pub fn sign_sequence(seq: &[i64]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the sequence `(i, L...)`: the sign of adjoining `i` to `L`.
pub fn sign_adjoin(l: &Subset, i: usize) -> i8 {
    if l.contains(i) {
        return 0;
    }
    // moving i past the elements of L smaller than it
    let below = l.iter().filter(|&e| e < i).count();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `d(I, J) = |I ∩ J|`.
pub fn distance(a: &Subset, b: &Subset) -> Result<usize> {
    if a.n() != b.n() || a.len() != b.len() {
        return Err(Error::params(format!(
            "distance needs subsets of one size and ambient set, got {a:?} and {b:?}"
        )));
    }
    Ok((a.mask() & b.mask()).count_ones() as usize)
}

/// Lookup from subsets to their position in [`enumerate_subsets`].
#[derive(Clone, Debug)]
pub struct SubsetIndex {
    n: usize,
    m: usize,
    subsets: Vec<Subset>,
    by_mask: HashMap<u64, usize>,
}

impl SubsetIndex {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let subsets = enumerate_subsets(n, m)?;
        let by_mask = subsets.iter().enumerate().map(|(i, s)| (s.mask(), i)).collect();
        Ok(SubsetIndex { n, m, subsets, by_mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn get(&self, idx: usize) -> &Subset {
        &self.subsets[idx]
    }

    pub fn index_of(&self, s: &Subset) -> Option<usize> {
        if s.n() != self.n {
            return None;
        }
        self.index_of_mask(s.mask())
    }

    pub fn index_of_mask(&self, mask: u64) -> Option<usize> {
        self.by_mask.get(&mask).copied()
    }

    pub fn mask(&self, idx: usize) -> u64 {
        self.subsets[idx].mask()
    }
}

/// An ordered sequence of pairwise disjoint blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionSeq {
    pub blocks: Vec<Subset>,
}

impl PartitionSeq {
    pub fn new(blocks: Vec<Subset>) -> Result<Self> {
        let mut seen = 0u64;
        for b in &blocks {
            if seen & b.mask() != 0 {
                return Err(Error::params(format!("blocks {blocks:?} are not disjoint")));
            }
            seen |= b.mask();
        }
        Ok(PartitionSeq { blocks })
    }

    pub fn concatenated(&self) -> Vec<i64> {
        self.blocks.iter().flat_map(|b| b.iter().map(|e| e as i64)).collect()
    }

    /// Sign of the concatenation of the blocks.
    pub fn sign(&self) -> i8 {
        sign_sequence(&self.concatenated())
    }

    pub fn union_mask(&self) -> u64 {
        self.blocks.iter().fold(0, |acc, b| acc | b.mask())
    }

    /// True when the blocks cover exactly `v`.
    pub fn is_complete_over(&self, v: &Subset) -> bool {
        self.union_mask() == v.mask()
    }
}

/// Sign of the concatenation of blocks given by masks; 0 if they overlap.
pub(crate) fn sign_of_masks(masks: &[u64]) -> i8 {
    let mut seen = 0u64;
    let mut inversions = 0u32;
    for &b in masks {
        if seen & b != 0 {
            return 0;
        }
        // every earlier element larger than an element of b is an inversion
        let mut bits = b;
        while bits != 0 {
            let e = bits.trailing_zeros();
            inversions += (seen >> e).count_ones();
            bits &= bits - 1;
        }
        seen |= b;
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Lazy stream of the partitions of `v` into `m`-element blocks.
///
/// Ordered partitions count `|V|! / (m!)^k`; unordered ones (blocks listed by
/// increasing minimum) count that divided by `k!`.
pub fn partitions(v: &Subset, m: usize, ordered: bool) -> Result<Partitions> {
    if m == 0 || !v.len().is_multiple_of(m) {
        return Err(Error::params(format!("|V| = {} is not divisible by m = {m}", v.len())));
    }
    let mut p = Partitions {
        n: v.n(),
        m,
        ordered,
        depth: v.len() / m,
        stack: Vec::new(),
        done: false,
    };
    p.descend(v.elems().iter().map(|&e| e as u8).collect());
    Ok(p)
}

#[derive(Debug)]
struct Level {
    avail: Vec<u8>,
    // indices into the choice pool of the current block
    comb: Vec<usize>,
}

#[derive(Debug)]
pub struct Partitions {
    n: usize,
    m: usize,
    ordered: bool,
    depth: usize,
    stack: Vec<Level>,
    done: bool,
}

impl Partitions {
    fn pool_len(&self, level: &Level) -> usize {
        if self.ordered {
            level.avail.len()
        } else {
            level.avail.len() - 1
        }
    }

    fn choose(&self, level: &Level) -> (Vec<u8>, Vec<u8>) {
        let offset = usize::from(!self.ordered);
        let mut block: Vec<u8> = Vec::with_capacity(self.m);
        if !self.ordered {
            block.push(level.avail[0]);
        }
        block.extend(level.comb.iter().map(|&c| level.avail[c + offset]));
        block.sort_unstable();
        let rest = level.avail.iter().copied().filter(|e| !block.contains(e)).collect();
        (block, rest)
    }

    /// Push first-choice levels until full depth.
    fn descend(&mut self, mut avail: Vec<u8>) {
        while self.stack.len() < self.depth {
            let r = if self.ordered { self.m } else { self.m - 1 };
            let level = Level {
                avail,
                comb: (0..r).collect(),
            };
            let (_, rest) = self.choose(&level);
            self.stack.push(level);
            avail = rest;
        }
    }

    fn advance(&mut self) {
        while let Some(mut level) = self.stack.pop() {
            let s = self.pool_len(&level);
            let r = level.comb.len();
            if let Some(pos) = (0..r).rev().find(|&i| level.comb[i] < s - (r - i)) {
                level.comb[pos] += 1;
                for j in pos + 1..r {
                    level.comb[j] = level.comb[j - 1] + 1;
                }
                let (_, rest) = self.choose(&level);
                self.stack.push(level);
                self.descend(rest);
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = PartitionSeq;

    fn next(&mut self) -> Option<PartitionSeq> {
        if self.done {
            return None;
        }
        let blocks = self
            .stack
            .iter()
            .map(|level| {
                let (block, _) = self.choose(level);
                Subset {
                    n: self.n as u8,
                    elems: block,
                }
            })
            .collect();
        if self.depth == 0 {
            self.done = true;
        } else {
            self.advance();
        }
        Some(PartitionSeq { blocks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn s(n: usize, e: &[usize]) -> Subset {
        Subset::new(n, e.iter().copied()).unwrap()
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn enumeration_order_and_counts() {
        let l = enumerate_subsets(3, 2).unwrap();
        assert_eq!(l, vec![s(3, &[1, 2]), s(3, &[1, 3]), s(3, &[2, 3])]);
        assert_eq!(enumerate_subsets(5, 2).unwrap().len(), 10);
        let l = enumerate_subsets(6, 3).unwrap();
        assert_eq!(l.len(), 20);
        assert_eq!(l[0], s(6, &[1, 2, 3]));
        assert_eq!(l[19], s(6, &[4, 5, 6]));
        assert!(enumerate_subsets(3, 4).is_err());
        assert!(enumerate_subsets(3, 0).is_err());
    }

    #[test]
    fn sequence_signs() {
        assert_eq!(sign_sequence(&[1, 2, 3, 4]), 1);
        assert_eq!(sign_sequence(&[1, 3, 2, 4, 5, 6]), -1);
        assert_eq!(sign_sequence(&[2, 2, 5]), 0);
        assert_eq!(sign_sequence(&[]), 1);
    }

    #[test]
    fn adjoin_signs() {
        assert_eq!(sign_adjoin(&s(5, &[2, 3]), 1), 1);
        assert_eq!(sign_adjoin(&s(5, &[1, 3]), 2), -1);
        assert_eq!(sign_adjoin(&s(5, &[1, 2]), 2), 0);
        assert_eq!(sign_adjoin(&s(5, &[]), 4), 1);
    }

    #[test]
    fn distances() {
        let i = s(7, &[1, 2, 4]);
        assert_eq!(distance(&i, &i).unwrap(), 3);
        assert_eq!(distance(&s(4, &[1, 2]), &s(4, &[3, 4])).unwrap(), 0);
        assert_eq!(distance(&i, &s(7, &[2, 4, 7])).unwrap(), 2);
        assert!(distance(&i, &s(7, &[2, 4])).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(s(5, &[1, 2, 4]).to_string(), "124");
        assert_eq!(s(12, &[1, 2, 10]).to_string(), "1,2,10");
    }

    #[test]
    fn small_partition_lists() {
        let v = Subset::full(4).unwrap();
        let got: Vec<String> = partitions(&v, 2, false)
            .unwrap()
            .map(|p| p.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("|"))
            .collect();
        assert_eq!(got, vec!["12|34", "13|24", "14|23"]);
        assert_eq!(partitions(&Subset::full(6).unwrap(), 2, true).unwrap().count(), 90);
        assert_eq!(partitions(&Subset::full(6).unwrap(), 3, false).unwrap().count(), 10);
        assert!(partitions(&Subset::full(5).unwrap(), 2, true).is_err());
    }

    #[test]
    fn partition_counts_match_formula() {
        for m in [2usize, 3] {
            for n in (m..=9).filter(|n| n % m == 0) {
                let k = n / m;
                let v = Subset::full(n).unwrap();
                let ordered = factorial(n) / factorial(m).pow(k as u32);
                assert_eq!(partitions(&v, m, true).unwrap().count(), ordered, "n={n} m={m}");
                assert_eq!(partitions(&v, m, false).unwrap().count(), ordered / factorial(k));
            }
        }
    }

    /// Brute-force oracle: read off the blocks of every permutation of V.
    #[test]
    fn ordered_partitions_match_permutation_oracle() {
        fn perms(v: &[usize]) -> Vec<Vec<usize>> {
            if v.len() <= 1 {
                return vec![v.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut rest = v.to_vec();
                let x = rest.remove(i);
                for mut p in perms(&rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        let v = Subset::from_unsorted(7, [1, 3, 4, 6, 7, 2]).unwrap();
        let want: HashSet<Vec<Subset>> = perms(&v.elems())
            .into_iter()
            .map(|p| {
                p.chunks(2)
                    .map(|c| Subset::from_unsorted(7, c.iter().copied()).unwrap())
                    .collect()
            })
            .collect();
        let got: HashSet<Vec<Subset>> = partitions(&v, 2, true).unwrap().map(|p| p.blocks).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn partitions_of_a_proper_subset() {
        let v = s(7, &[1, 2, 4, 5, 6, 7]);
        for p in partitions(&v, 3, false).unwrap() {
            assert!(p.is_complete_over(&v));
        }
    }

    #[test]
    fn mask_signs_agree_with_sequence_signs() {
        for p in partitions(&Subset::full(6).unwrap(), 2, true).unwrap() {
            let masks: Vec<u64> = p.blocks.iter().map(Subset::mask).collect();
            assert_eq!(sign_of_masks(&masks), p.sign());
        }
        assert_eq!(sign_of_masks(&[0b110, 0b100]), 0);
    }

    /// Exchanging `i` in the first block with `j` in the second is a single
    /// transposition once both are moved to the front of their blocks.
    #[test]
    fn element_swap_between_blocks_flips_sign() {
        for m in [2usize, 3] {
            let v = Subset::full(3 * m).unwrap();
            for p in partitions(&v, m, true).unwrap().take(200) {
                let (a, b) = (&p.blocks[0], &p.blocks[1]);
                for i in a.iter() {
                    for j in b.iter() {
                        let (l1, l2) = (a.without(i), b.without(j));
                        let mut q = p.clone();
                        q.blocks[0] = l1.with(j).unwrap();
                        q.blocks[1] = l2.with(i).unwrap();
                        let lhs = sign_adjoin(&l1, i) * sign_adjoin(&l2, j) * p.sign();
                        let rhs = sign_adjoin(&l1, j) * sign_adjoin(&l2, i) * q.sign();
                        assert_eq!(lhs, -rhs);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn sign_is_a_homomorphism(
            seq in prop::collection::vec(-20i64..20, 0..9),
            perm in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let perm: Vec<usize> = perm.into_iter().filter(|&i| i < seq.len()).collect();
            let permuted: Vec<i64> = perm.iter().map(|&i| seq[i]).collect();
            let sigma: Vec<i64> = perm.iter().map(|&i| i as i64).collect();
            prop_assert_eq!(sign_sequence(&permuted), sign_sequence(&sigma) * sign_sequence(&seq));
        }

        #[test]
        fn distance_properties(a in prop::sample::subsequence((1..=8usize).collect::<Vec<_>>(), 3),
                               b in prop::sample::subsequence((1..=8usize).collect::<Vec<_>>(), 3)) {
            let (a, b) = (s(8, &a), s(8, &b));
            let d = distance(&a, &b).unwrap();
            prop_assert_eq!(d, distance(&b, &a).unwrap());
            prop_assert!(d <= 3);
            prop_assert_eq!(d == 3, a == b);
        }
    }
}
