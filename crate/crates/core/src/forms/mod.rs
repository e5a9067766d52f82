//! Invariant multilinear forms, Plücker polynomials, the ideal of forms
//! `F`, and their stabilizers.

mod ideal;
pub(crate) mod kernel;
mod plucker;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::combinat::{partitions, sign_of_masks, Subset, SubsetIndex};
use crate::error::{Error, Result};
use crate::extrep::{exterior_transvection_factors, RepMatrix};
use crate::linalg::{solve_sparse_i64, SolutionSpace};
use crate::ring::{Ring, RingElem, RingKind};
use kernel::{Generic, ModK, Outputs, Rows, Scalar, Trunc, I128};

pub use ideal::{
    decompose_ideal_f, ideal_f_generators, independent_mod_p, preserves_ideal_f, stabilizes_ideal_f, Generators,
    IdealStabWitness,
};
pub use plucker::{
    coordinate_name, coordinate_ring, plucker_poly, plucker_set, stabilizes_plucker, substitute_linear, PluckerCheck,
    PluckerSet,
};

/// Three-valued outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// Behaviour of a form under permutation of its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    Symmetric,
    /// Changes sign under a transposition and vanishes on repeated arguments.
    Alternating,
}

/// A k-linear form on `R^N`, `N = C(n, m)`, stored as its nonzero
/// coefficients on k-tuples of basis subsets.
#[derive(Clone, Debug)]
pub struct MultilinearForm {
    n: usize,
    m: usize,
    k: usize,
    support: Subset,
    ring: Ring,
    index: Arc<SubsetIndex>,
    coeffs: BTreeMap<Vec<u32>, RingElem>,
    symmetry: Symmetry,
}

impl PartialEq for MultilinearForm {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.m, self.k) == (other.n, other.m, other.k)
            && self.ring == other.ring
            && self.coeffs == other.coeffs
    }
}

impl Eq for MultilinearForm {}

/// `f^m_V`: the sum over ordered partitions `(I_1, ..., I_k)` of `V` into
/// `m`-blocks of `sign(I_1, ..., I_k) x^1_{I_1} ... x^k_{I_k}`.
pub fn form_polarized(v: &Subset, m: usize, ring: &Ring) -> Result<MultilinearForm> {
    let n = v.n();
    if m == 0 || m > n {
        return Err(Error::params(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    let index = Arc::new(SubsetIndex::new(n, m)?);
    let mut coeffs = BTreeMap::new();
    for p in partitions(v, m, true)? {
        let key: Vec<u32> = p
            .blocks
            .iter()
            .map(|b| index.index_of(b).expect("block") as u32)
            .collect();
        coeffs.insert(key, ring.from_i64(p.sign() as i64));
    }
    let symmetry = if m.is_multiple_of(2) {
        Symmetry::Symmetric
    } else {
        Symmetry::Alternating
    };
    Ok(MultilinearForm {
        n,
        m,
        k: v.len() / m,
        support: v.clone(),
        ring: ring.clone(),
        index,
        coeffs,
        symmetry,
    })
}

impl MultilinearForm {
    /// A form from explicit coefficients; blocks of every key must be
    /// pairwise disjoint `m`-subsets of `[n]`.
    pub fn from_coeffs(
        n: usize,
        m: usize,
        k: usize,
        ring: &Ring,
        coeffs: impl IntoIterator<Item = (Vec<Subset>, RingElem)>,
    ) -> Result<Self> {
        let index = Arc::new(SubsetIndex::new(n, m)?);
        let mut map = BTreeMap::new();
        let mut union = 0u64;
        for (blocks, v) in coeffs {
            if blocks.len() != k {
                return Err(Error::params(format!(
                    "key with {} blocks for a {k}-linear form",
                    blocks.len()
                )));
            }
            let masks: Vec<u64> = blocks.iter().map(Subset::mask).collect();
            if sign_of_masks(&masks) == 0 {
                return Err(Error::params(format!("blocks {blocks:?} are not pairwise disjoint")));
            }
            let key = blocks
                .iter()
                .map(|b| index.index_of(b).map(|i| i as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| Error::IndexMismatch(format!("blocks {blocks:?} are not {m}-subsets of [{n}]")))?;
            if ring.is_zero(&v) {
                continue;
            }
            union |= masks.iter().fold(0, |a, b| a | b);
            let e = map.entry(key).or_insert_with(|| ring.zero());
            *e = ring.add(e, &v);
        }
        map.retain(|_, v| !ring.is_zero(v));
        Ok(MultilinearForm {
            n,
            m,
            k,
            support: Subset::from_mask(n, union),
            ring: ring.clone(),
            index,
            coeffs: map,
            symmetry: Symmetry::None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Union of all blocks carrying a nonzero coefficient.
    pub fn support(&self) -> &Subset {
        &self.support
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    /// Number of nonzero coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, blocks: &[Subset]) -> RingElem {
        let key: Option<Vec<u32>> = blocks
            .iter()
            .map(|b| self.index.index_of(b).map(|i| i as u32))
            .collect();
        key.and_then(|k| self.coeffs.get(&k).cloned())
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<Subset>, &RingElem)> + '_ {
        self.coeffs
            .iter()
            .map(|(key, v)| (key.iter().map(|&i| self.index.get(i as usize).clone()).collect(), v))
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (&Vec<u32>, &RingElem)> {
        self.coeffs.iter()
    }

    pub(crate) fn raw_coeff(&self, key: &[u32]) -> Option<&RingElem> {
        self.coeffs.get(key)
    }

    /// Coefficients mapped into `target`; the form's ring must be `target`
    /// or `Z`.
    pub fn embed(&self, target: &Ring) -> Result<MultilinearForm> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        if !matches!(self.ring.kind(), RingKind::Integers) {
            return Err(Error::DimensionMismatch(format!(
                "cannot map a form over {} into {target}",
                self.ring
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                let z = self.ring.to_rational(v).expect("integer").to_integer();
                (k.clone(), target.embed_base(&base_elem(target, &z)))
            })
            .filter(|(_, v)| !target.is_zero(v))
            .collect();
        Ok(MultilinearForm {
            ring: target.clone(),
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &RingElem) -> MultilinearForm {
        let r = &self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), r.mul(c, v)))
            .filter(|(_, v)| !r.is_zero(v))
            .collect();
        MultilinearForm { coeffs, ..self.clone() }
    }

    /// Coefficients at [`graded_keys`]; other coefficients are dropped.
    pub fn to_graded_vector(&self) -> Result<Vec<RingElem>> {
        Ok(graded_keys(self.n, self.m)?
            .iter()
            .map(|k| self.coeffs.get(k).cloned().unwrap_or_else(|| self.ring.zero()))
            .collect())
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .terms()
            .map(|(blocks, v)| {
                json!({
                    "blocks": blocks.iter().map(Subset::label).collect::<Vec<_>>(),
                    "value": self.ring.format_elem(v),
                })
            })
            .collect();
        json!({
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "V": self.support.label(),
            "ring": self.ring.to_string(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<MultilinearForm> {
        let bad = |why: &str| Error::parse("form JSON", why);
        let get = |key: &str| {
            v[key]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| bad("missing n, m or k"))
        };
        let (n, m, k) = (get("n")?, get("m")?, get("k")?);
        let ring: Ring = v["ring"].as_str().ok_or_else(|| bad("missing ring"))?.parse()?;
        let index = SubsetIndex::new(n, m)?;
        let labels: BTreeMap<String, Subset> = index.subsets().iter().map(|s| (s.label(), s.clone())).collect();
        let mut coeffs = Vec::new();
        for c in v["coeffs"].as_array().ok_or_else(|| bad("missing coeffs"))? {
            let blocks = c["blocks"]
                .as_array()
                .ok_or_else(|| bad("missing blocks"))?
                .iter()
                .map(|b| {
                    b.as_str()
                        .and_then(|l| labels.get(l).cloned())
                        .ok_or_else(|| bad("unknown block label"))
                })
                .collect::<Result<Vec<_>>>()?;
            let value = ring.parse_elem(c["value"].as_str().ok_or_else(|| bad("missing value"))?)?;
            coeffs.push((blocks, value));
        }
        MultilinearForm::from_coeffs(n, m, k, &ring, coeffs)
    }

    fn outputs(&self) -> Outputs {
        match self.symmetry {
            Symmetry::None => Outputs::All,
            Symmetry::Symmetric => Outputs::NonDecreasing,
            Symmetry::Alternating => Outputs::Increasing,
        }
    }
}

fn base_elem(target: &Ring, z: &BigInt) -> RingElem {
    match target.kind() {
        RingKind::Polynomial(r) => r.base().clone().from_bigint(z),
        _ => target.from_bigint(z),
    }
}

/// `Σ coeff · Π_l x^l_{I_l}`.
pub fn evaluate_form(f: &MultilinearForm, vectors: &[Vec<RingElem>]) -> Result<RingElem> {
    if vectors.len() != f.k {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors for a {}-linear form",
            vectors.len(),
            f.k
        )));
    }
    let size = f.index.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != size) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for N = {size}",
            v.len()
        )));
    }
    let r = &f.ring;
    let mut acc = r.zero();
    for (key, c) in &f.coeffs {
        let mut t = c.clone();
        for (l, &i) in key.iter().enumerate() {
            t = r.mul(&t, &vectors[l][i as usize]);
            if r.is_zero(&t) {
                break;
            }
        }
        acc = r.add(&acc, &t);
    }
    Ok(acc)
}

fn check_dims(g: &RepMatrix, f: &MultilinearForm) -> Result<()> {
    if (g.n(), g.m()) != (f.n, f.m) {
        return Err(Error::DimensionMismatch(format!(
            "matrix for (n, m) = ({}, {}) acting on a form for ({}, {})",
            g.n(),
            g.m(),
            f.n,
            f.m
        )));
    }
    Ok(())
}

fn generic_rows(g: &RepMatrix) -> Rows<RingElem> {
    g.sparse_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|(j, v)| (j as u32, v)).collect())
        .collect()
}

/// `(x^1, ..., x^k) ↦ f(g x^1, ..., g x^k)`.
pub fn act_on_form(g: &RepMatrix, f: &MultilinearForm) -> Result<MultilinearForm> {
    check_dims(g, f)?;
    let f = f.embed(g.ring())?;
    let r = g.ring().clone();
    let nidx = f.index.len();
    let coeffs: Vec<(Vec<u32>, RingElem)> = f.coeffs.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let outputs = f.outputs();
    let t = kernel::contract(&Generic(r.clone()), nidx, f.k, &coeffs, &generic_rows(g), outputs)?;
    let mut out = BTreeMap::new();
    kernel::for_each_output(nidx, f.k, outputs, |p, key| {
        let v = &t[p];
        if r.is_zero(v) {
            return true;
        }
        match f.symmetry {
            Symmetry::None => {
                out.insert(key.to_vec(), v.clone());
            }
            Symmetry::Symmetric | Symmetry::Alternating => {
                for (perm, sign) in permutations_with_sign(key.len()) {
                    let pk: Vec<u32> = perm.iter().map(|&i| key[i]).collect();
                    let val = if f.symmetry == Symmetry::Alternating && sign < 0 {
                        r.neg(v)
                    } else {
                        v.clone()
                    };
                    out.insert(pk, val);
                }
            }
        }
        true
    });
    Ok(MultilinearForm {
        coeffs: out,
        ring: r,
        ..f
    })
}

fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i8)> {
    if k == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations_with_sign(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            // inserting the largest element before (len - pos) others
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Outcome of a semi-invariance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiInvariance {
    /// `act(g, f) = λ f` with `λ` a unit.
    Scalar(RingElem),
    /// `act(g, f) = λ f` but `λ` is not a unit.
    NonUnit(RingElem),
    /// No multiple of `f` matches; first differing key.
    Absent(Vec<Subset>),
}

/// Key with coefficient `±1`, if any: `(position, is -1)`.
fn unit_pivot(f: &MultilinearForm, coeffs: &[(Vec<u32>, RingElem)]) -> Option<(usize, bool)> {
    let r = &f.ring;
    let minus = r.neg(&r.one());
    coeffs
        .iter()
        .position(|(_, v)| r.is_one(v))
        .map(|p| (p, false))
        .or_else(|| coeffs.iter().position(|(_, v)| *v == minus).map(|p| (p, true)))
}

/// Normalize so that some coefficient is `±1`, when one is a unit.
type Pivoted = (MultilinearForm, Vec<(Vec<u32>, RingElem)>, (usize, bool));

fn with_unit_pivot(f: MultilinearForm) -> Option<Pivoted> {
    let coeffs: Vec<(Vec<u32>, RingElem)> = f.coeffs.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    if let Some(p) = unit_pivot(&f, &coeffs) {
        return Some((f, coeffs, p));
    }
    let r = f.ring.clone();
    let u = coeffs.iter().find(|(_, v)| r.is_unit(v))?.1.clone();
    let g = f.scale(&r.inverse(&u).ok()?);
    let coeffs: Vec<(Vec<u32>, RingElem)> = g.coeffs.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let p = unit_pivot(&g, &coeffs)?;
    Some((g, coeffs, p))
}

fn key_subsets(f: &MultilinearForm, key: &[u32]) -> Vec<Subset> {
    key.iter().map(|&i| f.index.get(i as usize).clone()).collect()
}

/// Test whether `act(g, f) = λ f` for some `λ`, and find it.
pub fn semi_invariance(g: &RepMatrix, f: &MultilinearForm) -> Result<SemiInvariance> {
    check_dims(g, f)?;
    let r = g.ring().clone();
    let f = f.embed(&r)?;
    if f.is_empty() {
        return Err(Error::params("semi-invariance of the zero form"));
    }
    let Some((f, coeffs, pivot)) = with_unit_pivot(f) else {
        return Err(Error::params("form has no unit coefficient"));
    };
    let nidx = f.index.len();
    let outputs = f.outputs();
    let rows = generic_rows(g);
    let lambda: std::result::Result<RingElem, Vec<u32>> = match r.kind() {
        RingKind::Modular(k) => {
            let a = ModK(k);
            let rows_e = map_rows(&rows, |v| r.residue(v).expect("residue"));
            let coeffs_e = map_coeffs(&coeffs, |v| r.residue(v).expect("residue"));
            match kernel::scalar_multiple(&a, nidx, f.k, &coeffs_e, pivot, &rows_e, outputs)? {
                Scalar::Found(l) => Ok(r.from_bigint(&BigInt::from(l))),
                Scalar::Absent(key) => Err(key),
            }
        }
        RingKind::Integers | RingKind::Rationals => {
            let fast = kernel::scaled_integer_rows(&r, &rows).and_then(|(d, rows_i)| {
                let coeffs_i: Option<Vec<(Vec<u32>, i128)>> = coeffs
                    .iter()
                    .map(|(k, v)| kernel::ring_to_i128(&r, v).map(|x| (k.clone(), x)))
                    .collect();
                let coeffs_i = coeffs_i?;
                let cmax = coeffs_i.iter().map(|(_, v)| v.unsigned_abs()).max().unwrap_or(1);
                kernel::i128_safe(cmax, &rows_i, nidx, f.k).then_some((d, rows_i, coeffs_i))
            });
            match fast {
                Some((d, rows_i, coeffs_i)) => {
                    match kernel::scalar_multiple(&I128, nidx, f.k, &coeffs_i, pivot, &rows_i, outputs)? {
                        Scalar::Found(l) => Ok(kernel::i128_to_ring(&r, l, &d.pow(f.k as u32))),
                        Scalar::Absent(key) => Err(key),
                    }
                }
                None => generic_scalar(&r, nidx, &f, &coeffs, pivot, &rows, outputs)?,
            }
        }
        _ => generic_scalar(&r, nidx, &f, &coeffs, pivot, &rows, outputs)?,
    };
    Ok(match lambda {
        Ok(l) if r.is_unit(&l) => SemiInvariance::Scalar(l),
        Ok(l) => SemiInvariance::NonUnit(l),
        Err(key) => SemiInvariance::Absent(key_subsets(&f, &key)),
    })
}

fn generic_scalar(
    r: &Ring,
    nidx: usize,
    f: &MultilinearForm,
    coeffs: &[(Vec<u32>, RingElem)],
    pivot: (usize, bool),
    rows: &Rows<RingElem>,
    outputs: Outputs,
) -> Result<std::result::Result<RingElem, Vec<u32>>> {
    Ok(
        match kernel::scalar_multiple(&Generic(r.clone()), nidx, f.k, coeffs, pivot, rows, outputs)? {
            Scalar::Found(l) => Ok(l),
            Scalar::Absent(key) => Err(key),
        },
    )
}

fn map_rows<E>(rows: &Rows<RingElem>, f: impl Fn(&RingElem) -> E) -> Rows<E> {
    rows.iter()
        .map(|r| r.iter().map(|(j, v)| (*j, f(v))).collect())
        .collect()
}

fn map_coeffs<E>(coeffs: &[(Vec<u32>, RingElem)], f: impl Fn(&RingElem) -> E) -> Vec<(Vec<u32>, E)> {
    coeffs.iter().map(|(k, v)| (k.clone(), f(v))).collect()
}

/// `λ` with `act(g, f) = λ f`, when it exists and is a unit.
pub fn semi_invariance_scalar(g: &RepMatrix, f: &MultilinearForm) -> Result<Option<RingElem>> {
    Ok(match semi_invariance(g, f)? {
        SemiInvariance::Scalar(l) => Some(l),
        _ => None,
    })
}

/// Semi-invariance of `a = e + ξ b` over `R[ξ]` for an indeterminate `ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilInvariance {
    /// `f(a x) = λ(ξ) f(x)`; coefficients of `λ` by degree.
    Scalar(Vec<RingElem>),
    Absent(Vec<Subset>),
}

/// Decide semi-invariance of `e + ξ b` with `ξ` an indeterminate over the
/// ring of `b`, computing in truncated polynomials of degree `<= k`.
pub fn pencil_semi_invariance(b: &RepMatrix, f: &MultilinearForm) -> Result<PencilInvariance> {
    check_dims(b, f)?;
    let r = b.ring().clone();
    let f = f.embed(&r)?;
    let Some((f, coeffs, pivot)) = with_unit_pivot(f) else {
        return Err(Error::params("form has no unit coefficient"));
    };
    let nidx = f.index.len();
    let len = f.k + 1;
    let outputs = f.outputs();
    // entries of e + ξ b as coefficient vectors [const, ξ]
    let brows = generic_rows(b);
    let mut rows: Vec<Vec<(u32, Vec<RingElem>)>> = Vec::with_capacity(nidx);
    for (i, row) in brows.iter().enumerate() {
        let mut out: Vec<(u32, Vec<RingElem>)> = Vec::with_capacity(row.len() + 1);
        let mut saw_diag = false;
        for (j, v) in row {
            let mut e = vec![r.zero(); len];
            if *j as usize == i {
                e[0] = r.one();
                saw_diag = true;
            }
            e[1] = v.clone();
            out.push((*j, e));
        }
        if !saw_diag {
            let mut e = vec![r.zero(); len];
            e[0] = r.one();
            out.push((i as u32, e));
            out.sort_by_key(|(j, _)| *j);
        }
        rows.push(out);
    }
    let lift = |v: &RingElem| {
        let mut e = vec![r.zero(); len];
        e[0] = v.clone();
        e
    };
    let coeffs_p: Vec<(Vec<u32>, Vec<RingElem>)> = coeffs.iter().map(|(k, v)| (k.clone(), lift(v))).collect();
    let result: std::result::Result<Vec<RingElem>, Vec<u32>> = match r.kind() {
        RingKind::Modular(k) => {
            let a = Trunc { base: ModK(k), len };
            let res = |v: &RingElem| r.residue(v).expect("residue");
            let rows_e: Rows<Vec<u64>> = rows
                .iter()
                .map(|row| row.iter().map(|(j, e)| (*j, e.iter().map(res).collect())).collect())
                .collect();
            let coeffs_e: Vec<(Vec<u32>, Vec<u64>)> = coeffs_p
                .iter()
                .map(|(key, e)| (key.clone(), e.iter().map(res).collect()))
                .collect();
            match kernel::scalar_multiple(&a, nidx, f.k, &coeffs_e, pivot, &rows_e, outputs)? {
                Scalar::Found(l) => Ok(l.into_iter().map(|x| r.from_bigint(&BigInt::from(x))).collect()),
                Scalar::Absent(key) => Err(key),
            }
        }
        RingKind::Integers | RingKind::Rationals => {
            // clear denominators over all entries, identity included
            let flat_rows: Vec<Vec<(u32, RingElem)>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .flat_map(|(j, e)| e.iter().map(move |v| (*j, v.clone())))
                        .collect()
                })
                .collect();
            let scaled = kernel::scaled_integer_rows(&r, &flat_rows);
            let fast = scaled.and_then(|(d, _)| {
                let dq = num_rational::BigRational::from_integer(d.clone());
                let to_i = |v: &RingElem| -> Option<i128> {
                    let x = r.to_rational(v)? * &dq;
                    num_traits::ToPrimitive::to_i64(&x.to_integer()).map(|x| x as i128)
                };
                let rows_i: Option<Rows<Vec<i128>>> = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|(j, e)| e.iter().map(to_i).collect::<Option<Vec<_>>>().map(|e| (*j, e)))
                            .collect()
                    })
                    .collect();
                let rows_i = rows_i?;
                let coeffs_i: Option<Vec<(Vec<u32>, Vec<i128>)>> = coeffs_p
                    .iter()
                    .map(|(key, e)| {
                        e.iter()
                            .map(|v| kernel::ring_to_i128(&r, v))
                            .collect::<Option<Vec<_>>>()
                            .map(|e| (key.clone(), e))
                    })
                    .collect();
                let coeffs_i = coeffs_i?;
                let flat_i: Rows<i128> = rows_i
                    .iter()
                    .map(|row| row.iter().flat_map(|(j, e)| e.iter().map(move |v| (*j, *v))).collect())
                    .collect();
                let cmax = coeffs_i
                    .iter()
                    .flat_map(|(_, e)| e.iter().map(|v| v.unsigned_abs()))
                    .max()
                    .unwrap_or(1);
                kernel::i128_safe(cmax, &flat_i, nidx * len, f.k).then_some((d, rows_i, coeffs_i))
            });
            match fast {
                Some((d, rows_i, coeffs_i)) => {
                    let a = Trunc { base: I128, len };
                    let scale = d.pow(f.k as u32);
                    match kernel::scalar_multiple(&a, nidx, f.k, &coeffs_i, pivot, &rows_i, outputs)? {
                        Scalar::Found(l) => Ok(l.into_iter().map(|x| kernel::i128_to_ring(&r, x, &scale)).collect()),
                        Scalar::Absent(key) => Err(key),
                    }
                }
                None => generic_pencil(&r, nidx, &f, &coeffs_p, pivot, &rows, outputs, len)?,
            }
        }
        _ => generic_pencil(&r, nidx, &f, &coeffs_p, pivot, &rows, outputs, len)?,
    };
    Ok(match result {
        Ok(l) => PencilInvariance::Scalar(l),
        Err(key) => PencilInvariance::Absent(key_subsets(&f, &key)),
    })
}

#[allow(clippy::too_many_arguments)]
fn generic_pencil(
    r: &Ring,
    nidx: usize,
    f: &MultilinearForm,
    coeffs: &[(Vec<u32>, Vec<RingElem>)],
    pivot: (usize, bool),
    rows: &Rows<Vec<RingElem>>,
    outputs: Outputs,
    len: usize,
) -> Result<std::result::Result<Vec<RingElem>, Vec<u32>>> {
    let a = Trunc {
        base: Generic(r.clone()),
        len,
    };
    Ok(
        match kernel::scalar_multiple(&a, nidx, f.k, coeffs, pivot, rows, outputs)? {
            Scalar::Found(l) => Ok(l),
            Scalar::Absent(key) => Err(key),
        },
    )
}

/// Is `c_0 + c_1 ξ + ...` a unit of `R[ξ]`: unit constant term, nilpotent rest.
pub fn is_unit_poly(ring: &Ring, coeffs: &[RingElem]) -> bool {
    !coeffs.is_empty() && ring.is_unit(&coeffs[0]) && coeffs[1..].iter().all(|c| ring.is_nilpotent(c))
}

/// Coordinates of the forms of grading `(1, ..., 1)`: ordered partitions of
/// `[n]` into `m`-blocks, as keys of block indices in lex order.
pub fn graded_keys(n: usize, m: usize) -> Result<Vec<Vec<u32>>> {
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::params(format!("m = {m} does not divide n = {n}")));
    }
    let index = SubsetIndex::new(n, m)?;
    let mut keys: Vec<Vec<u32>> = partitions(&Subset::full(n)?, m, true)?
        .map(|p| {
            p.blocks
                .iter()
                .map(|b| index.index_of(b).expect("block") as u32)
                .collect()
        })
        .collect();
    keys.sort();
    Ok(keys)
}

/// Forms of grading `(1, ..., 1)` fixed by every `∧^m t_{i,j}(1)`, as a
/// subspace of the coordinates [`graded_keys`].
///
/// A source key `K` moves under `∧^m t_{i,j}(1)` only through the block
/// holding `j` (when it lacks `i`), and the result has `i` twice. Exactly
/// one other partition `K'` (swap `i` and `j` between their blocks) lands
/// on the same key, so each condition is `s_K a_K + s_{K'} a_{K'} = 0`.
pub fn semi_invariant_space(n: usize, m: usize, field: &Ring) -> Result<SolutionSpace> {
    if !field.is_field() {
        return Err(Error::UnsupportedRing {
            op: "semi_invariant_space",
            ring: field.to_string(),
        });
    }
    let keys = graded_keys(n, m)?;
    let index = SubsetIndex::new(n, m)?;
    let nidx = index.len();
    let position: std::collections::HashMap<&[u32], usize> =
        keys.iter().enumerate().map(|(p, k)| (k.as_slice(), p)).collect();
    let z = Ring::integers();
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            // column block -> (row block, sign) of ∧t_{i,j}(1)
            let mut up: Vec<Option<(u32, i64)>> = vec![None; nidx];
            for t in exterior_transvection_factors(n, m, i, j, &z.one(), &z)? {
                let sign = z.to_i64(&t.coeff).expect("sign");
                up[index.index_of(&t.col).unwrap()] = Some((index.index_of(&t.row).unwrap() as u32, sign));
            }
            for (p, key) in keys.iter().enumerate() {
                let Some(l) = key.iter().position(|&b| up[b as usize].is_some()) else {
                    continue;
                };
                let li = key
                    .iter()
                    .position(|&b| index.get(b as usize).contains(i))
                    .expect("partition");
                let (row_l, s_k) = up[key[l] as usize].unwrap();
                // K' = K with i and j exchanged between slots l and li
                let mut other = key.clone();
                other[l] = row_l;
                let swapped = index.get(key[li] as usize).without(i).with(j)?;
                other[li] = index.index_of(&swapped).unwrap() as u32;
                let q = position[other.as_slice()];
                if q < p {
                    continue;
                }
                let s_other = up[other[li] as usize].expect("block with j").1;
                rows.push(vec![(p, s_k), (q, s_other)]);
            }
        }
    }
    solve_sparse_i64(field, keys.len(), rows)
}

/// `q(x) = f(x, ..., x)` as a polynomial in the coordinates `x_I` over `base`.
pub fn collapse_form(f: &MultilinearForm, base: &Ring) -> Result<(Ring, RingElem)> {
    let ring = coordinate_ring(f.n, f.m, base)?;
    let f = f.embed(base)?;
    let vars: Vec<RingElem> = f
        .index
        .subsets()
        .iter()
        .map(|s| ring.var(&coordinate_name(s)).expect("coordinate"))
        .collect();
    let mut acc = ring.zero();
    for (key, c) in &f.coeffs {
        let mut t = ring.embed_base(c);
        for &i in key {
            t = ring.mul(&t, &vars[i as usize]);
        }
        acc = ring.add(&acc, &t);
    }
    Ok((ring, acc))
}

#[cfg(test)]
mod tests;
