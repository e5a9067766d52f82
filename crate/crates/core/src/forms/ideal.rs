//! The ideal `F` of forms for `m ∤ n`, its stabilizer, and independence of
//! generator families modulo a prime.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use super::{act_on_form, form_polarized, MultilinearForm, PluckerSet};
use crate::combinat::{enumerate_subsets, Subset};
use crate::error::{Error, Result};
use crate::extrep::RepMatrix;
use crate::linalg::echelon::{Echelon, ModArith};
use crate::linalg::Matrix;
use crate::ring::modular::is_prime;
use crate::ring::{Ring, RingElem};

/// One polarized form `f^m_V` over `Z` per `ml`-subset `V` of `[n]`,
/// `l = floor(n / m)`, in lex order of `V`.
pub fn ideal_f_generators(n: usize, m: usize) -> Result<Vec<MultilinearForm>> {
    if m == 0 || m > n {
        return Err(Error::params(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if n.is_multiple_of(m) {
        return Err(Error::params(format!(
            "m = {m} divides n = {n}; use form_polarized on [n]"
        )));
    }
    let l = n / m;
    if l < 2 {
        return Err(Error::params(format!("floor(n / m) = {l}, need at least 2")));
    }
    let z = Ring::integers();
    enumerate_subsets(n, m * l)?
        .iter()
        .map(|v| form_polarized(v, m, &z))
        .collect()
}

/// Scalars exhibiting `f_{V_j}(g x) = λ_{V_j} f_{V_j}(x) + Σ_{l≠j} c(V_j, V_l) f_{V_l}(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealStabWitness {
    pub lambdas: BTreeMap<Subset, RingElem>,
    /// Every pair `(V_j, V_l)` with `l ≠ j`, zeros included.
    pub cross: BTreeMap<(Subset, Subset), RingElem>,
}

impl IdealStabWitness {
    pub fn to_json(&self, ring: &Ring) -> Value {
        let lambdas: serde_json::Map<String, Value> = self
            .lambdas
            .iter()
            .map(|(v, l)| (v.label(), json!(ring.format_elem(l))))
            .collect();
        let cross: Vec<Value> = self
            .cross
            .iter()
            .map(|((a, b), c)| json!({"from": a.label(), "to": b.label(), "value": ring.format_elem(c)}))
            .collect();
        json!({"lambdas": lambdas, "cross": cross})
    }

    /// `(c_{j,l})` with `λ_{V_j}` on the diagonal, rows and columns in lex
    /// order of `V`.
    pub fn coefficient_matrix(&self, ring: &Ring) -> Matrix {
        let vs: Vec<&Subset> = self.lambdas.keys().collect();
        Matrix::from_fn(ring, vs.len(), vs.len(), |j, l| {
            if j == l {
                self.lambdas[vs[j]].clone()
            } else {
                self.cross[&(vs[j].clone(), vs[l].clone())].clone()
            }
        })
    }
}

/// Decompose every `act(g, f_{V_j})` over the generators of `F`, without
/// any condition on the scalars. The generators have pairwise disjoint
/// supports and coefficient `+1` at the identity partition, so each
/// coefficient is read off and the whole expansion is then verified.
pub fn decompose_ideal_f(g: &RepMatrix) -> Result<Option<IdealStabWitness>> {
    let r = g.ring().clone();
    let gens: Vec<MultilinearForm> = ideal_f_generators(g.n(), g.m())?
        .iter()
        .map(|f| f.embed(&r))
        .collect::<Result<_>>()?;
    let pivots: Vec<Vec<u32>> = gens
        .iter()
        .map(|f| {
            let (key, c) = f.raw_terms().next().expect("nonempty generator");
            debug_assert!(r.is_one(c));
            key.clone()
        })
        .collect();
    let mut lambdas = BTreeMap::new();
    let mut cross = BTreeMap::new();
    for (j, fj) in gens.iter().enumerate() {
        let image = act_on_form(g, fj)?;
        let coefs: Vec<RingElem> = pivots
            .iter()
            .map(|k| image.raw_coeff(k).cloned().unwrap_or_else(|| r.zero()))
            .collect();
        let mut expected: BTreeMap<Vec<u32>, RingElem> = BTreeMap::new();
        for (fl, c) in gens.iter().zip(&coefs) {
            if r.is_zero(c) {
                continue;
            }
            for (key, v) in fl.raw_terms() {
                expected.insert(key.clone(), r.mul(c, v));
            }
        }
        let matches = expected.len() == image.len() && image.raw_terms().all(|(k, v)| expected.get(k) == Some(v));
        if !matches {
            return Ok(None);
        }
        for (l, c) in coefs.into_iter().enumerate() {
            if l == j {
                lambdas.insert(fj.support().clone(), c);
            } else {
                cross.insert((fj.support().clone(), gens[l].support().clone()), c);
            }
        }
    }
    Ok(Some(IdealStabWitness { lambdas, cross }))
}

/// Membership in `Ḡ_F` as defined with unit scalars: the decomposition
/// exists and every `λ_{V_j}` is a unit.
///
/// For `g = ∧^m h` the scalar `λ_V` is the principal minor `det h_{V,V}`,
/// which need not be a unit; see [`preserves_ideal_f`] for the condition
/// that holds on all of `∧^m GL_n`.
pub fn stabilizes_ideal_f(g: &RepMatrix) -> Result<Option<IdealStabWitness>> {
    let r = g.ring();
    Ok(decompose_ideal_f(g)?.filter(|w| w.lambdas.values().all(|l| r.is_unit(l))))
}

/// Does `g` map the degree-`k` part of `F` onto itself: the decomposition
/// exists and its coefficient matrix is invertible.
pub fn preserves_ideal_f(g: &RepMatrix) -> Result<bool> {
    let Some(w) = decompose_ideal_f(g)? else {
        return Ok(false);
    };
    w.coefficient_matrix(g.ring()).is_invertible()
}

/// A family of polynomials or forms with integer coefficients, viewed as
/// coefficient vectors over a common set of monomial keys.
pub trait Generators {
    fn coefficient_rows(&self) -> Vec<Vec<(Vec<u32>, i64)>>;
}

impl Generators for PluckerSet {
    fn coefficient_rows(&self) -> Vec<Vec<(Vec<u32>, i64)>> {
        let base = self.ring().poly_ring().expect("polynomial ring").base().clone();
        self.polys()
            .iter()
            .map(|p| {
                self.ring()
                    .as_poly(p)
                    .expect("polynomial")
                    .terms()
                    .map(|(mono, c)| {
                        let key = mono
                            .pairs()
                            .flat_map(|(v, e)| std::iter::repeat_n(v as u32, e as usize))
                            .collect();
                        (key, base.to_i64(c).expect("integer coefficient"))
                    })
                    .collect()
            })
            .collect()
    }
}

impl Generators for [MultilinearForm] {
    fn coefficient_rows(&self) -> Vec<Vec<(Vec<u32>, i64)>> {
        self.iter()
            .map(|f| {
                f.raw_terms()
                    .map(|(k, v)| (k.clone(), f.ring().to_i64(v).expect("integer coefficient")))
                    .collect()
            })
            .collect()
    }
}

impl Generators for Vec<MultilinearForm> {
    fn coefficient_rows(&self) -> Vec<Vec<(Vec<u32>, i64)>> {
        self.as_slice().coefficient_rows()
    }
}

/// Are the coefficient vectors linearly independent over `F_p`?
///
/// Fast path: every generator has a key with coefficient `±1` that no other
/// generator uses (specializing to that monomial isolates it). Otherwise
/// the rank is computed.
pub fn independent_mod_p<G: Generators + ?Sized>(gens: &G, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::params(format!("{p} is not prime")));
    }
    let rows = gens.coefficient_rows();
    let mut owners: HashMap<&Vec<u32>, usize> = HashMap::new();
    for row in &rows {
        for (k, _) in row {
            *owners.entry(k).or_insert(0) += 1;
        }
    }
    let isolated = rows
        .iter()
        .all(|row| row.iter().any(|(k, v)| v.abs() == 1 && owners[k] == 1));
    if isolated {
        return Ok(true);
    }
    let keys: BTreeSet<&Vec<u32>> = owners.keys().copied().collect();
    let col: HashMap<&Vec<u32>, usize> = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut ech = Echelon::new(ModArith::new(p)?, col.len(), false);
    for row in &rows {
        let r: Vec<(usize, i64)> = row.iter().map(|(k, v)| (col[k], *v)).collect();
        if !ech.insert_i64(&r)? {
            return Ok(false);
        }
    }
    Ok(true)
}
