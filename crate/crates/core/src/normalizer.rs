//! Membership in `G_f`, `Ḡ_f`, `Ḡ_F` and the transporter of the elementary
//! subgroup, decided through the invariant forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::combinat::Subset;
use crate::error::{Error, Result};
use crate::extrep::{cauchy_binet, exterior_torus, exterior_transvection, RepMatrix};
use crate::forms::{
    form_polarized, is_unit_poly, pencil_semi_invariance, semi_invariance, stabilizes_ideal_f, IdealStabWitness,
    MultilinearForm, PencilInvariance, SemiInvariance, Truth,
};
use crate::linalg::Matrix;
use crate::ring::{Ring, RingKind};
use crate::sample::{random_gl, rng, sample_set};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predicate {
    GF,
    GbarF,
    GbarIdealF,
    TransportsToSL,
    TransportsToGL,
}

impl Predicate {
    pub fn name(self) -> &'static str {
        match self {
            Predicate::GF => "G_f",
            Predicate::GbarF => "Gbar_f",
            Predicate::GbarIdealF => "Gbar_F",
            Predicate::TransportsToSL => "transports_E_to_SL",
            Predicate::TransportsToGL => "transports_E_to_GL",
        }
    }
}

/// Target of [`transports_elementary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `G_f`, i.e. `∧^m SL_n`.
    Gf,
    /// `Ḡ_f`, i.e. `∧^m GL_n`.
    GbarF,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// The scalar `λ` with `f(gx) = λ f(x)` (also given when it is not a unit).
    Scalar(crate::RingElem),
    /// Scalar of a conjugated transvection, as a polynomial in `ξ`.
    Pencil(Vec<crate::RingElem>),
    /// A tuple of blocks where `f(gx)` and `f(x)` are not proportional.
    Absent(Vec<Subset>),
    Ideal(IdealStabWitness),
    /// Generator `(i, j)` whose conjugate leaves the target.
    Generator(usize, usize, Box<Witness>),
    NotInvertible,
    NoDecomposition,
}

impl Witness {
    pub fn to_json(&self, ring: &Ring) -> Value {
        match self {
            Witness::Scalar(l) => json!({"lambda": ring.format_elem(l)}),
            Witness::Pencil(c) => json!({"lambda_xi": c.iter().map(|x| ring.format_elem(x)).collect::<Vec<_>>()}),
            Witness::Absent(blocks) => {
                json!({"not_proportional_at": blocks.iter().map(Subset::label).collect::<Vec<_>>()})
            }
            Witness::Ideal(w) => w.to_json(ring),
            Witness::Generator(i, j, inner) => json!({"generator": [i, j], "detail": inner.to_json(ring)}),
            Witness::NotInvertible => json!("not invertible"),
            Witness::NoDecomposition => json!("image not in the span of the generators"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub predicate: Predicate,
    pub result: Truth,
    pub witness: Option<Witness>,
}

impl MembershipVerdict {
    fn new(predicate: Predicate, result: Truth, witness: Option<Witness>) -> Self {
        MembershipVerdict {
            predicate,
            result,
            witness,
        }
    }

    fn indeterminate(predicate: Predicate) -> Self {
        Self::new(predicate, Truth::Indeterminate, None)
    }
}

fn check_params(n: usize, m: usize) -> Result<()> {
    if m == 0 || !n.is_multiple_of(m) || n / m < 3 {
        return Err(Error::params(format!(
            "need n / m an integer >= 3, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

fn standard_form(g: &RepMatrix) -> Result<MultilinearForm> {
    check_params(g.n(), g.m())?;
    form_polarized(&Subset::full(g.n())?, g.m(), &Ring::integers())
}

fn catch_indeterminate<T>(
    predicate: Predicate,
    r: Result<T>,
    f: impl FnOnce(T) -> MembershipVerdict,
) -> Result<MembershipVerdict> {
    match r {
        Ok(v) => Ok(f(v)),
        Err(Error::Indeterminate { .. }) => Ok(MembershipVerdict::indeterminate(predicate)),
        Err(e) => Err(e),
    }
}

/// `g ∈ G_f`: `f(gx) = f(x)`.
pub fn in_g_f(g: &RepMatrix) -> Result<MembershipVerdict> {
    let f = standard_form(g)?;
    let r = g.ring().clone();
    catch_indeterminate(Predicate::GF, semi_invariance(g, &f), |s| match s {
        SemiInvariance::Scalar(l) | SemiInvariance::NonUnit(l) => {
            MembershipVerdict::new(Predicate::GF, Truth::from(r.is_one(&l)), Some(Witness::Scalar(l)))
        }
        SemiInvariance::Absent(b) => MembershipVerdict::new(Predicate::GF, Truth::False, Some(Witness::Absent(b))),
    })
}

fn is_invertible(g: &RepMatrix) -> Result<bool> {
    let d = g.det()?;
    Ok(g.ring().is_unit(&d))
}

/// `g ∈ Ḡ_f`: `g` invertible and `f(gx) = λ f(x)` with `λ` a unit.
pub fn in_gbar_f(g: &RepMatrix) -> Result<MembershipVerdict> {
    let f = standard_form(g)?;
    let p = Predicate::GbarF;
    if !is_invertible(g)? {
        return Ok(MembershipVerdict::new(p, Truth::False, Some(Witness::NotInvertible)));
    }
    catch_indeterminate(p, semi_invariance(g, &f), |s| match s {
        SemiInvariance::Scalar(l) => MembershipVerdict::new(p, Truth::True, Some(Witness::Scalar(l))),
        SemiInvariance::NonUnit(l) => MembershipVerdict::new(p, Truth::False, Some(Witness::Scalar(l))),
        SemiInvariance::Absent(b) => MembershipVerdict::new(p, Truth::False, Some(Witness::Absent(b))),
    })
}

/// `g ∈ Ḡ_F` for `n` not divisible by `m`: every generator of `F` maps into
/// `F` with unit diagonal scalars.
pub fn in_gbar_ideal_f(g: &RepMatrix) -> Result<MembershipVerdict> {
    let p = Predicate::GbarIdealF;
    if !is_invertible(g)? {
        return Ok(MembershipVerdict::new(p, Truth::False, Some(Witness::NotInvertible)));
    }
    let decomposed = crate::forms::decompose_ideal_f(g)?;
    let Some(w) = decomposed else {
        return Ok(MembershipVerdict::new(p, Truth::False, Some(Witness::NoDecomposition)));
    };
    let unit = stabilizes_ideal_f(g)?.is_some();
    Ok(MembershipVerdict::new(p, Truth::from(unit), Some(Witness::Ideal(w))))
}

/// Nilpotent part `∧^m t_{i,j}(1) - e`; `∧^m t_{i,j}(ξ) = e + ξ` times it.
fn transvection_direction(n: usize, m: usize, i: usize, j: usize, ring: &Ring) -> Result<RepMatrix> {
    let t = exterior_transvection(n, m, i, j, &ring.one(), ring)?;
    let entries = t.nonzeros().into_iter().filter(|(a, b, _)| a != b);
    RepMatrix::from_triplets(n, m, ring, entries)
}

/// Does `g` conjugate every `∧^m t_{i,j}(ξ)`, `ξ` an indeterminate, into the
/// target? With `b = g N_{i,j} g^{-1}` the conjugate is `e + ξ b`, whose
/// scalar `λ(ξ)` must be `1` (for `G_f`) or a unit of `R[ξ]` (for `Ḡ_f`).
pub fn transports_elementary(g: &RepMatrix, target: Target) -> Result<MembershipVerdict> {
    let f = standard_form(g)?;
    let p = match target {
        Target::Gf => Predicate::TransportsToSL,
        Target::GbarF => Predicate::TransportsToGL,
    };
    let r = g.ring().clone();
    let ginv = match g.inverse() {
        Ok(x) => x,
        Err(Error::NotInvertible { .. }) => return Err(Error::params("transports_elementary needs an invertible g")),
        Err(e) => return Err(e),
    };
    let (n, m) = (g.n(), g.m());
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let b = g.mul(&transvection_direction(n, m, i, j, &r)?)?.mul(&ginv)?;
            let res = match pencil_semi_invariance(&b, &f) {
                Ok(x) => x,
                Err(Error::Indeterminate { .. }) => return Ok(MembershipVerdict::indeterminate(p)),
                Err(e) => return Err(e),
            };
            let fail =
                |w: Witness| MembershipVerdict::new(p, Truth::False, Some(Witness::Generator(i, j, Box::new(w))));
            match res {
                PencilInvariance::Absent(blocks) => return Ok(fail(Witness::Absent(blocks))),
                PencilInvariance::Scalar(c) => {
                    let ok = match target {
                        Target::Gf => r.is_one(&c[0]) && c[1..].iter().all(|x| r.is_zero(x)),
                        Target::GbarF => is_unit_poly(&r, &c),
                    };
                    if !ok {
                        return Ok(fail(Witness::Pencil(c)));
                    }
                }
            }
        }
    }
    Ok(MembershipVerdict::new(p, Truth::True, None))
}

/// `det(g ∧^m t_{i,j}(ξ) g^{-1}) = 1` in `R[ξ]` for all `i ≠ j`: the
/// coefficients of `det(e + ξ b)` beyond the constant vanish.
pub fn conjugate_determinants_one(g: &RepMatrix) -> Result<bool> {
    let r = g.ring().clone();
    let ginv = g.inverse()?;
    let (n, m) = (g.n(), g.m());
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let b = g.mul(&transvection_direction(n, m, i, j, &r)?)?.mul(&ginv)?;
            // det(e + ξ b) = Σ_k (-1)^k c_k ξ^k with det(t e - b) = Σ c_k t^{N-k}
            let (ring, dense) = integral(&b.to_dense());
            if dense.charpoly()[1..].iter().any(|x| !ring.is_zero(x)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Over `Q`, `D b` with `D` the lcm of the denominators: the higher
/// characteristic coefficients of `b` vanish iff those of `D b` do, and
/// Berkowitz over `Z` avoids rational normalization.
fn integral(b: &Matrix) -> (Ring, Matrix) {
    let r = b.ring();
    if !matches!(r.kind(), RingKind::Rationals) {
        return (r.clone(), b.clone());
    }
    let qs: Vec<BigRational> = b
        .entries()
        .iter()
        .map(|x| r.to_rational(x).expect("rational"))
        .collect();
    let d = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let z = Ring::integers();
    let data = qs
        .iter()
        .map(|q| z.from_bigint(&(q.numer() * (&d / q.denom()))))
        .collect();
    let m = Matrix::new(&z, b.nrows(), b.ncols(), data).expect("same shape");
    (z, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    Positive,
    Negative,
    Planted,
}

impl SampleKind {
    pub fn name(self) -> &'static str {
        match self {
            SampleKind::Positive => "positive",
            SampleKind::Negative => "negative",
            SampleKind::Planted => "planted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub index: usize,
    pub kind: SampleKind,
    pub label: String,
    pub verdicts: Vec<MembershipVerdict>,
    pub det_conjugates_one: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizerReport {
    pub n: usize,
    pub m: usize,
    pub ring: Ring,
    pub seed: u64,
    pub samples: Vec<SampleResult>,
}

impl NormalizerReport {
    pub fn consistent(&self) -> bool {
        self.samples.iter().all(|s| s.consistent)
    }

    pub fn indeterminate(&self) -> bool {
        self.samples
            .iter()
            .any(|s| s.verdicts.iter().any(|v| v.result == Truth::Indeterminate))
    }

    pub fn to_json(&self) -> Value {
        let samples: Vec<Value> = self
            .samples
            .iter()
            .map(|s| {
                let verdicts: serde_json::Map<String, Value> = s
                    .verdicts
                    .iter()
                    .map(|v| (v.predicate.name().to_string(), json!(v.result)))
                    .collect();
                let witnesses: serde_json::Map<String, Value> = s
                    .verdicts
                    .iter()
                    .filter_map(|v| {
                        v.witness
                            .as_ref()
                            .map(|w| (v.predicate.name().to_string(), w.to_json(&self.ring)))
                    })
                    .collect();
                json!({
                    "index": s.index,
                    "kind": s.kind.name(),
                    "label": s.label,
                    "verdicts": verdicts,
                    "det_conjugates_one": s.det_conjugates_one,
                    "witnesses": witnesses,
                    "consistent": s.consistent,
                })
            })
            .collect();
        json!({
            "params": {"n": self.n, "m": self.m, "ring": self.ring.to_string(), "seed": self.seed},
            "samples": samples,
            "consistent": self.consistent(),
        })
    }
}

/// Planted non-members: a torus element times a swap of two basis vectors,
/// `e + e_{I,J}` with `I ∩ J = ∅`, and a diagonal matrix scaling one basis
/// vector by a unit `≠ 1` (skipped when there is none).
pub fn planted_negatives(n: usize, m: usize, ring: &Ring) -> Result<Vec<(String, RepMatrix)>> {
    check_params(n, m)?;
    let size = crate::combinat::binomial(n, m);
    let unit = sample_set(ring)
        .into_iter()
        .find(|x| ring.is_unit(x) && !ring.is_one(x));
    let mut out = Vec::new();
    let mut swap = Matrix::zeros(ring, size, size);
    for i in 0..size {
        let j = match i {
            0 => 1,
            1 => 0,
            _ => i,
        };
        swap.set(i, j, ring.one());
    }
    let torus = exterior_torus(n, m, 1, unit.as_ref().unwrap_or(&ring.one()), ring)?;
    out.push((
        "torus_times_swap".to_string(),
        torus.mul(&RepMatrix::from_matrix(n, m, swap)?)?,
    ));
    let index = crate::combinat::SubsetIndex::new(n, m)?;
    let (a, b) = (Subset::new(n, 1..=m)?, Subset::new(n, m + 1..=2 * m)?);
    let mut t = Matrix::identity(ring, size);
    t.set(index.index_of(&a).unwrap(), index.index_of(&b).unwrap(), ring.one());
    out.push((
        format!("e+e_{}_{}", a.label(), b.label()),
        RepMatrix::from_matrix(n, m, t)?,
    ));
    if let Some(u) = unit {
        let mut d = Matrix::identity(ring, size);
        d.set(0, 0, u);
        out.push(("scale_first_coordinate".to_string(), RepMatrix::from_matrix(n, m, d)?));
    }
    Ok(out)
}

fn evaluate_sample(index: usize, kind: SampleKind, label: String, g: &RepMatrix) -> Result<SampleResult> {
    let verdicts = vec![
        in_g_f(g)?,
        in_gbar_f(g)?,
        transports_elementary(g, Target::Gf)?,
        transports_elementary(g, Target::GbarF)?,
    ];
    let det_conjugates_one = conjugate_determinants_one(g)?;
    // the G_f verdict depends on det h and is not part of the equality
    let main: Vec<Truth> = verdicts[1..].iter().map(|v| v.result).collect();
    let expected = Truth::from(kind == SampleKind::Positive);
    let consistent = det_conjugates_one && main.iter().all(|t| *t == expected);
    Ok(SampleResult {
        index,
        kind,
        label,
        verdicts,
        det_conjugates_one,
        consistent,
    })
}

/// Sample `samples` images `∧^m h` and `samples` random elements of `GL_N`
/// (plus the planted non-members when `samples > 0`), and check that
/// `Ḡ_f`-membership and both transporter predicates agree on each.
pub fn normalizer_equalities_demo(
    n: usize,
    m: usize,
    ring: &Ring,
    samples: usize,
    seed: u64,
) -> Result<NormalizerReport> {
    check_params(n, m)?;
    let size = crate::combinat::binomial(n, m);
    let mut rng = rng(seed);
    let mut cases: Vec<(SampleKind, String, RepMatrix)> = Vec::new();
    for s in 0..samples {
        let h = random_gl(n, ring, &mut rng);
        cases.push((SampleKind::Positive, format!("wedge_h_{s}"), cauchy_binet(&h, m)?));
    }
    for s in 0..samples {
        let g = random_gl(size, ring, &mut rng);
        cases.push((
            SampleKind::Negative,
            format!("random_gl_{s}"),
            RepMatrix::from_matrix(n, m, g)?,
        ));
    }
    if samples > 0 {
        for (label, g) in planted_negatives(n, m, ring)? {
            cases.push((SampleKind::Planted, label, g));
        }
    }
    let results: Vec<Result<SampleResult>> = cases
        .into_par_iter()
        .enumerate()
        .map(|(i, (kind, label, g))| evaluate_sample(i, kind, label, &g))
        .collect();
    Ok(NormalizerReport {
        n,
        m,
        ring: ring.clone(),
        seed,
        samples: results.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrep::{evaluate_word, random_word};

    fn f5() -> Ring {
        Ring::modular(5).unwrap()
    }

    #[test]
    fn g_f_examples() {
        let r = f5();
        let w = random_word(6, 8, &r, 3).unwrap();
        assert_eq!(in_g_f(&evaluate_word(&w, 6, 2).unwrap()).unwrap().result, Truth::True);
        assert_eq!(
            in_g_f(&RepMatrix::identity(6, 2, &r).unwrap()).unwrap().result,
            Truth::True
        );
        let t = exterior_torus(6, 2, 1, &r.from_i64(2), &r).unwrap();
        let v = in_g_f(&t).unwrap();
        assert_eq!(v.result, Truth::False);
        assert_eq!(v.witness, Some(Witness::Scalar(r.from_i64(2))));
        assert!(in_g_f(&RepMatrix::identity(6, 4, &r).unwrap()).is_err());
    }

    #[test]
    fn gbar_f_examples() {
        let r = f5();
        let mut rg = rng(11);
        let h = random_gl(6, &r, &mut rg);
        let v = in_gbar_f(&cauchy_binet(&h, 2).unwrap()).unwrap();
        assert_eq!(v.result, Truth::True);
        assert_eq!(v.witness, Some(Witness::Scalar(h.det().unwrap())));
        // ζ e has scalar ζ^k
        let z = RepMatrix::scalar(6, 2, &r, &r.from_i64(2)).unwrap();
        assert_eq!(in_gbar_f(&z).unwrap().witness, Some(Witness::Scalar(r.from_i64(8))));
        let mut d = Matrix::identity(&r, 15);
        d.set(3, 3, r.zero());
        let v = in_gbar_f(&RepMatrix::from_matrix(6, 2, d).unwrap()).unwrap();
        assert_eq!((v.result, v.witness), (Truth::False, Some(Witness::NotInvertible)));
    }

    #[test]
    fn transporter_examples() {
        let r = Ring::rationals();
        let id = RepMatrix::identity(6, 2, &r).unwrap();
        assert_eq!(transports_elementary(&id, Target::Gf).unwrap().result, Truth::True);
        let mut rg = rng(5);
        let h = random_gl(6, &r, &mut rg);
        let g = cauchy_binet(&h, 2).unwrap();
        assert_eq!(transports_elementary(&g, Target::Gf).unwrap().result, Truth::True);
        assert!(conjugate_determinants_one(&g).unwrap());
        let neg = RepMatrix::from_matrix(6, 2, random_gl(15, &f5(), &mut rg)).unwrap();
        let v = transports_elementary(&neg, Target::GbarF).unwrap();
        assert_eq!(v.result, Truth::False);
        assert!(
            matches!(v.witness, Some(Witness::Generator(1, 2, _))),
            "{:?}",
            v.witness
        );
        let mut sing = Matrix::identity(&r, 15);
        sing.set(0, 0, r.zero());
        assert!(transports_elementary(&RepMatrix::from_matrix(6, 2, sing).unwrap(), Target::Gf).is_err());
    }

    #[test]
    fn transporter_is_closed_under_products_and_inverses() {
        let r = f5();
        let mut rg = rng(21);
        let a = cauchy_binet(&random_gl(6, &r, &mut rg), 2).unwrap();
        let b = cauchy_binet(&random_gl(6, &r, &mut rg), 2).unwrap();
        for g in [a.mul(&b).unwrap(), a.inverse().unwrap()] {
            assert_eq!(transports_elementary(&g, Target::Gf).unwrap().result, Truth::True);
        }
    }

    #[test]
    fn ideal_predicate() {
        let r = f5();
        let id = RepMatrix::identity(7, 2, &r).unwrap();
        assert_eq!(in_gbar_ideal_f(&id).unwrap().result, Truth::True);
        let planted = planted_negatives(6, 2, &r).unwrap();
        assert_eq!(planted.len(), 3);
    }

    #[test]
    fn demo_small() {
        let report = normalizer_equalities_demo(6, 2, &f5(), 2, 7).unwrap();
        assert_eq!(report.samples.len(), 7);
        assert!(report.consistent(), "{}", report.to_json());
        let empty = normalizer_equalities_demo(6, 2, &f5(), 0, 7).unwrap();
        assert!(empty.samples.is_empty() && empty.consistent());
        assert_eq!(
            report.to_json(),
            normalizer_equalities_demo(6, 2, &f5(), 2, 7).unwrap().to_json()
        );
    }

    #[test]
    fn planted_rejected_over_small_rings() {
        for r in [Ring::modular(2).unwrap(), Ring::integers()] {
            for (label, g) in planted_negatives(6, 2, &r).unwrap() {
                let s = evaluate_sample(0, SampleKind::Planted, label.clone(), &g).unwrap();
                assert!(s.consistent, "{label} over {r}");
            }
        }
    }
}
