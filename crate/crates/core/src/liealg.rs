//! Lie algebras of the stabilizers, as kernels of the `δ`-linearized
//! stabilizer conditions over a field.
//!
//! An element `e + yδ` of `GL_N(K[δ])` acts by `x ↦ x + δ y x`, so a
//! polynomial `φ` changes by `δ Σ_{a,b} y_{a,b} x_b ∂φ/∂x_a`. Unknowns
//! `y_{I,J}` sit at position `I·N + J` (lex indices of the subsets).

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::combinat::{binomial, partitions, sign_adjoin, sign_of_masks, subsets_of_size, Subset, SubsetIndex};
use crate::error::{Error, Result};
use crate::extrep::cauchy_binet;
use crate::forms::{collapse_form, form_polarized, ideal_f_generators};
use crate::linalg::{solve_sparse, solve_sparse_i64, Matrix, SolutionSpace};
use crate::ring::{Monomial, Ring, RingElem, RingKind};

/// How a family of polynomials is to be fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixMode {
    /// Every polynomial is fixed: `D φ_h = 0`.
    Exact,
    /// The span is fixed: `D φ_h = Σ_l c_{h,l} φ_l`.
    Span,
}

fn to_field(field: &Ring, from: &Ring, c: &RingElem) -> Result<RingElem> {
    if from == field {
        return Ok(c.clone());
    }
    let q = from
        .to_rational(c)
        .ok_or_else(|| Error::DimensionMismatch(format!("coefficient in {from} does not map to {field}")))?;
    field.from_rational(&q)
}

/// Kernel of the conditions of the Lie algebra of the stabilizer of
/// `polys` (elements of `poly_ring`, coefficients in `Z`, `Q` or `field`).
/// The unknown `z_{a,b}` sits at `a·t + b` and acts by
/// `D_z φ = Σ z_{a,b} x_b ∂φ/∂x_a`. In `Span` mode the auxiliary `c_{h,l}`
/// are solved for and projected away.
pub fn lie_fix_system(poly_ring: &Ring, polys: &[RingElem], field: &Ring, mode: FixMode) -> Result<SolutionSpace> {
    if !field.is_field() {
        return Err(Error::UnsupportedRing {
            op: "lie_fix_system",
            ring: field.to_string(),
        });
    }
    let pr = poly_ring
        .poly_ring()
        .ok_or_else(|| Error::params(format!("{poly_ring} is not a polynomial ring")))?;
    let base = pr.base().clone();
    let t = pr.vars().len();
    let nz = t * t;
    let naux = if mode == FixMode::Span {
        polys.len() * polys.len()
    } else {
        0
    };
    let mut rows: HashMap<(usize, Monomial), Vec<(usize, RingElem)>> = HashMap::new();
    let as_poly = |p: &RingElem| {
        poly_ring
            .as_poly(p)
            .cloned()
            .ok_or_else(|| Error::params("not a polynomial"))
    };
    for (h, p) in polys.iter().enumerate() {
        for (mono, c) in as_poly(p)?.terms() {
            let c = to_field(field, &base, c)?;
            for (a, e) in mono.pairs() {
                // ∂/∂x_a then multiply by x_b
                let lowered: Vec<(usize, u32)> =
                    mono.pairs().map(|(v, f)| (v, if v == a { f - 1 } else { f })).collect();
                let coef = field.mul(&c, &field.from_i64(e as i64));
                if field.is_zero(&coef) {
                    continue;
                }
                for b in 0..t {
                    let target = Monomial::from_pairs(lowered.iter().copied().chain([(b, 1)]));
                    rows.entry((h, target)).or_default().push((a * t + b, coef.clone()));
                }
            }
        }
        if mode == FixMode::Span {
            for (l, q) in polys.iter().enumerate() {
                for (mono, c) in as_poly(q)?.terms() {
                    let c = to_field(field, &base, c)?;
                    rows.entry((h, mono.clone()))
                        .or_default()
                        .push((nz + h * polys.len() + l, field.neg(&c)));
                }
            }
        }
    }
    let mut keys: Vec<&(usize, Monomial)> = rows.keys().collect();
    keys.sort();
    let ordered: Vec<Vec<(usize, RingElem)>> = keys.into_iter().map(|k| rows[k].clone()).collect();
    let space = solve_sparse(field, nz + naux, ordered)?;
    if naux == 0 {
        Ok(space)
    } else {
        space.project(&(0..nz).collect::<Vec<_>>())
    }
}

/// Unknowns of the linearized form conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unknown {
    Y(Subset, Subset),
    /// `δ`-part of `λ - 1`; tagged with `V` for a generator of `F`.
    Mu(Option<Subset>),
    /// `δ`-part of `c(V_j, V_l)`.
    Cross(Subset, Subset),
}

/// A homogeneous sparse system over `Z` in the unknowns `y_{I,J}` (first
/// `N²` positions) followed by auxiliary scalars.
#[derive(Clone, Debug)]
pub struct LieSystem {
    n: usize,
    m: usize,
    field: Ring,
    index: SubsetIndex,
    aux: Vec<Unknown>,
    rows: Vec<Vec<(usize, i64)>>,
}

impl LieSystem {
    pub fn field(&self) -> &Ring {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_unknowns(&self) -> usize {
        self.index.len().pow(2) + self.aux.len()
    }

    pub fn unknown(&self, pos: usize) -> Unknown {
        let size = self.index.len();
        if pos < size * size {
            Unknown::Y(self.index.get(pos / size).clone(), self.index.get(pos % size).clone())
        } else {
            self.aux[pos - size * size].clone()
        }
    }

    pub fn rows(&self) -> &[Vec<(usize, i64)>] {
        &self.rows
    }

    /// Full solution space including auxiliary unknowns.
    pub fn solve(&self) -> Result<SolutionSpace> {
        solve_sparse_i64(&self.field, self.n_unknowns(), self.rows.iter().cloned())
    }

    /// Solution space projected to the `y` coordinates.
    pub fn solve_y(&self) -> Result<SolutionSpace> {
        let full = self.solve()?;
        if self.aux.is_empty() {
            return Ok(full);
        }
        full.project(&(0..self.index.len().pow(2)).collect::<Vec<_>>())
    }
}

fn check_field(field: &Ring, op: &'static str) -> Result<()> {
    if field.is_field() {
        Ok(())
    } else {
        Err(Error::UnsupportedRing {
            op,
            ring: field.to_string(),
        })
    }
}

/// Canonical basis tuples `K` (blocks in non-decreasing index order) with
/// `k - 1` pairwise disjoint blocks inside `v`; only these give equations.
fn candidate_keys(index: &SubsetIndex, v: &Subset, k: usize) -> Result<BTreeSet<Vec<u32>>> {
    let m = index.m();
    let mut out = BTreeSet::new();
    let mut seen_bases = BTreeSet::new();
    for part in partitions(v, m, false)? {
        // drop one block from an unordered partition of v
        for skip in 0..k {
            let mut base: Vec<u32> = part
                .blocks
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != skip)
                .map(|(_, b)| index.index_of(b).unwrap() as u32)
                .collect();
            base.sort();
            if !seen_bases.insert(base.clone()) {
                continue;
            }
            for x in 0..index.len() as u32 {
                let mut key = base.clone();
                key.push(x);
                key.sort();
                out.insert(key);
            }
        }
    }
    Ok(out)
}

/// Coefficient of `f_V` at a tuple of blocks: the sign when they partition
/// `V`, else 0.
fn form_value(masks: &[u64], v_mask: u64) -> i64 {
    if masks.iter().fold(0, |a, b| a | b) != v_mask {
        return 0;
    }
    sign_of_masks(masks) as i64
}

/// Terms `Σ_l y_{I_l, K_l} f_V(K[l → I_l])` of the `δ`-part of
/// `f_V((e + yδ) e_{K_1}, ...)`.
fn delta_terms(index: &SubsetIndex, key: &[u32], v_mask: u64, out: &mut Vec<(usize, i64)>) {
    let size = index.len();
    let masks: Vec<u64> = key.iter().map(|&b| index.mask(b as usize)).collect();
    for l in 0..key.len() {
        let mut union = 0u64;
        let mut disjoint = true;
        for (t, &mk) in masks.iter().enumerate() {
            if t != l {
                disjoint &= union & mk == 0;
                union |= mk;
            }
        }
        if !disjoint || union & !v_mask != 0 {
            continue;
        }
        let rest = v_mask & !union;
        let Some(i) = index.index_of_mask(rest) else {
            continue;
        };
        let mut swapped = masks.clone();
        swapped[l] = rest;
        let s = sign_of_masks(&swapped) as i64;
        out.push((i * size + key[l] as usize, s));
    }
}

fn merge(mut row: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| *v != 0);
    out
}

/// Linearized conditions for `f((e + yδ)x) = (1 + μδ) f(x)` with
/// `f = f^m_{[n]}`; `extended = false` fixes `μ = 0`.
pub fn form_stabilizer_system(n: usize, m: usize, field: &Ring, extended: bool) -> Result<LieSystem> {
    check_field(field, "form_stabilizer_system")?;
    if m == 0 || !n.is_multiple_of(m) || n / m < 3 {
        return Err(Error::params(format!(
            "need n / m an integer >= 3, got n = {n}, m = {m}"
        )));
    }
    let k = n / m;
    let index = SubsetIndex::new(n, m)?;
    let v = Subset::full(n)?;
    let v_mask = v.mask();
    let mu = index.len().pow(2);
    let mut rows = Vec::new();
    for key in candidate_keys(&index, &v, k)? {
        let mut row = Vec::new();
        delta_terms(&index, &key, v_mask, &mut row);
        if extended {
            let masks: Vec<u64> = key.iter().map(|&b| index.mask(b as usize)).collect();
            let fk = form_value(&masks, v_mask);
            if fk != 0 {
                row.push((mu, -fk));
            }
        }
        let row = merge(row);
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let aux = if extended { vec![Unknown::Mu(None)] } else { Vec::new() };
    Ok(LieSystem {
        n,
        m,
        field: field.clone(),
        index,
        aux,
        rows,
    })
}

/// `Lie(Ḡ_f)` (`extended`) or `Lie(G_f)`, projected to `y`.
pub fn lie_dim_form_stabilizer(n: usize, m: usize, field: &Ring, extended: bool) -> Result<SolutionSpace> {
    form_stabilizer_system(n, m, field, extended)?.solve_y()
}

/// Linearized conditions for
/// `f_{V_j}((e + yδ)x) = (1 + μ_j δ) f_{V_j}(x) + Σ_{l≠j} δ c_{j,l} f_{V_l}(x)`.
pub fn ideal_stabilizer_system(n: usize, m: usize, field: &Ring) -> Result<LieSystem> {
    check_field(field, "ideal_stabilizer_system")?;
    let gens = ideal_f_generators(n, m)?;
    let k = n / m;
    let index = SubsetIndex::new(n, m)?;
    let vs: Vec<Subset> = gens.iter().map(|f| f.support().clone()).collect();
    let p = vs.len();
    let size = index.len();
    let mut aux: Vec<Unknown> = vs.iter().map(|v| Unknown::Mu(Some(v.clone()))).collect();
    for a in &vs {
        for b in vs.iter().filter(|b| *b != a) {
            aux.push(Unknown::Cross(a.clone(), b.clone()));
        }
    }
    let cross_pos = |j: usize, l: usize| size * size + p + j * (p - 1) + if l < j { l } else { l - 1 };
    // every tuple whose (k-1)-subtuples are disjoint inside some V, which
    // includes all partitions of every V
    let mut keys = BTreeSet::new();
    for v in &vs {
        keys.extend(candidate_keys(&index, v, k)?);
    }
    let mut rows = Vec::new();
    for (j, vj) in vs.iter().enumerate() {
        let vj_mask = vj.mask();
        for key in &keys {
            let masks: Vec<u64> = key.iter().map(|&b| index.mask(b as usize)).collect();
            let mut row = Vec::new();
            delta_terms(&index, key, vj_mask, &mut row);
            for (l, vl) in vs.iter().enumerate() {
                let fl = form_value(&masks, vl.mask());
                if fl == 0 {
                    continue;
                }
                let pos = if l == j { size * size + j } else { cross_pos(j, l) };
                row.push((pos, -fl));
            }
            let row = merge(row);
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    Ok(LieSystem {
        n,
        m,
        field: field.clone(),
        index,
        aux,
        rows,
    })
}

/// `Lie(Ḡ_F)`, projected to `y`.
pub fn lie_dim_ideal_stabilizer(n: usize, m: usize, field: &Ring) -> Result<SolutionSpace> {
    ideal_stabilizer_system(n, m, field)?.solve_y()
}

/// `d∧^m(E_{a,b})` for all `a, b` (row-major in `(a, b)`), each flattened to
/// `N²` coordinates: the linear term of `cauchy_binet(e + ε E_{a,b})`.
pub fn exterior_lie_image(n: usize, m: usize, field: &Ring) -> Result<Vec<Vec<RingElem>>> {
    let pr = Ring::polynomial(field.clone(), ["eps"])?;
    let eps = pr.var("eps")?;
    let linear = Monomial::var(0);
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut t = Matrix::identity(&pr, n);
            t.set(a, b, pr.add(t.get(a, b), &eps));
            let g = cauchy_binet(&t, m)?;
            let size = g.size();
            let mut v = vec![field.zero(); size * size];
            for (i, j, x) in g.nonzeros() {
                if let Some(c) = pr.as_poly(&x).and_then(|p| p.coeff(&linear)) {
                    v[i * size + j] = c.clone();
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Counts from [`structural_relations_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub dimension: usize,
    /// `(basis vector, (I, J))` instances with `d(I, J) <= m - 2` checked to vanish.
    pub vanishing_checked: usize,
    /// Root classes `(a, b)`, `a ≠ b`; each is checked to carry one common value.
    pub root_classes: usize,
    pub root_instances_checked: usize,
    /// Instances of `y_{I,I} + y_{J,J} = y_{H,H} + y_{M,M}` checked.
    pub diagonal_checked: usize,
    pub pass: bool,
}

/// Verify the three relation families of the dimension bound on every basis
/// vector of `Lie(Ḡ_f)`.
pub fn structural_relations_check(n: usize, m: usize, field: &Ring) -> Result<StructuralReport> {
    let space = lie_dim_form_stabilizer(n, m, field, true)?;
    structural_relations_on(n, m, field, space.basis()).map(|(mut r, _)| {
        r.dimension = space.dimension();
        r
    })
}

fn structural_relations_on(
    n: usize,
    m: usize,
    field: &Ring,
    basis: &[Vec<RingElem>],
) -> Result<(StructuralReport, ())> {
    let index = SubsetIndex::new(n, m)?;
    let size = index.len();
    let y = |v: &[RingElem], i: usize, j: usize| v[i * size + j].clone();
    let mut report = StructuralReport {
        dimension: basis.len(),
        vanishing_checked: 0,
        root_classes: 0,
        root_instances_checked: 0,
        diagonal_checked: 0,
        pass: true,
    };
    for v in basis {
        for i in 0..size {
            for j in 0..size {
                let d = (index.mask(i) & index.mask(j)).count_ones() as usize;
                if d + 2 <= m {
                    report.vanishing_checked += 1;
                    report.pass &= field.is_zero(&y(v, i, j));
                }
            }
        }
    }
    let ls_all = subsets_of_size(n, m - 1);
    for a in 1..=n {
        for b in (1..=n).filter(|&b| b != a) {
            report.root_classes += 1;
            let ls: Vec<&Subset> = ls_all.iter().filter(|l| !l.contains(a) && !l.contains(b)).collect();
            for v in basis {
                let mut common: Option<RingElem> = None;
                for l in &ls {
                    let i = index.index_of(&l.with(a)?).unwrap();
                    let j = index.index_of(&l.with(b)?).unwrap();
                    let s = (sign_adjoin(l, a) * sign_adjoin(l, b)) as i64;
                    let val = field.mul(&field.from_i64(s), &y(v, i, j));
                    report.root_instances_checked += 1;
                    match &common {
                        None => common = Some(val),
                        Some(c) => report.pass &= *c == val,
                    }
                }
            }
        }
    }
    if 2 * m <= n {
        for u in subsets_of_size(n, 2 * m) {
            let sums: Vec<(usize, usize)> = partitions(&u, m, false)?
                .map(|p| {
                    (
                        index.index_of(&p.blocks[0]).unwrap(),
                        index.index_of(&p.blocks[1]).unwrap(),
                    )
                })
                .collect();
            for v in basis {
                let first = field.add(&y(v, sums[0].0, sums[0].0), &y(v, sums[0].1, sums[0].1));
                for &(i, j) in &sums[1..] {
                    report.diagonal_checked += 1;
                    report.pass &= field.add(&y(v, i, i), &y(v, j, j)) == first;
                }
            }
        }
    }
    Ok((report, ()))
}

/// Diagonal weights `K_1, ..., K_n` and the coefficients of the relation
/// `(m(k-1) - k) y_{K_1} + ((m-1)(k-1) - 1) y_{K_2} - ... - (k-1) y_{K_n} = 0`.
pub fn diagonal_relation(n: usize, m: usize) -> Result<Vec<(Subset, i64)>> {
    if m == 0 || !n.is_multiple_of(m) || n / m < 3 {
        return Err(Error::params(format!(
            "need n / m an integer >= 3, got n = {n}, m = {m}"
        )));
    }
    let (mi, ki) = (m as i64, (n / m) as i64);
    let mut out = Vec::with_capacity(n);
    for p in m..=n {
        let w = Subset::new(n, (1..m).chain([p]))?;
        let c = match p - m {
            0 => mi * (ki - 1) - ki,
            1 => (mi - 1) * (ki - 1) - 1,
            _ => -1,
        };
        out.push((w, c));
    }
    for i in (1..m).rev() {
        let w = Subset::new(n, (1..=m + 1).filter(|&e| e != i))?;
        out.push((w, -(ki - 1)));
    }
    // for m = 2 no weight repeats; merge in case a caller's weights coincide
    let mut merged: Vec<(Subset, i64)> = Vec::new();
    for (w, c) in out {
        match merged.iter_mut().find(|(x, _)| *x == w) {
            Some((_, d)) => *d += c,
            None => merged.push((w, c)),
        }
    }
    Ok(merged)
}

/// Outcome of [`verify_diagonal_relation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalReport {
    pub relation: Vec<(Subset, i64)>,
    pub dimension: usize,
    pub pass: bool,
}

/// Check the diagonal relation on every basis vector of `Lie(G_f)`.
pub fn verify_diagonal_relation(n: usize, m: usize, field: &Ring) -> Result<DiagonalReport> {
    let relation = diagonal_relation(n, m)?;
    let space = lie_dim_form_stabilizer(n, m, field, false)?;
    let pass = relation_holds(n, m, field, &relation, space.basis())?;
    Ok(DiagonalReport {
        relation,
        dimension: space.dimension(),
        pass,
    })
}

fn relation_holds(
    n: usize,
    m: usize,
    field: &Ring,
    relation: &[(Subset, i64)],
    basis: &[Vec<RingElem>],
) -> Result<bool> {
    let index = SubsetIndex::new(n, m)?;
    let size = index.len();
    for v in basis {
        let mut acc = field.zero();
        for (w, c) in relation {
            let i = index.index_of(w).unwrap();
            acc = field.add(&acc, &field.mul(&field.from_i64(*c), &v[i * size + i]));
        }
        if !field.is_zero(&acc) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For even `m`: the space from [`lie_fix_system`] on the single polynomial
/// `q(x) = f(x, ..., x)` equals `Lie(G_f)`. Returns both spaces.
pub fn collapse_agreement(n: usize, m: usize, field: &Ring) -> Result<(SolutionSpace, SolutionSpace)> {
    if !m.is_multiple_of(2) {
        return Err(Error::params("f(x, ..., x) vanishes for odd m"));
    }
    let f = form_polarized(&Subset::full(n)?, m, &Ring::integers())?;
    let (ring, q) = collapse_form(&f, field)?;
    let from_q = lie_fix_system(&ring, &[q], field, FixMode::Exact)?;
    let from_tuples = lie_dim_form_stabilizer(n, m, field, false)?;
    Ok((from_q, from_tuples))
}

/// Which system `liedim` solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieMode {
    Plain,
    Extended,
    Ideal,
    Plucker,
}

impl LieMode {
    pub fn name(self) -> &'static str {
        match self {
            LieMode::Plain => "plain",
            LieMode::Extended => "extended",
            LieMode::Ideal => "ideal",
            LieMode::Plucker => "plucker",
        }
    }
}

/// Dimension report for one Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieReport {
    pub n: usize,
    pub m: usize,
    pub field: Ring,
    pub mode: LieMode,
    pub dimension: usize,
    pub bound: usize,
    /// Relation instances checked on the basis (0 when not applicable).
    pub relations_checked: usize,
    pub pass: bool,
}

impl LieReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "field": self.field.to_string(),
            "mode": self.mode.name(),
            "dimension": self.dimension,
            "bound": self.bound,
            "relations_checked": self.relations_checked,
            "pass": self.pass,
        })
    }
}

/// Solve the selected system and compare with the bound: `n²`, or `n² - 1`
/// in plain mode. Over `Q`, where the image of `gl_n` fills the space, the
/// dimension must equal the bound; elsewhere it must not exceed it.
pub fn lie_report(n: usize, m: usize, field: &Ring, mode: LieMode) -> Result<LieReport> {
    check_field(field, "lie_report")?;
    let (space, bound) = match mode {
        LieMode::Plain => (lie_dim_form_stabilizer(n, m, field, false)?, n * n - 1),
        LieMode::Extended => (lie_dim_form_stabilizer(n, m, field, true)?, n * n),
        LieMode::Ideal => (lie_dim_ideal_stabilizer(n, m, field)?, n * n),
        LieMode::Plucker => {
            let set = crate::forms::plucker_set(n, m)?;
            (lie_fix_system(set.ring(), set.polys(), field, FixMode::Span)?, n * n)
        }
    };
    let mut relations_checked = 0;
    let mut pass = space.dimension() <= bound;
    if matches!(mode, LieMode::Plain | LieMode::Extended) {
        let (r, _) = structural_relations_on(n, m, field, space.basis())?;
        relations_checked = r.vanishing_checked + r.root_instances_checked + r.diagonal_checked;
        pass &= r.pass;
    }
    if matches!(field.kind(), RingKind::Rationals) {
        pass &= space.dimension() == bound;
    }
    Ok(LieReport {
        n,
        m,
        field: field.clone(),
        mode,
        dimension: space.dimension(),
        bound,
        relations_checked,
        pass,
    })
}

/// `C(n, m)²`, the number of `y` unknowns.
pub fn y_unknowns(n: usize, m: usize) -> usize {
    binomial(n, m).pow(2)
}
