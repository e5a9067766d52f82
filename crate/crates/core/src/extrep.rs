//! Exterior powers of matrices: the minor map, closed forms for exterior
//! transvections and torus elements, elementary words and the residue.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combinat::{binomial, sign_adjoin, subsets_of_size, Subset, SubsetIndex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{Ring, RingElem};
use crate::sample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Storage {
    Dense,
    Sparse,
}

#[derive(Clone)]
enum Repr {
    Dense(Matrix),
    Sparse(BTreeMap<(usize, usize), RingElem>),
}

/// An `N x N` matrix, `N = C(n, m)`, indexed by `m`-subsets of `[n]` in
/// lexicographic order.
#[derive(Clone)]
pub struct RepMatrix {
    n: usize,
    m: usize,
    ring: Ring,
    index: Arc<SubsetIndex>,
    zero: RingElem,
    repr: Repr,
}

impl RepMatrix {
    fn with_repr(n: usize, m: usize, ring: &Ring, repr: Repr) -> Result<Self> {
        let index = Arc::new(SubsetIndex::new(n, m)?);
        Ok(RepMatrix {
            n,
            m,
            ring: ring.clone(),
            index,
            zero: ring.zero(),
            repr,
        })
    }

    pub fn from_matrix(n: usize, m: usize, g: Matrix) -> Result<Self> {
        let size = binomial(n, m);
        if g.nrows() != size || g.ncols() != size {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} matrix cannot index the exterior power (n, m) = ({n}, {m}) of size {size}",
                g.nrows(),
                g.ncols()
            )));
        }
        let ring = g.ring().clone();
        RepMatrix::with_repr(n, m, &ring, Repr::Dense(g))
    }

    /// Sparse matrix from `(row, col, value)` triplets; zero values are dropped,
    /// repeated positions are rejected.
    pub fn from_triplets(
        n: usize,
        m: usize,
        ring: &Ring,
        triplets: impl IntoIterator<Item = (usize, usize, RingElem)>,
    ) -> Result<Self> {
        let size = binomial(n, m);
        let mut entries = BTreeMap::new();
        for (i, j, v) in triplets {
            if i >= size || j >= size {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside size {size}"
                )));
            }
            if entries.contains_key(&(i, j)) {
                return Err(Error::params(format!("entry ({i}, {j}) given twice")));
            }
            if !ring.is_zero(&v) {
                entries.insert((i, j), v);
            }
        }
        RepMatrix::with_repr(n, m, ring, Repr::Sparse(entries))
    }

    pub fn identity(n: usize, m: usize, ring: &Ring) -> Result<Self> {
        let size = binomial(n, m);
        RepMatrix::from_triplets(n, m, ring, (0..size).map(|i| (i, i, ring.one())))
    }

    pub fn scalar(n: usize, m: usize, ring: &Ring, c: &RingElem) -> Result<Self> {
        let size = binomial(n, m);
        RepMatrix::from_triplets(n, m, ring, (0..size).map(|i| (i, i, c.clone())))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `N = C(n, m)`.
    pub fn size(&self) -> usize {
        self.index.len()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    pub fn storage(&self) -> Storage {
        match self.repr {
            Repr::Dense(_) => Storage::Dense,
            Repr::Sparse(_) => Storage::Sparse,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        match &self.repr {
            Repr::Dense(g) => g.get(i, j),
            Repr::Sparse(e) => e.get(&(i, j)).unwrap_or(&self.zero),
        }
    }

    /// Entry at rows `I`, columns `J`.
    pub fn entry(&self, row: &Subset, col: &Subset) -> Option<&RingElem> {
        Some(self.get(self.index.index_of(row)?, self.index.index_of(col)?))
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, RingElem)> {
        match &self.repr {
            Repr::Dense(g) => {
                let mut out = Vec::new();
                for i in 0..g.nrows() {
                    for (j, v) in g.row(i).iter().enumerate() {
                        if !self.ring.is_zero(v) {
                            out.push((i, j, v.clone()));
                        }
                    }
                }
                out
            }
            Repr::Sparse(e) => e.iter().map(|(&(i, j), v)| (i, j, v.clone())).collect(),
        }
    }

    /// Nonzero entries grouped by row.
    pub fn sparse_rows(&self) -> Vec<Vec<(usize, RingElem)>> {
        let mut rows = vec![Vec::new(); self.size()];
        for (i, j, v) in self.nonzeros() {
            rows[i].push((j, v));
        }
        rows
    }

    pub fn to_dense(&self) -> Matrix {
        match &self.repr {
            Repr::Dense(g) => g.clone(),
            Repr::Sparse(_) => Matrix::from_fn(&self.ring, self.size(), self.size(), |i, j| self.get(i, j).clone()),
        }
    }

    pub fn with_storage(&self, storage: Storage) -> RepMatrix {
        let repr = match storage {
            Storage::Dense => Repr::Dense(self.to_dense()),
            Storage::Sparse => Repr::Sparse(self.nonzeros().into_iter().map(|(i, j, v)| ((i, j), v)).collect()),
        };
        RepMatrix { repr, ..self.clone() }
    }

    fn check_compatible(&self, other: &RepMatrix) -> Result<()> {
        if (self.n, self.m) != (other.n, other.m) || self.ring != other.ring {
            return Err(Error::DimensionMismatch(format!(
                "({}, {}) over {} vs ({}, {}) over {}",
                self.n, self.m, self.ring, other.n, other.m, other.ring
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &RepMatrix) -> Result<RepMatrix> {
        self.check_compatible(other)?;
        let r = &self.ring;
        if let (Repr::Sparse(_), Repr::Sparse(_)) = (&self.repr, &other.repr) {
            let rows = other.sparse_rows();
            let mut acc: BTreeMap<(usize, usize), RingElem> = BTreeMap::new();
            for (i, l, a) in self.nonzeros() {
                for (j, b) in &rows[l] {
                    let e = acc.entry((i, *j)).or_insert_with(|| r.zero());
                    *e = r.add(e, &r.mul(&a, b));
                }
            }
            return RepMatrix::from_triplets(self.n, self.m, r, acc.into_iter().map(|((i, j), v)| (i, j, v)));
        }
        let prod = self.to_dense().mul(&other.to_dense())?;
        RepMatrix::from_matrix(self.n, self.m, prod)
    }

    pub fn inverse(&self) -> Result<RepMatrix> {
        RepMatrix::from_matrix(self.n, self.m, self.to_dense().inverse()?)
    }

    pub fn det(&self) -> Result<RingElem> {
        self.to_dense().det()
    }

    pub fn mul_vec(&self, x: &[RingElem]) -> Result<Vec<RingElem>> {
        if x.len() != self.size() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for size {}",
                x.len(),
                self.size()
            )));
        }
        let r = &self.ring;
        let mut out = vec![r.zero(); self.size()];
        for (i, j, v) in self.nonzeros() {
            out[i] = r.add(&out[i], &r.mul(&v, &x[j]));
        }
        Ok(out)
    }

    /// Apply a ring map entrywise, e.g. an embedding into a polynomial ring.
    pub fn map_ring(&self, target: &Ring, f: impl Fn(&RingElem) -> RingElem) -> RepMatrix {
        let repr = match &self.repr {
            Repr::Dense(g) => Repr::Dense(g.map(target, &f)),
            Repr::Sparse(e) => Repr::Sparse(
                e.iter()
                    .map(|(k, v)| (*k, f(v)))
                    .filter(|(_, v)| !target.is_zero(v))
                    .collect(),
            ),
        };
        RepMatrix {
            ring: target.clone(),
            zero: target.zero(),
            repr,
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        let r = &self.ring;
        let size = self.size();
        let nz = self.nonzeros();
        nz.len() == size && nz.iter().all(|(i, j, v)| i == j && r.is_one(v))
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<RingElem> {
        (0..self.size()).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let r = &self.ring;
        let entries = match self.storage() {
            Storage::Dense => Value::Array(
                (0..self.size())
                    .map(|i| {
                        Value::Array(
                            (0..self.size())
                                .map(|j| Value::String(r.format_elem(self.get(i, j))))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
            Storage::Sparse => Value::Array(
                self.nonzeros()
                    .into_iter()
                    .map(|(i, j, v)| {
                        json!({
                            "row": self.index.get(i).label(),
                            "col": self.index.get(j).label(),
                            "value": r.format_elem(&v),
                        })
                    })
                    .collect(),
            ),
        };
        json!({
            "ring": r.to_string(),
            "n": self.n,
            "m": self.m,
            "index_order": "lex",
            "storage": self.storage(),
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<RepMatrix> {
        let bad = |why: &str| Error::parse(v.to_string().chars().take(80).collect::<String>(), why);
        let ring: Ring = v["ring"].as_str().ok_or_else(|| bad("missing ring"))?.parse()?;
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let m = v["m"].as_u64().ok_or_else(|| bad("missing m"))? as usize;
        if v["index_order"] != "lex" {
            return Err(bad("index_order must be \"lex\""));
        }
        let storage: Storage = serde_json::from_value(v["storage"].clone()).map_err(|_| bad("bad storage"))?;
        let index = SubsetIndex::new(n, m)?;
        let size = index.len();
        let entries = v["entries"].as_array().ok_or_else(|| bad("missing entries"))?;
        let elem = |x: &Value| -> Result<RingElem> {
            ring.parse_elem(x.as_str().ok_or_else(|| bad("entry is not a string"))?)
        };
        match storage {
            Storage::Dense => {
                if entries.len() != size {
                    return Err(bad("wrong number of rows"));
                }
                let mut data = Vec::with_capacity(size * size);
                for row in entries {
                    let row = row.as_array().ok_or_else(|| bad("row is not an array"))?;
                    if row.len() != size {
                        return Err(bad("wrong row length"));
                    }
                    for x in row {
                        data.push(elem(x)?);
                    }
                }
                RepMatrix::from_matrix(n, m, Matrix::new(&ring, size, size, data)?)
            }
            Storage::Sparse => {
                let labels: HashMap<String, usize> = index
                    .subsets()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.label(), i))
                    .collect();
                let mut triplets = Vec::with_capacity(entries.len());
                for e in entries {
                    let pos = |key: &str| -> Result<usize> {
                        let l = e[key].as_str().ok_or_else(|| bad("missing label"))?;
                        labels.get(l).copied().ok_or_else(|| bad("unknown subset label"))
                    };
                    triplets.push((pos("row")?, pos("col")?, elem(&e["value"])?));
                }
                RepMatrix::from_triplets(n, m, &ring, triplets)
            }
        }
    }
}

/// Entrywise equality, independent of storage.
impl PartialEq for RepMatrix {
    fn eq(&self, other: &Self) -> bool {
        if (self.n, self.m) != (other.n, other.m) || self.ring != other.ring {
            return false;
        }
        let size = self.size();
        (0..size).all(|i| (0..size).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

impl Eq for RepMatrix {}

impl fmt::Debug for RepMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepMatrix(n={}, m={}, {}) ", self.n, self.m, self.ring)?;
        let parts: Vec<String> = self
            .nonzeros()
            .into_iter()
            .map(|(i, j, v)| {
                format!(
                    "[{},{}]={}",
                    self.index.get(i),
                    self.index.get(j),
                    self.ring.format_elem(&v)
                )
            })
            .collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

impl Serialize for RepMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RepMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        RepMatrix::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn check_params(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::params(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    Ok(())
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::params(format!("index {i} outside [1, {n}]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MinorPath {
    Cofactor,
    Berkowitz,
}

/// `∧^m g`: entry `(I, J)` is the minor of `g` on rows `I`, columns `J`.
pub fn cauchy_binet(g: &Matrix, m: usize) -> Result<RepMatrix> {
    let path = if m <= 3 {
        MinorPath::Cofactor
    } else {
        MinorPath::Berkowitz
    };
    cauchy_binet_with(g, m, path)
}

pub(crate) fn cauchy_binet_with(g: &Matrix, m: usize, path: MinorPath) -> Result<RepMatrix> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            g.nrows(),
            g.ncols()
        )));
    }
    let n = g.nrows();
    check_params(n, m)?;
    let ring = g.ring();
    let subsets = subsets_of_size(n, m);
    let size = subsets.len();
    let mut data = Vec::with_capacity(size * size);
    for rows in &subsets {
        let r: Vec<usize> = rows.iter().map(|e| e - 1).collect();
        for cols in &subsets {
            let c: Vec<usize> = cols.iter().map(|e| e - 1).collect();
            let minor = Matrix::from_fn(ring, m, m, |a, b| g.get(r[a], c[b]).clone());
            data.push(match path {
                MinorPath::Cofactor => minor.det_cofactor(),
                MinorPath::Berkowitz => minor.det_berkowitz(),
            });
        }
    }
    RepMatrix::from_matrix(n, m, Matrix::new(ring, size, size, data)?)
}

/// One factor `t_{row, col}(coeff)` of an exterior transvection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransvectionFactor {
    pub row: Subset,
    pub col: Subset,
    pub coeff: RingElem,
}

/// The commuting factors `t_{L∪i, L∪j}(sign(L,i) sign(L,j) ξ)` over all
/// `(m-1)`-subsets `L` of `[n] \ {i, j}`, in lexicographic order of `L`.
pub fn exterior_transvection_factors(
    n: usize,
    m: usize,
    i: usize,
    j: usize,
    xi: &RingElem,
    ring: &Ring,
) -> Result<Vec<TransvectionFactor>> {
    check_params(n, m)?;
    check_index(n, i)?;
    check_index(n, j)?;
    if i == j {
        return Err(Error::params(format!("transvection needs i != j, got {i} = {j}")));
    }
    let rest: Vec<usize> = (1..=n).filter(|&e| e != i && e != j).collect();
    let mut out = Vec::new();
    for pick in subsets_of_size(rest.len(), m - 1) {
        let l = Subset::new(n, pick.iter().map(|p| rest[p - 1]))?;
        let s = sign_adjoin(&l, i) * sign_adjoin(&l, j);
        out.push(TransvectionFactor {
            row: l.with(i)?,
            col: l.with(j)?,
            coeff: ring.mul(&ring.from_i64(s as i64), xi),
        });
    }
    Ok(out)
}

/// `∧^m t_{i,j}(ξ)` as a sparse matrix (identity plus one entry per factor).
pub fn exterior_transvection(n: usize, m: usize, i: usize, j: usize, xi: &RingElem, ring: &Ring) -> Result<RepMatrix> {
    let factors = exterior_transvection_factors(n, m, i, j, xi, ring)?;
    let index = SubsetIndex::new(n, m)?;
    let diag = (0..index.len()).map(|k| (k, k, ring.one()));
    let off = factors.into_iter().map(|f| {
        (
            index.index_of(&f.row).expect("row subset"),
            index.index_of(&f.col).expect("col subset"),
            f.coeff,
        )
    });
    RepMatrix::from_triplets(n, m, ring, diag.chain(off))
}

/// `∧^m d_i(ξ)`: diagonal, `ξ` exactly at the subsets containing `i`.
pub fn exterior_torus(n: usize, m: usize, i: usize, xi: &RingElem, ring: &Ring) -> Result<RepMatrix> {
    check_params(n, m)?;
    check_index(n, i)?;
    let index = SubsetIndex::new(n, m)?;
    let entries = index
        .subsets()
        .iter()
        .enumerate()
        .map(|(k, s)| (k, k, if s.contains(i) { xi.clone() } else { ring.one() }))
        .collect::<Vec<_>>();
    RepMatrix::from_triplets(n, m, ring, entries)
}

/// `rank(g - e)` over a field.
pub fn residue(g: &RepMatrix) -> Result<usize> {
    let r = g.ring();
    let id = Matrix::identity(r, g.size());
    g.to_dense().sub(&id)?.rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordFactor {
    pub i: usize,
    pub j: usize,
    pub xi: RingElem,
}

/// Product `t_{i1,j1}(ξ1) t_{i2,j2}(ξ2) ...` of elementary transvections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryWord {
    ring: Ring,
    factors: Vec<WordFactor>,
}

impl ElementaryWord {
    pub fn new(ring: &Ring, factors: Vec<WordFactor>) -> Result<Self> {
        for f in &factors {
            if f.i == 0 || f.j == 0 || f.i == f.j {
                return Err(Error::params(format!(
                    "invalid transvection indices ({}, {})",
                    f.i, f.j
                )));
            }
        }
        Ok(ElementaryWord {
            ring: ring.clone(),
            factors,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn factors(&self) -> &[WordFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if let Some(f) = self.factors.iter().find(|f| f.i > n || f.j > n) {
            return Err(Error::params(format!("factor ({}, {}) outside [1, {n}]", f.i, f.j)));
        }
        Ok(())
    }

    /// The product in `GL_n`.
    pub fn matrix(&self, n: usize) -> Result<Matrix> {
        self.check_n(n)?;
        let r = &self.ring;
        let mut g = Matrix::identity(r, n);
        for f in &self.factors {
            // g * (e + ξ e_ij): column j += ξ * column i
            for row in 0..n {
                let v = r.add(g.get(row, f.j - 1), &r.mul(g.get(row, f.i - 1), &f.xi));
                g.set(row, f.j - 1, v);
            }
        }
        Ok(g)
    }
}

/// Ordered product of the exterior transvections of a word.
pub fn evaluate_word(word: &ElementaryWord, n: usize, m: usize) -> Result<RepMatrix> {
    check_params(n, m)?;
    word.check_n(n)?;
    let r = word.ring();
    let index = SubsetIndex::new(n, m)?;
    let size = index.len();
    let mut g = Matrix::identity(r, size);
    for f in word.factors() {
        for t in exterior_transvection_factors(n, m, f.i, f.j, &f.xi, r)? {
            if r.is_zero(&t.coeff) {
                continue;
            }
            let a = index.index_of(&t.row).expect("row");
            let b = index.index_of(&t.col).expect("col");
            for row in 0..size {
                let x = g.get(row, a);
                if !r.is_zero(x) {
                    let v = r.add(g.get(row, b), &r.mul(x, &t.coeff));
                    g.set(row, b, v);
                }
            }
        }
    }
    RepMatrix::from_matrix(n, m, g)
}

/// Deterministic random word: ordered pairs uniform, `ξ` uniform over
/// [`sample::sample_set`].
pub fn random_word(n: usize, length: usize, ring: &Ring, seed: u64) -> Result<ElementaryWord> {
    if length > 0 && n < 2 {
        return Err(Error::params("random words need n >= 2"));
    }
    let mut rng = sample::rng(seed);
    let set = sample::sample_set(ring);
    let factors = (0..length)
        .map(|_| {
            let i = rng.gen_range(1..=n);
            let mut j = rng.gen_range(1..n);
            if j >= i {
                j += 1;
            }
            WordFactor {
                i,
                j,
                xi: set[rng.gen_range(0..set.len())].clone(),
            }
        })
        .collect();
    ElementaryWord::new(ring, factors)
}
