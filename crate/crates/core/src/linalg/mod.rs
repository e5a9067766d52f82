//! Dense matrices over a [`Ring`], determinants, inverses and homogeneous
//! solving over fields.

pub(crate) mod echelon;

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};
use echelon::{Arith, Backend, Echelon};

macro_rules! with_backend {
    ($b:expr, $a:ident => $body:expr) => {
        match $b {
            $crate::linalg::echelon::Backend::Q($a) => $body,
            $crate::linalg::echelon::Backend::Mod($a) => $body,
        }
    };
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<RingElem>,
}

impl Matrix {
    pub fn new(ring: &Ring, rows: usize, cols: usize, data: Vec<RingElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        Matrix::from_fn(ring, n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let r = rows.len();
        Matrix::new(ring, r, cols, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(ring: &Ring, rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.data
    }

    fn check_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::DimensionMismatch(format!(
                "rings {} and {} differ",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !r.is_zero(b) {
                        let v = r.add(out.get(i, j), &r.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[RingElem]) -> Result<Vec<RingElem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let r = &self.ring;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = r.zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !r.is_zero(a) && !r.is_zero(b) {
                        acc = r.add(&acc, &r.mul(a, b));
                    }
                }
                acc
            })
            .collect())
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&RingElem, &RingElem) -> RingElem) -> Result<Matrix> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Matrix::new(&self.ring, self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| self.ring.sub(a, b))
    }

    pub fn scale(&self, c: &RingElem) -> Matrix {
        let data = self.data.iter().map(|a| self.ring.mul(c, a)).collect();
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Apply a ring map entrywise.
    pub fn map(&self, target: &Ring, f: impl Fn(&RingElem) -> RingElem) -> Matrix {
        Matrix {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        self.ring.is_one(v)
                    } else {
                        self.ring.is_zero(v)
                    }
                })
            })
    }

    fn require_square(&self, op: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{op} of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Determinant: cofactor expansion up to size 3, elimination over
    /// fields, Berkowitz (division free) otherwise.
    pub fn det(&self) -> Result<RingElem> {
        self.require_square("determinant")?;
        if self.rows <= 3 {
            return Ok(self.det_cofactor());
        }
        if self.ring.is_field() {
            return Ok(self.det_gauss());
        }
        Ok(self.det_berkowitz())
    }

    pub(crate) fn det_cofactor(&self) -> RingElem {
        let r = &self.ring;
        let n = self.rows;
        match n {
            0 => r.one(),
            1 => self.get(0, 0).clone(),
            2 => r.sub(
                &r.mul(self.get(0, 0), self.get(1, 1)),
                &r.mul(self.get(0, 1), self.get(1, 0)),
            ),
            _ => {
                let mut acc = r.zero();
                for j in 0..n {
                    let a = self.get(0, j);
                    if r.is_zero(a) {
                        continue;
                    }
                    let minor = Matrix::from_fn(r, n - 1, n - 1, |i, l| {
                        self.get(i + 1, if l < j { l } else { l + 1 }).clone()
                    });
                    let t = r.mul(a, &minor.det_cofactor());
                    acc = if j % 2 == 0 { r.add(&acc, &t) } else { r.sub(&acc, &t) };
                }
                acc
            }
        }
    }

    pub(crate) fn det_berkowitz(&self) -> RingElem {
        let c = self.charpoly();
        let d = c.last().cloned().unwrap_or_else(|| self.ring.one());
        if self.rows.is_multiple_of(2) {
            d
        } else {
            self.ring.neg(&d)
        }
    }

    fn det_gauss(&self) -> RingElem {
        let r = &self.ring;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = r.one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !r.is_zero(&a[i * n + col])) else {
                return r.zero();
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = r.neg(&det);
            }
            let piv = a[col * n + col].clone();
            det = r.mul(&det, &piv);
            let inv = r.inverse(&piv).expect("nonzero element of a field");
            for i in col + 1..n {
                let f = r.mul(&a[i * n + col], &inv);
                if r.is_zero(&f) {
                    continue;
                }
                for j in col..n {
                    let v = r.sub(&a[i * n + j], &r.mul(&f, &a[col * n + j]));
                    a[i * n + j] = v;
                }
            }
        }
        det
    }

    /// Coefficients of `det(t·I - A)`, leading coefficient first (Berkowitz).
    pub fn charpoly(&self) -> Vec<RingElem> {
        let r = &self.ring;
        let n = self.rows;
        if n == 0 {
            return vec![r.one()];
        }
        let mut v = vec![r.one(), r.neg(self.get(0, 0))];
        for k in 1..n {
            // q = (1, -a_kk, -R C, -R A C, ..., -R A^{k-2} C)
            let mut q = Vec::with_capacity(k + 2);
            q.push(r.one());
            q.push(r.neg(self.get(k, k)));
            let mut w: Vec<RingElem> = (0..k).map(|i| self.get(i, k).clone()).collect();
            for step in 0..k {
                let mut dot = r.zero();
                for (j, wj) in w.iter().enumerate() {
                    dot = r.add(&dot, &r.mul(self.get(k, j), wj));
                }
                q.push(r.neg(&dot));
                if step + 1 < k {
                    w = (0..k)
                        .map(|i| {
                            let mut acc = r.zero();
                            for (j, wj) in w.iter().enumerate() {
                                acc = r.add(&acc, &r.mul(self.get(i, j), wj));
                            }
                            acc
                        })
                        .collect();
                }
            }
            let mut next = Vec::with_capacity(k + 2);
            for i in 0..k + 2 {
                let mut acc = r.zero();
                for j in 0..=i.min(k) {
                    acc = r.add(&acc, &r.mul(&q[i - j], &v[j]));
                }
                next.push(acc);
            }
            v = next;
        }
        v
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(self.ring.is_unit(&self.det()?))
    }

    /// Inverse by Gauss-Jordan with unit pivots, falling back to the
    /// Cayley-Hamilton adjugate when no unit pivot is available.
    pub fn inverse(&self) -> Result<Matrix> {
        self.require_square("inverse")?;
        if let Some(inv) = self.inverse_gauss_jordan() {
            return Ok(inv);
        }
        self.inverse_cayley_hamilton()
    }

    fn inverse_gauss_jordan(&self) -> Option<Matrix> {
        let r = &self.ring;
        let n = self.rows;
        let mut a = self.clone();
        let mut b = Matrix::identity(r, n);
        for col in 0..n {
            let p = (col..n).find(|&i| r.is_unit(a.get(i, col)))?;
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                    b.data.swap(p * n + j, col * n + j);
                }
            }
            let inv = r.inverse(a.get(col, col)).ok()?;
            for j in 0..n {
                a.set(col, j, r.mul(&inv, a.get(col, j)));
                b.set(col, j, r.mul(&inv, b.get(col, j)));
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col).clone();
                if r.is_zero(&f) {
                    continue;
                }
                for j in 0..n {
                    let va = r.sub(a.get(i, j), &r.mul(&f, a.get(col, j)));
                    a.set(i, j, va);
                    let vb = r.sub(b.get(i, j), &r.mul(&f, b.get(col, j)));
                    b.set(i, j, vb);
                }
            }
        }
        Some(b)
    }

    fn inverse_cayley_hamilton(&self) -> Result<Matrix> {
        let r = &self.ring;
        let n = self.rows;
        let c = self.charpoly();
        // p(A) = A^n + c1 A^{n-1} + ... + cn = 0, cn = (-1)^n det
        let cn_inv = r.inverse(&c[n]).map_err(|_| Error::NotInvertible {
            ring: r.to_string(),
            elem: "matrix".into(),
        })?;
        // B = A^{n-1} + c1 A^{n-2} + ... + c_{n-1} I, then A^{-1} = -B / cn
        let mut b = Matrix::identity(r, n);
        for ci in c.iter().take(n).skip(1) {
            b = self.mul(&b)?.add(&Matrix::identity(r, n).scale(ci))?;
        }
        Ok(b.scale(&r.neg(&cn_inv)))
    }

    /// Rank over a field.
    pub fn rank(&self) -> Result<usize> {
        let backend = Backend::field(&self.ring, "rank")?;
        with_backend!(backend, a => {
            let mut e = Echelon::new(a, self.cols, false);
            for i in 0..self.rows {
                let row = echelon::lift_row(&e.arith, &self.sparse_row(i)).expect("entries in field");
                e.insert(row)?;
            }
            Ok(e.rank())
        })
    }

    fn sparse_row(&self, i: usize) -> Vec<(usize, RingElem)> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.ring.is_zero(v))
            .map(|(j, v)| (j, v.clone()))
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over {} ({}x{})", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| self.ring.format_elem(v)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Basis of the solution set of a homogeneous system over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    ring: Ring,
    ambient_dim: usize,
    basis: Vec<Vec<RingElem>>,
}

impl SolutionSpace {
    pub(crate) fn from_basis(ring: &Ring, ambient_dim: usize, basis: Vec<Vec<RingElem>>) -> Self {
        SolutionSpace {
            ring: ring.clone(),
            ambient_dim,
            basis,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<RingElem>] {
        &self.basis
    }

    fn echelon_of_basis<A: Arith>(&self, a: A) -> Result<Echelon<A>> {
        let mut e = Echelon::new(a, self.ambient_dim, false);
        for v in &self.basis {
            let row = echelon::lift_row(&e.arith, &sparse(&self.ring, v)).expect("basis over the field");
            e.insert(row)?;
        }
        Ok(e)
    }

    pub fn contains(&self, v: &[RingElem]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in dimension {}",
                v.len(),
                self.ambient_dim
            )));
        }
        let backend = Backend::field(&self.ring, "span membership")?;
        with_backend!(backend, a => {
            let e = self.echelon_of_basis(a)?;
            let row = echelon::lift_row(&e.arith, &sparse(&self.ring, v))
                .ok_or_else(|| Error::DimensionMismatch("vector not over the solution field".into()))?;
            Ok(e.reduce(row).is_empty())
        })
    }

    pub fn is_subspace_of(&self, other: &SolutionSpace) -> Result<bool> {
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Image under the coordinate projection onto `cols`, with a fresh basis.
    pub fn project(&self, cols: &[usize]) -> Result<SolutionSpace> {
        let backend = Backend::field(&self.ring, "projection")?;
        let projected: Vec<Vec<RingElem>> = self
            .basis
            .iter()
            .map(|v| cols.iter().map(|&c| v[c].clone()).collect())
            .collect();
        let tmp = SolutionSpace::from_basis(&self.ring, cols.len(), Vec::new());
        with_backend!(backend, a => {
            let mut e = tmp.echelon_of_basis(a)?;
            let mut basis = Vec::new();
            for v in projected {
                let row = echelon::lift_row(&e.arith, &sparse(&self.ring, &v)).expect("field entries");
                if e.insert(row)? {
                    basis.push(v);
                }
            }
            Ok(SolutionSpace::from_basis(&self.ring, cols.len(), basis))
        })
    }
}

fn sparse(ring: &Ring, v: &[RingElem]) -> Vec<(usize, RingElem)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !ring.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Kernel of a matrix over a field (`Q` or `Z/p`).
pub fn solve_homogeneous(system: &Matrix) -> Result<SolutionSpace> {
    let rows = (0..system.nrows()).map(|i| system.sparse_row(i));
    solve_sparse(system.ring(), system.ncols(), rows)
}

/// Kernel of a sparse system whose rows are `(column, value)` lists.
pub fn solve_sparse(
    field: &Ring,
    ncols: usize,
    rows: impl IntoIterator<Item = Vec<(usize, RingElem)>>,
) -> Result<SolutionSpace> {
    let backend = Backend::field(field, "solve_homogeneous")?;
    with_backend!(backend, a => {
        let mut e = Echelon::new(a, ncols, false);
        for row in rows {
            let row = echelon::lift_row(&e.arith, &row)
                .ok_or_else(|| Error::DimensionMismatch(format!("entries outside {field}")))?;
            e.insert(row)?;
        }
        Ok(kernel_space(&e))
    })
}

/// Kernel of a sparse system with small integer coefficients, read in `field`.
pub(crate) fn solve_sparse_i64(
    field: &Ring,
    ncols: usize,
    rows: impl IntoIterator<Item = Vec<(usize, i64)>>,
) -> Result<SolutionSpace> {
    let backend = Backend::field(field, "solve_homogeneous")?;
    with_backend!(backend, a => {
        let mut e = Echelon::new(a, ncols, false);
        for row in rows {
            e.insert_i64(&row)?;
            if e.rank() == ncols {
                break;
            }
        }
        Ok(kernel_space(&e))
    })
}

pub(crate) fn kernel_space<A: Arith>(e: &Echelon<A>) -> SolutionSpace {
    let a = &e.arith;
    let basis = e
        .kernel()
        .into_iter()
        .map(|v| v.iter().map(|x| a.lower(x)).collect())
        .collect();
    SolutionSpace::from_basis(a.ring(), e.ncols(), basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> Ring {
        Ring::rationals()
    }

    /// Leibniz formula; exponential, used as an oracle only.
    fn det_leibniz(m: &Matrix) -> RingElem {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut p2 = p.clone();
                    p2.insert(pos, n - 1);
                    out.push(p2);
                }
            }
            out
        }
        let r = m.ring();
        let n = m.nrows();
        let mut acc = r.zero();
        for p in perms(n) {
            let seq: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            let s = crate::combinat::sign_sequence(&seq);
            let mut t = r.from_i64(s as i64);
            for (i, &j) in p.iter().enumerate() {
                t = r.mul(&t, m.get(i, j));
            }
            acc = r.add(&acc, &t);
        }
        acc
    }

    fn random_matrix(ring: &Ring, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(ring, n, n, |_, _| ring.from_i64(rng.gen_range(-4..5)))
    }

    #[test]
    fn kernel_examples() {
        let z = Matrix::zeros(&q(), 2, 4);
        assert_eq!(solve_homogeneous(&z).unwrap().dimension(), 4);
        assert_eq!(solve_homogeneous(&Matrix::identity(&q(), 5)).unwrap().dimension(), 0);
        let m = Matrix::from_i64_rows(&q(), &[vec![1, 2], vec![2, 4]]).unwrap();
        let s = solve_homogeneous(&m).unwrap();
        assert_eq!(s.dimension(), 1);
        assert_eq!(s.basis()[0], vec![q().from_i64(-2), q().from_i64(1)]);
    }

    #[test]
    fn non_field_rejected() {
        let m = Matrix::identity(&Ring::integers(), 2);
        assert!(matches!(solve_homogeneous(&m), Err(Error::UnsupportedRing { .. })));
        let m = Matrix::identity(&Ring::modular(6).unwrap(), 2);
        assert!(matches!(solve_homogeneous(&m), Err(Error::UnsupportedRing { .. })));
    }

    #[test]
    fn determinant_paths_agree_with_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ring in [
            Ring::integers(),
            q(),
            Ring::modular(12).unwrap(),
            Ring::prime_field(7).unwrap(),
        ] {
            for n in 0..=5 {
                let m = random_matrix(&ring, n, &mut rng);
                let want = det_leibniz(&m);
                assert_eq!(m.det_berkowitz(), want, "berkowitz {ring} n={n}");
                assert_eq!(m.det().unwrap(), want, "det {ring} n={n}");
                if n <= 4 {
                    assert_eq!(m.det_cofactor(), want);
                }
            }
        }
    }

    #[test]
    fn determinant_over_dual_numbers() {
        let r = Ring::dual(5).unwrap();
        let d = r.dual_unit().unwrap();
        let mut m = Matrix::identity(&r, 4);
        m.set(0, 0, r.add(&r.one(), &d));
        m.set(1, 2, d.clone());
        m.set(3, 3, r.from_i64(2));
        assert_eq!(m.det().unwrap(), r.mul(&r.from_i64(2), &r.add(&r.one(), &d)));
        assert_eq!(m.det().unwrap(), det_leibniz(&m));
    }

    #[test]
    fn inverses_over_several_rings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ring in [
            Ring::integers(),
            q(),
            Ring::modular(10).unwrap(),
            Ring::dual(3).unwrap(),
        ] {
            let mut found = 0;
            while found < 5 {
                let m = random_matrix(&ring, 4, &mut rng);
                match m.inverse() {
                    Ok(inv) => {
                        assert!(m.mul(&inv).unwrap().is_identity(), "{ring}");
                        assert!(inv.mul(&m).unwrap().is_identity());
                        found += 1;
                    }
                    Err(Error::NotInvertible { .. }) => assert!(!m.is_invertible().unwrap()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn unimodular_integer_inverse_needs_fallback() {
        // no entry of the first column is a unit
        let z = Ring::integers();
        let m = Matrix::from_i64_rows(&z, &[vec![2, 3], vec![3, 5]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn charpoly_of_companion() {
        // t^3 - 2t^2 + 3t - 5
        let m = Matrix::from_i64_rows(&q(), &[vec![0, 0, 5], vec![1, 0, -3], vec![0, 1, 2]]).unwrap();
        let c: Vec<i64> = m.charpoly().iter().map(|x| q().to_i64(x).unwrap()).collect();
        assert_eq!(c, vec![1, -2, 3, -5]);
    }

    #[test]
    fn projection_and_containment() {
        let m = Matrix::from_i64_rows(&q(), &[vec![1, 1, 0, 0]]).unwrap();
        let s = solve_homogeneous(&m).unwrap();
        assert_eq!(s.dimension(), 3);
        assert!(s.contains(&[1, -1, 7, 0].map(|v| q().from_i64(v))).unwrap());
        assert!(!s.contains(&[1, 1, 0, 0].map(|v| q().from_i64(v))).unwrap());
        assert_eq!(s.project(&[0, 1]).unwrap().dimension(), 1);
        assert_eq!(s.project(&[2, 3]).unwrap().dimension(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn kernel_dimension_is_order_invariant(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7, p in prop::sample::select(vec![0u64, 2, 3, 7])) {
            let ring = if p == 0 { q() } else { Ring::prime_field(p).unwrap() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // low rank on purpose: product of thin factors
            let inner = rng.gen_range(1..=rows.min(cols));
            let a = Matrix::from_fn(&ring, rows, inner, |_, _| ring.from_i64(rng.gen_range(-3..4)));
            let b = Matrix::from_fn(&ring, inner, cols, |_, _| ring.from_i64(rng.gen_range(-3..4)));
            let m = a.mul(&b).unwrap();
            let dim = solve_homogeneous(&m).unwrap().dimension();
            let mut rp: Vec<usize> = (0..rows).collect();
            let mut cp: Vec<usize> = (0..cols).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let shuffled = Matrix::from_fn(&ring, rows, cols, |i, j| m.get(rp[i], cp[j]).clone());
            let s = solve_homogeneous(&shuffled).unwrap();
            prop_assert_eq!(s.dimension(), dim);
            prop_assert_eq!(m.rank().unwrap() + dim, cols);
            for v in s.basis() {
                prop_assert!(shuffled.mul_vec(v).unwrap().iter().all(|x| ring.is_zero(x)));
            }
        }
    }
}
