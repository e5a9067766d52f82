//! Seeded sampling of ring elements and invertible matrices.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::ring::modular::unit_group_generator;
use crate::ring::{Ring, RingElem, RingKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `{0, 1, -1}`, a generator of the unit group when that group is cyclic,
/// and the first indeterminate of a polynomial ring.
pub fn sample_set(ring: &Ring) -> Vec<RingElem> {
    let mut out = vec![ring.zero(), ring.one(), ring.neg(&ring.one())];
    match ring.kind() {
        RingKind::Modular(k) => {
            if let Some(g) = unit_group_generator(k) {
                out.push(ring.from_i64(g as i64));
            }
        }
        RingKind::Dual(p) => {
            // F_p^* x (1 + F_p d) is cyclic of order p(p-1)
            let g = unit_group_generator(p).unwrap_or(1);
            let d = ring.dual_unit().expect("dual ring");
            out.push(ring.add(&ring.from_i64(g as i64), &d));
        }
        RingKind::Polynomial(r) => {
            let base = r.base().clone();
            for c in sample_set(&base).into_iter().skip(3) {
                out.push(ring.embed_base(&c));
            }
            out.push(ring.var(&r.vars()[0]).expect("first variable"));
        }
        RingKind::Integers | RingKind::Rationals => {}
    }
    let mut dedup: Vec<RingElem> = Vec::new();
    for x in out {
        if !dedup.contains(&x) {
            dedup.push(x);
        }
    }
    dedup
}

/// A random element: uniform over finite rings, small numerators and
/// denominators over `Z` and `Q`, base coefficients plus the first variable
/// for polynomial rings.
pub fn random_elem(ring: &Ring, rng: &mut impl Rng) -> RingElem {
    match ring.kind() {
        RingKind::Integers => ring.from_i64(rng.gen_range(-5..=5)),
        RingKind::Rationals => {
            let num = rng.gen_range(-6..=6);
            let den = if rng.gen_bool(0.25) { rng.gen_range(2..=4) } else { 1 };
            let q = num_rational::BigRational::new(BigInt::from(num), BigInt::from(den));
            ring.from_rational(&q).expect("rational")
        }
        RingKind::Modular(k) => ring.from_bigint(&BigInt::from(rng.gen_range(0..k))),
        RingKind::Dual(p) => {
            let a = ring.from_i64(rng.gen_range(0..p) as i64);
            let b = ring.from_i64(rng.gen_range(0..p) as i64);
            ring.add(&a, &ring.mul(&b, &ring.dual_unit().unwrap()))
        }
        RingKind::Polynomial(r) => {
            let base = r.base().clone();
            let c0 = ring.embed_base(&random_elem(&base, rng));
            if rng.gen_bool(0.3) {
                let x = ring.var(&r.vars()[0]).unwrap();
                let c1 = ring.embed_base(&random_elem(&base, rng));
                ring.add(&c0, &ring.mul(&c1, &x))
            } else {
                c0
            }
        }
    }
}

/// A random unit of the ring.
pub fn random_unit(ring: &Ring, rng: &mut impl Rng) -> RingElem {
    loop {
        let x = match ring.kind() {
            RingKind::Polynomial(r) => ring.embed_base(&random_unit(&r.base().clone(), rng)),
            _ => random_elem(ring, rng),
        };
        if ring.is_unit(&x) {
            return x;
        }
    }
}

/// `e + x e_{i,j}` in `GL_n`, zero-based indices.
pub fn transvection(ring: &Ring, n: usize, i: usize, j: usize, x: &RingElem) -> Matrix {
    let mut t = Matrix::identity(ring, n);
    t.set(i, j, x.clone());
    t
}

/// A random element of `GL_n(R)`.
///
/// Over `Q` and finite rings: random entries, rejected until the
/// determinant is a unit. Over `Z` and polynomial rings (where that almost
/// never happens): a unit diagonal matrix times a long random product of
/// transvections.
pub fn random_gl(n: usize, ring: &Ring, rng: &mut impl Rng) -> Matrix {
    let rejection = matches!(
        ring.kind(),
        RingKind::Rationals | RingKind::Modular(_) | RingKind::Dual(_)
    );
    if rejection {
        for _ in 0..1000 {
            let g = Matrix::from_fn(ring, n, n, |_, _| random_elem(ring, rng));
            if g.is_invertible().expect("square") {
                return g;
            }
        }
    }
    let set = sample_set(ring);
    let mut g = Matrix::identity(ring, n);
    g.set(0, 0, random_unit(ring, rng));
    if n < 2 {
        return g;
    }
    for _ in 0..3 * n * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let x = &set[rng.gen_range(0..set.len())];
        // right multiplication by e + x e_{ij}: column j += x * column i
        for r in 0..n {
            let v = ring.add(g.get(r, j), &ring.mul(g.get(r, i), x));
            g.set(r, j, v);
        }
    }
    g
}
