use proptest::prelude::*;

use super::*;
use crate::combinat::sign_adjoin;
use crate::extrep::{cauchy_binet, exterior_torus, exterior_transvection, exterior_transvection_factors};
use crate::linalg::Matrix;
use crate::sample::{random_elem, random_gl, rng};

fn s(n: usize, e: &[usize]) -> Subset {
    Subset::new(n, e.iter().copied()).unwrap()
}

fn f6(ring: &Ring) -> MultilinearForm {
    form_polarized(&Subset::full(6).unwrap(), 2, ring).unwrap()
}

fn random_vectors(ring: &Ring, k: usize, len: usize, seed: u64) -> Vec<Vec<RingElem>> {
    let mut r = rng(seed);
    (0..k)
        .map(|_| (0..len).map(|_| random_elem(ring, &mut r)).collect())
        .collect()
}

#[test]
fn polarized_coefficients() {
    let z = Ring::integers();
    let f = f6(&z);
    assert_eq!(f.len(), 90);
    assert_eq!(f.k(), 3);
    assert_eq!(f.symmetry(), Symmetry::Symmetric);
    assert_eq!(f.coeff(&[s(6, &[1, 2]), s(6, &[3, 4]), s(6, &[5, 6])]), z.one());
    assert_eq!(f.coeff(&[s(6, &[1, 3]), s(6, &[2, 4]), s(6, &[5, 6])]), z.from_i64(-1));
    assert_eq!(f.coeff(&[s(6, &[1, 2]), s(6, &[2, 4]), s(6, &[5, 6])]), z.zero());
    let g = form_polarized(&Subset::full(9).unwrap(), 3, &z).unwrap();
    assert_eq!(g.len(), 1680);
    assert_eq!(g.symmetry(), Symmetry::Alternating);
    assert!(form_polarized(&Subset::full(3).unwrap(), 4, &z).is_err());
}

#[test]
fn evaluation() {
    let f7 = Ring::modular(7).unwrap();
    let f = f6(&f7);
    let idx = f.index();
    let basis = |sub: &[usize]| {
        let mut v = vec![f7.zero(); 15];
        v[idx.index_of(&s(6, sub)).unwrap()] = f7.one();
        v
    };
    let e = |subs: [&[usize]; 3]| evaluate_form(&f, &subs.map(basis)).unwrap();
    assert_eq!(e([&[1, 2], &[3, 4], &[5, 6]]), f7.one());
    assert_eq!(e([&[1, 2], &[2, 4], &[5, 6]]), f7.zero());

    let mut xs = random_vectors(&f7, 3, 15, 1);
    let base = evaluate_form(&f, &xs).unwrap();
    let c = f7.from_i64(3);
    xs[0] = xs[0].iter().map(|x| f7.mul(&c, x)).collect();
    assert_eq!(evaluate_form(&f, &xs).unwrap(), f7.mul(&c, &base));
    assert!(evaluate_form(&f, &xs[..2]).is_err());
}

#[test]
fn action_examples() {
    let pr = Ring::polynomial(Ring::integers(), ["xi"]).unwrap();
    let xi = pr.var("xi").unwrap();
    let f = f6(&pr);
    let id = RepMatrix::identity(6, 2, &pr).unwrap();
    assert_eq!(act_on_form(&id, &f).unwrap(), f);
    for i in 1..=6 {
        let t = exterior_torus(6, 2, i, &xi, &pr).unwrap();
        assert_eq!(act_on_form(&t, &f).unwrap(), f.scale(&xi));
    }
    for (i, j) in [(1, 2), (2, 1), (3, 6), (6, 4)] {
        let t = exterior_transvection(6, 2, i, j, &xi, &pr).unwrap();
        assert_eq!(act_on_form(&t, &f).unwrap(), f, "t_{i}{j}");
    }
}

#[test]
fn action_matches_evaluation_and_composes() {
    let f7 = Ring::modular(7).unwrap();
    let z = Ring::integers();
    let mut r = rng(4);
    for (n, m) in [(4, 2), (6, 3)] {
        let f = form_polarized(&Subset::full(n).unwrap(), m, &z).unwrap();
        let g = RepMatrix::from_matrix(n, m, random_gl(crate::combinat::binomial(n, m), &f7, &mut r)).unwrap();
        let h = RepMatrix::from_matrix(n, m, random_gl(crate::combinat::binomial(n, m), &f7, &mut r)).unwrap();
        let xs = random_vectors(&f7, f.k(), g.size(), 9);
        let gxs: Vec<Vec<RingElem>> = xs.iter().map(|x| g.mul_vec(x).unwrap()).collect();
        let fg = act_on_form(&g, &f).unwrap();
        assert_eq!(
            evaluate_form(&fg, &xs).unwrap(),
            evaluate_form(&f.embed(&f7).unwrap(), &gxs).unwrap()
        );
        let gh = g.mul(&h).unwrap();
        assert_eq!(act_on_form(&gh, &f).unwrap(), act_on_form(&h, &fg).unwrap());
    }
}

#[test]
fn asymmetric_forms_use_all_outputs() {
    let q = Ring::rationals();
    let f = MultilinearForm::from_coeffs(4, 2, 2, &q, [(vec![s(4, &[1, 2]), s(4, &[3, 4])], q.one())]).unwrap();
    assert_eq!(f.symmetry(), Symmetry::None);
    let g = RepMatrix::from_matrix(4, 2, random_gl(6, &q, &mut rng(2))).unwrap();
    let xs = random_vectors(&q, 2, 6, 3);
    let gxs: Vec<Vec<RingElem>> = xs.iter().map(|x| g.mul_vec(x).unwrap()).collect();
    let fg = act_on_form(&g, &f).unwrap();
    assert_eq!(evaluate_form(&fg, &xs).unwrap(), evaluate_form(&f, &gxs).unwrap());
    assert!(MultilinearForm::from_coeffs(4, 2, 2, &q, [(vec![s(4, &[1, 2]), s(4, &[2, 3])], q.one())]).is_err());
}

#[test]
fn scalar_is_determinant() {
    let mut r = rng(21);
    for ring in [
        Ring::modular(7).unwrap(),
        Ring::rationals(),
        Ring::integers(),
        Ring::modular(6).unwrap(),
    ] {
        for (n, m) in [(6, 2), (9, 3)] {
            let f = form_polarized(&Subset::full(n).unwrap(), m, &ring).unwrap();
            let h = random_gl(n, &ring, &mut r);
            let g = cauchy_binet(&h, m).unwrap();
            assert_eq!(
                semi_invariance_scalar(&g, &f).unwrap(),
                Some(h.det().unwrap()),
                "{ring} ({n},{m})"
            );
        }
    }
}

#[test]
fn scalar_over_other_rings() {
    let mut r = rng(2);
    for ring in [
        Ring::dual(3).unwrap(),
        Ring::polynomial(Ring::modular(5).unwrap(), ["t"]).unwrap(),
    ] {
        let f = f6(&Ring::integers());
        let h = random_gl(6, &ring, &mut r);
        let g = cauchy_binet(&h, 2).unwrap();
        assert_eq!(
            semi_invariance_scalar(&g, &f).unwrap(),
            Some(h.det().unwrap()),
            "{ring}"
        );
    }
}

#[test]
fn scalar_absent_and_identity() {
    let q = Ring::rationals();
    let f = f6(&q);
    let id = RepMatrix::identity(6, 2, &q).unwrap();
    assert_eq!(semi_invariance_scalar(&id, &f).unwrap(), Some(q.one()));
    // scale only x_{12}
    let mut d = Matrix::identity(&q, 15);
    d.set(0, 0, q.from_i64(2));
    let g = RepMatrix::from_matrix(6, 2, d).unwrap();
    assert_eq!(semi_invariance_scalar(&g, &f).unwrap(), None);
    assert!(matches!(semi_invariance(&g, &f).unwrap(), SemiInvariance::Absent(_)));
    // a non-unit scalar over Z
    let z = Ring::integers();
    let two = RepMatrix::scalar(6, 2, &z, &z.from_i64(2)).unwrap();
    assert_eq!(
        semi_invariance(&two, &f6(&z)).unwrap(),
        SemiInvariance::NonUnit(z.from_i64(8))
    );
}

#[test]
fn scalar_is_multiplicative() {
    let f7 = Ring::modular(7).unwrap();
    let f = form_polarized(&Subset::full(6).unwrap(), 3, &f7).unwrap();
    let mut r = rng(17);
    for _ in 0..4 {
        let g1 = cauchy_binet(&random_gl(6, &f7, &mut r), 3).unwrap();
        let g2 = cauchy_binet(&random_gl(6, &f7, &mut r), 3).unwrap();
        let l1 = semi_invariance_scalar(&g1, &f).unwrap().unwrap();
        let l2 = semi_invariance_scalar(&g2, &f).unwrap().unwrap();
        let l12 = semi_invariance_scalar(&g1.mul(&g2).unwrap(), &f).unwrap().unwrap();
        assert_eq!(l12, f7.mul(&l1, &l2));
    }
}

#[test]
fn rational_entries_use_scaled_integers() {
    let q = Ring::rationals();
    let half = q.parse_elem("1/2").unwrap();
    let mut h = Matrix::identity(&q, 6);
    h.set(0, 0, half.clone());
    h.set(2, 4, q.parse_elem("-3/4").unwrap());
    let g = cauchy_binet(&h, 2).unwrap();
    assert_eq!(semi_invariance_scalar(&g, &f6(&q)).unwrap(), Some(half));
}

#[test]
fn pencil_detects_transvection_directions() {
    let q = Ring::rationals();
    let f = f6(&q);
    // b = the nilpotent part of ∧²t_{1,3}(1)
    let factors = exterior_transvection_factors(6, 2, 1, 3, &q.one(), &q).unwrap();
    let b = RepMatrix::from_triplets(
        6,
        2,
        &q,
        factors.iter().map(|t| {
            let idx = f.index();
            (
                idx.index_of(&t.row).unwrap(),
                idx.index_of(&t.col).unwrap(),
                t.coeff.clone(),
            )
        }),
    )
    .unwrap();
    let PencilInvariance::Scalar(l) = pencil_semi_invariance(&b, &f).unwrap() else {
        panic!("transvection pencil is semi-invariant");
    };
    assert_eq!(l, vec![q.one(), q.zero(), q.zero(), q.zero()]);
    assert!(is_unit_poly(&q, &l));

    let mut d = Matrix::zeros(&q, 15, 15);
    d.set(0, 1, q.one());
    let b = RepMatrix::from_matrix(6, 2, d).unwrap();
    assert!(matches!(
        pencil_semi_invariance(&b, &f).unwrap(),
        PencilInvariance::Absent(_)
    ));

    // the torus direction e_{12,12}: λ(ξ) = 1 + ξ is not a unit of Q[ξ]
    let mut d = Matrix::zeros(&q, 15, 15);
    for (idx, sub) in f.index().subsets().iter().enumerate() {
        if sub.contains(1) {
            d.set(idx, idx, q.one());
        }
    }
    let b = RepMatrix::from_matrix(6, 2, d).unwrap();
    let PencilInvariance::Scalar(l) = pencil_semi_invariance(&b, &f).unwrap() else {
        panic!("torus pencil is semi-invariant");
    };
    assert_eq!(l, vec![q.one(), q.one(), q.zero(), q.zero()]);
    assert!(!is_unit_poly(&q, &l));
}

#[test]
fn pencil_backends_agree() {
    let mut r = rng(6);
    let z = Ring::integers();
    let h = random_gl(6, &Ring::modular(5).unwrap(), &mut r);
    for ring in [Ring::modular(5).unwrap(), Ring::dual(5).unwrap()] {
        let f = f6(&z);
        let hr = h.map(&ring, |x| ring.from_i64(Ring::modular(5).unwrap().to_i64(x).unwrap()));
        let b = cauchy_binet(&hr, 2).unwrap();
        // compare with the generic backend through a polynomial ring in ξ
        let pr = Ring::polynomial(ring.clone(), ["xi"]).unwrap();
        let xi = pr.var("xi").unwrap();
        let a = RepMatrix::from_matrix(
            6,
            2,
            Matrix::from_fn(&pr, 15, 15, |i, j| {
                let e = if i == j { pr.one() } else { pr.zero() };
                pr.add(&e, &pr.mul(&xi, &pr.embed_base(b.get(i, j))))
            }),
        )
        .unwrap();
        let direct = semi_invariance(&a, &f).unwrap();
        let pencil = pencil_semi_invariance(&b, &f).unwrap();
        match (direct, pencil) {
            (SemiInvariance::Absent(_), PencilInvariance::Absent(_)) => {}
            (SemiInvariance::Scalar(l) | SemiInvariance::NonUnit(l), PencilInvariance::Scalar(c)) => {
                let poly = pr.as_poly(&l).unwrap();
                for (d, cd) in c.iter().enumerate() {
                    let mono = crate::ring::Monomial::from_pairs(if d == 0 { vec![] } else { vec![(0, d as u32)] });
                    let want = poly.coeff(&mono).cloned().unwrap_or_else(|| ring.zero());
                    assert_eq!(&want, cd, "{ring} degree {d}");
                }
            }
            other => panic!("backends disagree over {ring}: {other:?}"),
        }
    }
}

#[test]
fn semi_invariant_space_is_the_line_of_f() {
    for (n, m, field) in [
        (6, 2, Ring::rationals()),
        (6, 2, Ring::modular(3).unwrap()),
        (6, 3, Ring::modular(2).unwrap()),
        (9, 3, Ring::modular(2).unwrap()),
    ] {
        let space = semi_invariant_space(n, m, &field).unwrap();
        assert_eq!(space.dimension(), 1, "({n},{m}) {field}");
        let f = form_polarized(&Subset::full(n).unwrap(), m, &field).unwrap();
        assert!(space.contains(&f.to_graded_vector().unwrap()).unwrap());
    }
    assert_eq!(graded_keys(6, 2).unwrap().len(), 90);
    assert!(semi_invariant_space(7, 2, &Ring::rationals()).is_err());
    assert!(semi_invariant_space(6, 2, &Ring::integers()).is_err());
}

#[test]
fn json_round_trip() {
    let f7 = Ring::modular(7).unwrap();
    let f = form_polarized(&s(7, &[1, 2, 4, 6]), 2, &f7).unwrap();
    let j = f.to_json();
    assert_eq!(j["V"], "1246");
    assert_eq!(j["coeffs"].as_array().unwrap().len(), 6);
    let back = MultilinearForm::from_json(&j).unwrap();
    assert_eq!(back, f);
    assert_eq!(back.support(), f.support());
}

#[test]
fn collapse_to_polynomial() {
    let q = Ring::rationals();
    let (ring, p) = collapse_form(
        &form_polarized(&Subset::full(4).unwrap(), 2, &Ring::integers()).unwrap(),
        &q,
    )
    .unwrap();
    // f(x, x) = 2 (x12 x34 - x13 x24 + x14 x23)
    assert_eq!(p, ring.parse_elem("2*x12*x34 - 2*x13*x24 + 2*x14*x23").unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // sign(j,L1) a_{iL1, jL2, ...} + sign(j,L2) a_{jL1, iL2, ...} = 0,
    // with sign(i, L) the sign of placing i in front of L
    #[test]
    fn sign_identity_on_polarized_coefficients(perm in Just((1usize..=6).collect::<Vec<_>>()).prop_shuffle(), swap in 0usize..2) {
        let z = Ring::integers();
        let f = f6(&z);
        let (i, j) = (perm[0], perm[1]);
        let l1 = s(6, &{ let mut v = vec![perm[2]]; v.sort(); v });
        let l2 = s(6, &[perm[3]]);
        let rest = s(6, &{ let mut v = vec![perm[4], perm[5]]; v.sort(); v });
        let (l1, l2) = if swap == 0 { (l1, l2) } else { (l2, l1) };
        let a = f.coeff(&[l1.with(i).unwrap(), l2.with(j).unwrap(), rest.clone()]);
        let b = f.coeff(&[l1.with(j).unwrap(), l2.with(i).unwrap(), rest]);
        let sa = z.from_i64((sign_adjoin(&l1, i) * sign_adjoin(&l2, j)) as i64);
        let sb = z.from_i64((sign_adjoin(&l1, j) * sign_adjoin(&l2, i)) as i64);
        prop_assert!(z.is_zero(&z.add(&z.mul(&sa, &a), &z.mul(&sb, &b))));
    }
}
