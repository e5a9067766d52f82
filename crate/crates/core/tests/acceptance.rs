//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p extpow-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use extpow::combinat::binomial;
use extpow::extrep::{
    cauchy_binet, evaluate_word, exterior_torus, exterior_transvection, exterior_transvection_factors, random_word,
    residue,
};
use extpow::forms::{
    form_polarized, ideal_f_generators, independent_mod_p, plucker_set, preserves_ideal_f, semi_invariance_scalar,
    semi_invariant_space, stabilizes_ideal_f, stabilizes_plucker,
};
use extpow::liealg::{
    diagonal_relation, lie_dim_form_stabilizer, lie_dim_ideal_stabilizer, lie_fix_system, lie_report,
    verify_diagonal_relation, FixMode, LieMode,
};
use extpow::normalizer::{normalizer_equalities_demo, SampleKind};
use extpow::sample::{random_gl, rng, sample_set, transvection};
use extpow::verify::{verify, VerifyKind};
use extpow::{Matrix, RepMatrix, Ring, Subset, SubsetIndex, Truth};

type Outcome = Result<(bool, String), String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn q() -> Ring {
    Ring::rationals()
}

fn fp(p: u64) -> Ring {
    Ring::modular(p).unwrap()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

/// 1. `∧^m t_{i,j}(ξ)` equals the matrix of minors of `t_{i,j}(ξ)`.
fn transvection_formula() -> Outcome {
    let p = e(Ring::polynomial(Ring::integers(), ["xi"]))?;
    let xis = vec![p.zero(), p.one(), p.neg(&p.one()), e(p.var("xi"))?];
    let mut checked = 0;
    for n in 2..=7 {
        for m in 1..=3.min(n) {
            for i in 1..=n {
                for j in (1..=n).filter(|&j| j != i) {
                    for xi in &xis {
                        let ours = e(exterior_transvection(n, m, i, j, xi, &p))?;
                        let minors = e(cauchy_binet(&transvection(&p, n, i - 1, j - 1, xi), m))?;
                        if ours.to_dense() != minors.to_dense() {
                            return Ok((
                                false,
                                format!("mismatch at n={n} m={m} ({i},{j}) xi={}", p.format_elem(xi)),
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok((true, format!("{checked} cases equal")))
}

/// 2. The worked example for `n = 5`.
fn worked_example() -> Outcome {
    let p = e(Ring::polynomial(Ring::integers(), ["xi"]))?;
    let xi = e(p.var("xi"))?;
    let got: Vec<(String, String, String)> = e(exterior_transvection_factors(5, 3, 1, 3, &xi, &p))?
        .iter()
        .map(|f| (f.row.label(), f.col.label(), p.format_elem(&f.coeff)))
        .collect();
    let want: Vec<(String, String, String)> = [("124", "234", "-xi"), ("125", "235", "-xi"), ("145", "345", "xi")]
        .iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
    let diag: Vec<String> = e(exterior_torus(5, 4, 2, &xi, &p))?
        .diagonal()
        .iter()
        .map(|x| p.format_elem(x))
        .collect();
    let ok = got == want && diag == ["xi", "xi", "xi", "1", "xi"];
    Ok((ok, format!("factors {got:?}, diagonal {diag:?}")))
}

/// 3. `rank(∧^m t_{i,j}(ξ) - e) = C(n-2, m-1)` for `ξ ≠ 0`.
fn residue_values() -> Outcome {
    let mut checked = 0;
    for ring in [fp(5), q()] {
        let xis: Vec<_> = sample_set(&ring).into_iter().filter(|x| !ring.is_zero(x)).collect();
        for n in 2..=7 {
            for m in 1..=3.min(n) {
                for i in 1..=n {
                    for j in (1..=n).filter(|&j| j != i) {
                        for xi in &xis {
                            let r = e(residue(&e(exterior_transvection(n, m, i, j, xi, &ring))?))?;
                            let want = binomial(n - 2, m - 1);
                            if r != want {
                                return Ok((false, format!("n={n} m={m} ({i},{j}) over {ring}: {r} != {want}")));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((true, format!("{checked} cases")))
}

/// 4. Elementary words preserve the Plücker ideal; a planted element does not.
fn plucker_invariance() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, m) in [(5, 2), (6, 2)] {
        for ring in [q(), fp(7)] {
            let mut pass = 0;
            for s in 0..50 {
                let g = e(evaluate_word(&e(random_word(n, 12, &ring, 1000 + s))?, n, m))?;
                pass += usize::from(e(stabilizes_plucker(&g))?.result == Truth::True);
            }
            let index = e(SubsetIndex::new(n, m))?;
            let mut t = Matrix::identity(&ring, index.len());
            let a = index.index_of(&e(Subset::new(n, [1, 2]))?).unwrap();
            let b = index.index_of(&e(Subset::new(n, [3, 4]))?).unwrap();
            t.set(a, b, ring.one());
            let planted = e(stabilizes_plucker(&e(RepMatrix::from_matrix(n, m, t))?))?.result;
            ok &= pass == 50 && planted == Truth::False;
            lines.push(format!("({n},{m}) {ring}: {pass}/50, planted {planted:?}"));
        }
    }
    Ok((ok, lines.join("; ")))
}

/// Time limit for the `(9, 3)` part of criterion 5.
const FORM_9_3_LIMIT: Duration = Duration::from_secs(60);

/// 5. `f(∧^m h x) = det(h) f(x)`.
fn form_semi_invariance() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, m) in [(6, 2), (9, 3)] {
        let start = Instant::now();
        let f = e(form_polarized(&e(Subset::full(n))?, m, &Ring::integers()))?;
        for ring in [q(), Ring::modular(5).unwrap()] {
            let mut rg = rng(500 + n as u64);
            let mut pass = 0;
            for _ in 0..50 {
                let h = random_gl(n, &ring, &mut rg);
                let l = e(semi_invariance_scalar(&e(cauchy_binet(&h, m))?, &f))?;
                pass += usize::from(l == Some(e(h.det())?));
            }
            ok &= pass == 50;
            lines.push(format!("({n},{m}) {ring}: {pass}/50"));
        }
        if (n, m) == (9, 3) {
            let t = start.elapsed();
            ok &= t <= FORM_9_3_LIMIT;
            lines.push(format!(
                "(9,3) took {:.1}s of {}s",
                t.as_secs_f64(),
                FORM_9_3_LIMIT.as_secs()
            ));
        }
    }
    Ok((ok, lines.join("; ")))
}

/// 6. The semi-invariant forms of grading (1,...,1) are the multiples of `f`.
fn uniqueness() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for field in [q(), fp(2), fp(3)] {
        let space = e(semi_invariant_space(6, 2, &field))?;
        let f = e(form_polarized(&e(Subset::full(6))?, 2, &field))?;
        let has_f = e(space.contains(&e(f.to_graded_vector())?))?;
        ok &= space.dimension() == 1 && has_f;
        lines.push(format!("{field}: dim {}, contains f {has_f}", space.dimension()));
    }
    Ok((ok, lines.join("; ")))
}

/// 7. Lie algebra dimensions.
fn lie_dimensions() -> Outcome {
    let ext = e(lie_dim_form_stabilizer(6, 2, &q(), true))?.dimension();
    let plain = e(lie_dim_form_stabilizer(6, 2, &q(), false))?.dimension();
    let mut ok = ext == 36 && plain == 35;
    let mut lines = vec![format!("Q: extended {ext}, plain {plain}")];
    for p in [2, 3, 5] {
        let ext = e(lie_dim_form_stabilizer(6, 2, &fp(p), true))?.dimension();
        let plain = e(lie_dim_form_stabilizer(6, 2, &fp(p), false))?.dimension();
        ok &= ext <= 36 && plain <= 35;
        lines.push(format!("F{p}: extended {ext}, plain {plain}"));
    }
    let set = e(plucker_set(5, 2))?;
    let pl = e(lie_fix_system(set.ring(), set.polys(), &q(), FixMode::Span))?.dimension();
    ok &= pl == 25;
    lines.push(format!("Plucker (5,2) Q: {pl}"));
    Ok((ok, lines.join("; ")))
}

/// 8. The diagonal relation on `Lie(G_f)`.
fn diagonal() -> Outcome {
    let rel = e(diagonal_relation(6, 2))?;
    let shown: Vec<(String, i64)> = rel.iter().map(|(w, c)| (w.label(), *c)).collect();
    let want: Vec<(String, i64)> = [("12", 1), ("13", 1), ("14", -1), ("15", -1), ("16", -1), ("23", -2)]
        .iter()
        .map(|(w, c)| (w.to_string(), *c))
        .collect();
    let r6 = e(verify_diagonal_relation(6, 2, &q()))?;
    let r9 = e(verify_diagonal_relation(9, 3, &q()))?;
    let lead = r9.relation[0].1;
    let ok = shown == want && r6.pass && r9.pass && lead == 3;
    Ok((
        ok,
        format!(
            "(6,2) {shown:?} holds {} on dim {}; (9,3) leading {lead} holds {} on dim {}",
            r6.pass, r6.dimension, r9.pass, r9.dimension
        ),
    ))
}

/// 9. The ideal `F` for `(7,2)`.
fn ideal_case() -> Outcome {
    let f5 = fp(5);
    let mut rg = rng(900);
    let (mut unit, mut preserved) = (0, 0);
    for _ in 0..25 {
        let g = e(cauchy_binet(&random_gl(7, &f5, &mut rg), 2))?;
        unit += usize::from(e(stabilizes_ideal_f(&g))?.is_some());
        preserved += usize::from(e(preserves_ideal_f(&g))?);
    }
    let dim_q = e(lie_dim_ideal_stabilizer(7, 2, &q()))?.dimension();
    let gens = e(ideal_f_generators(7, 2))?;
    let mut indep = Vec::new();
    for p in [2, 3, 5] {
        indep.push(e(independent_mod_p(&gens, p))?);
    }
    let ok = unit == 25 && dim_q == 49 && indep.iter().all(|&x| x);
    Ok((
        ok,
        format!(
            "unit scalars {unit}/25, span preserved {preserved}/25, Lie dim over Q {dim_q}, independent mod 2,3,5 {indep:?}"
        ),
    ))
}

/// 10. Membership and transporter predicates agree.
fn normalizer() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for ring in [fp(5), q()] {
        let r = e(normalizer_equalities_demo(6, 2, &ring, 25, 7))?;
        let count = |k: SampleKind| r.samples.iter().filter(|s| s.kind == k && s.consistent).count();
        let (pos, neg, planted) = (
            count(SampleKind::Positive),
            count(SampleKind::Negative),
            count(SampleKind::Planted),
        );
        let dets = r.samples.iter().all(|s| s.det_conjugates_one);
        ok &= r.consistent() && pos == 25 && neg == 25 && planted == 3 && dets;
        lines.push(format!(
            "{ring}: positives {pos}/25, negatives {neg}/25, planted {planted}/3, det(z^g)=1 {dets}"
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn reports() -> Result<Vec<String>, String> {
    Ok(vec![
        e(verify(VerifyKind::Plucker, 5, 2, &q(), 10, 1))?.to_json().to_string(),
        e(verify(VerifyKind::Form, 6, 2, &fp(5), 10, 1))?.to_json().to_string(),
        e(verify(VerifyKind::Ideal, 7, 2, &fp(5), 10, 1))?.to_json().to_string(),
        e(lie_report(6, 2, &q(), LieMode::Plain))?.to_json().to_string(),
        e(lie_report(5, 2, &q(), LieMode::Plucker))?.to_json().to_string(),
        e(normalizer_equalities_demo(6, 2, &fp(5), 5, 7))?.to_json().to_string(),
    ])
}

/// 11. Same seeds give byte-identical reports, also with more workers.
fn determinism() -> Outcome {
    let first = reports()?;
    let pool = e(rayon::ThreadPoolBuilder::new().num_threads(3).build())?;
    let second = pool.install(reports)?;
    let same = first == second;
    Ok((
        same,
        format!(
            "{} reports, {} bytes, identical {same}",
            first.len(),
            first.iter().map(String::len).sum::<usize>()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("transvection formula", 10, transvection_formula),
        ("worked example", 1, worked_example),
        ("residue", 5, residue_values),
        ("Plucker invariance", 30, plucker_invariance),
        ("form semi-invariance", 120, form_semi_invariance),
        ("uniqueness of f", 120, uniqueness),
        ("Lie dimensions", 120, lie_dimensions),
        ("diagonal relation", 120, diagonal),
        ("ideal case", 180, ideal_case),
        ("normalizer theorem", 180, normalizer),
        ("determinism", 120, determinism),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (pass, detail) = match outcome {
            Ok((p, d)) => (p && in_time, d),
            Err(err) => (false, format!("error: {err}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name} [{:.1}s / {limit}s]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
