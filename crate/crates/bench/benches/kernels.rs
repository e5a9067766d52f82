use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use extpow::extrep::{cauchy_binet, evaluate_word, random_word};
use extpow::forms::{semi_invariance, stabilizes_plucker};
use extpow::liealg::lie_dim_form_stabilizer;
use extpow::normalizer::{transports_elementary, Target};
use extpow::Ring;
use extpow_bench::{base_matrix, form, image, SEED};

fn minors(c: &mut Criterion) {
    let mut group = c.benchmark_group("cauchy_binet");
    for (n, m) in [(6, 2), (9, 3)] {
        for ring in [Ring::rationals(), Ring::modular(5).unwrap()] {
            let h = base_matrix(n, &ring);
            group.bench_with_input(BenchmarkId::new(format!("{n},{m}"), &ring), &h, |b, h| {
                b.iter(|| cauchy_binet(h, m).unwrap())
            });
        }
    }
    group.finish();
}

fn forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("semi_invariance");
    for (n, m) in [(6, 2), (9, 3)] {
        let f = form(n, m);
        for ring in [Ring::rationals(), Ring::modular(5).unwrap()] {
            let g = image(n, m, &ring);
            group.bench_with_input(BenchmarkId::new(format!("{n},{m}"), &ring), &g, |b, g| {
                b.iter(|| semi_invariance(g, &f).unwrap())
            });
        }
    }
    group.finish();
}

fn plucker(c: &mut Criterion) {
    let ring = Ring::modular(7).unwrap();
    let g = evaluate_word(&random_word(6, 12, &ring, SEED).unwrap(), 6, 2).unwrap();
    c.bench_function("stabilizes_plucker/6,2/Z7", |b| {
        b.iter(|| stabilizes_plucker(&g).unwrap())
    });
}

fn lie(c: &mut Criterion) {
    let mut group = c.benchmark_group("lie_dim");
    group.sample_size(10);
    let q = Ring::rationals();
    group.bench_function("6,2/Q/extended", |b| {
        b.iter(|| lie_dim_form_stabilizer(6, 2, &q, true).unwrap())
    });
    let f2 = Ring::modular(2).unwrap();
    group.bench_function("9,3/F2/plain", |b| {
        b.iter(|| lie_dim_form_stabilizer(9, 3, &f2, false).unwrap())
    });
    group.finish();
}

fn transporter(c: &mut Criterion) {
    let mut group = c.benchmark_group("transports_elementary");
    group.sample_size(10);
    let ring = Ring::modular(5).unwrap();
    let g = image(6, 2, &ring);
    group.bench_function("6,2/Z5", |b| b.iter(|| transports_elementary(&g, Target::Gf).unwrap()));
    group.finish();
}

criterion_group!(benches, minors, forms, plucker, lie, transporter);
criterion_main!(benches);
