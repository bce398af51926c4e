use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dimgroup::arith::int;
use dimgroup::decide::{cc_set, decide_pair, Config};
use dimgroup::exactmat::{snf, IntMatrix};
use dimgroup::invariants::ulm_numbers;
use dimgroup::padic::{eventual_row_space, hensel_sqrt};
use dimgroup_bench::{decision_pairs, dense};

fn decisions(c: &mut Criterion) {
    let cfg = Config::default();
    let mut group = c.benchmark_group("decide");
    group.sample_size(10);
    for p in decision_pairs() {
        group.bench_function(p.name, |bench| bench.iter(|| decide_pair(black_box(&p.a), black_box(&p.b), p.mode, &cfg)));
    }
    group.finish();
}

fn exact_linear_algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("exactmat");
    for n in [4usize, 8, 12] {
        let a = dense(n, n as u64);
        group.bench_with_input(BenchmarkId::new("snf", n), &a, |bench, a| bench.iter(|| snf(black_box(a))));
        group.bench_with_input(BenchmarkId::new("det", n), &a, |bench, a| bench.iter(|| black_box(a).det()));
        group.bench_with_input(BenchmarkId::new("ulm", n), &a, |bench, a| bench.iter(|| ulm_numbers(black_box(a))));
    }
    group.finish();
}

fn padic(c: &mut Criterion) {
    let mut group = c.benchmark_group("padic");
    let a = IntMatrix::from_rows(&[[1i64, 1], [2, 0]]);
    for m in [10u32, 40, 160] {
        group.bench_with_input(BenchmarkId::new("row_space", m), &m, |bench, &m| {
            bench.iter(|| eventual_row_space(black_box(&a), &int(2), m))
        });
        group.bench_with_input(BenchmarkId::new("hensel_sqrt", m), &m, |bench, &m| {
            bench.iter(|| hensel_sqrt(&int(2), &int(7), black_box(m)))
        });
    }
    group.finish();
}

fn congruence_classes(c: &mut Criterion) {
    let mut group = c.benchmark_group("cc");
    group.sample_size(10);
    for (m1, m2, n) in [(5i64, 2i64, 2usize), (7, 3, 2), (3, 2, 3)] {
        let id = format!("{}x{} mod {} over Z[1/{}]", n, n, m1, m2);
        group.bench_function(id, |bench| bench.iter(|| cc_set(&int(m1), &int(m2), &int(1), n)));
    }
    group.finish();
}

criterion_group!(battery, decisions, exact_linear_algebra, padic, congruence_classes);
criterion_main!(battery);
