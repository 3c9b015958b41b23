use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use igusa_core::newton::{polyhedron_of, verify_partition};
use igusa_core::oracle::count_solutions;
use igusa_core::truncation::{counterexample_family, scan, Engine, ScanOptions};
use igusa_core::zeta::{igusa_zeta_newton, ZetaOptions};
use igusa_core::{parse_expression, Exec, PrimeContext};

const STRATEGIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn oracle(c: &mut Criterion) {
    let f = parse_expression("x^3 + x*y + y^2", None).unwrap();
    let ctx = PrimeContext::new(3).unwrap();
    let mut group = c.benchmark_group("count_solutions");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new(name, "p3_m8"), &exec, |b, &exec| {
            b.iter(|| count_solutions(&f, &ctx, 8, exec).unwrap())
        });
    }
    group.finish();
}

fn partition(c: &mut Criterion) {
    let poly = polyhedron_of(
        &parse_expression("x^2 + y^3 + x*z^2 + y*z", None).unwrap(),
        4,
    )
    .unwrap();
    let mut group = c.benchmark_group("verify_partition");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new(name, "b10"), &exec, |b, &exec| {
            b.iter(|| verify_partition(&poly, 10, exec).unwrap())
        });
    }
    group.finish();
}

fn newton_zeta(c: &mut Criterion) {
    let f = parse_expression("x*y*z + x^3 + y^3 + z^3", None).unwrap();
    let ctx = PrimeContext::new(5).unwrap();
    let mut group = c.benchmark_group("igusa_zeta_newton");
    for (name, exec) in STRATEGIES {
        let opts = ZetaOptions {
            exec,
            ..ZetaOptions::default()
        };
        group.bench_with_input(BenchmarkId::new(name, "p5"), &opts, |b, &opts| {
            b.iter(|| igusa_zeta_newton(&f, &ctx, opts).unwrap())
        });
    }
    group.finish();
}

fn truncation_scan(c: &mut Criterion) {
    let f = counterexample_family(3).unwrap();
    let ctx = PrimeContext::new(3).unwrap();
    let mut group = c.benchmark_group("truncate_scan");
    for (name, exec) in STRATEGIES {
        let opts = ScanOptions {
            exec,
            ..ScanOptions::default()
        };
        group.bench_with_input(
            BenchmarkId::new(name, "counterexample_d12"),
            &opts,
            |b, &opts| b.iter(|| scan(&f, &ctx, 1, 12, Engine::Onevar, opts).unwrap()),
        );
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = oracle, partition, newton_zeta, truncation_scan
}
criterion_main!(benches);
