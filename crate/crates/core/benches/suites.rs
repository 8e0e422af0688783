use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qssa_core::exec::Execution;
use qssa_core::random::Seed;
use qssa_core::suite::{parse_suites, run, SuiteConfig};
use qssa_core::wehrl::{wehrl_min_scan, SpinJ};

fn config(suites: &str, exec: Execution) -> SuiteConfig {
    SuiteConfig {
        suites: parse_suites(suites).unwrap(),
        trials: 32,
        seed: 42,
        exec,
        ..Default::default()
    }
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for name in ["stronger-ssa", "cpt", "concavity", "wehrl"] {
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let cfg = config(name, exec);
            group.bench_with_input(BenchmarkId::new(label, name), &cfg, |b, cfg| {
                b.iter(|| black_box(run(cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn wehrl_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("wehrl-scan");
    group.sample_size(10);
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(label, |b| {
            b.iter(|| black_box(wehrl_min_scan(SpinJ(4), 64, Seed(1), exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, suites, wehrl_scan);
criterion_main!(benches);
