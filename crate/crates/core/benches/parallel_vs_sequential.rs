use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cohx::coherence;
use cohx::io::{random_density, seeded_rng};
use cohx::optimize::OptimizerConfig;
use cohx::par::Execution;
use cohx::verify::{run_suite, Suite, VerifyConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn verify_suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for suite in [Suite::Divergences, Suite::Coherence] {
        for (name, exec) in MODES {
            let mut cfg = VerifyConfig::new(3, 8, 42);
            cfg.exec = exec;
            group.bench_with_input(BenchmarkId::new(suite.name(), name), &cfg, |b, cfg| {
                b.iter(|| run_suite(suite, black_box(cfg)).unwrap())
            });
        }
    }
    group.finish();
}

fn sandwiched_sweep(c: &mut Criterion) {
    let rho = random_density(4, 4, &mut seeded_rng(1)).unwrap();
    let alphas = [0.5, 0.75, 1.5, 2.0, 3.0, 5.0, f64::INFINITY];
    let cfg = OptimizerConfig::default();
    let mut group = c.benchmark_group("sandwiched-sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| exec.map_slice(&alphas, |&a| coherence::c_renyi_sandwiched(black_box(&rho), a, &cfg).unwrap().value))
        });
    }
    group.finish();
}

criterion_group!(benches, verify_suites, sandwiched_sweep);
criterion_main!(benches);
