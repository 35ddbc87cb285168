use criterion::{black_box, criterion_group, criterion_main, Criterion};
use selfsim::profile::Spacing;
use selfsim::seed::{choose_b1, picard_solve};
use selfsim::verify::{self, VerifyConfig};
use selfsim::{derive_constants, solve, SeedConfig, SolverSettings};
use selfsim_bench::fixtures;

fn seed(c: &mut Criterion) {
    let mut group = c.benchmark_group("seed");
    for (name, p) in fixtures() {
        let consts = derive_constants(&p);
        let cfg = SeedConfig::default();
        let (b1, _) = choose_b1(&p, &consts, &cfg).unwrap();
        group.bench_function(name, |b| b.iter(|| picard_solve(black_box(&p), &consts, b1, &cfg).unwrap()));
    }
    group.finish();
}

fn full_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for (name, p) in fixtures() {
        group.bench_function(name, |b| b.iter(|| solve(black_box(p), &SolverSettings::default()).unwrap()));
    }
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let pr = solve(fixtures()[0].1, &SolverSettings::default()).unwrap();
    c.bench_function("sample_1000_log", |b| {
        b.iter(|| pr.sample(black_box(1e-6), 1e6, 1000, Spacing::Log).unwrap())
    });
}

fn checks(c: &mut Criterion) {
    let pr = solve(fixtures()[0].1, &SolverSettings::default()).unwrap();
    let cfg = VerifyConfig {
        checks: Some(["blowup_rate", "envelopes", "monotonicity", "ode_residual", "integral_identity"].map(String::from).to_vec()),
        ..VerifyConfig::default()
    };
    c.bench_function("verify_local_checks", |b| b.iter(|| verify::run(black_box(&pr), None, &cfg).unwrap()));
}

criterion_group!(benches, seed, full_solve, evaluate, checks);
criterion_main!(benches);
