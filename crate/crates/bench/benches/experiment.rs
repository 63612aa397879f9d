use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use sweepwidth::{
    analytic_w, calculate_w, run_experiment, Catalog, ExperimentConfig, HumanEye, HumanEyeConfig,
    Mode, ModelConstants, Scenario,
};

fn scenario() -> Scenario {
    let raft = Catalog::default_catalog()
        .get("Raft 4-person")
        .unwrap()
        .clone();
    Scenario::new(raft, 300, 9.3).unwrap()
}

fn bench_experiment(c: &mut Criterion) {
    let eye = HumanEye::default();
    let s = scenario();

    c.bench_function("exhaustive_54200", |b| {
        let cfg = ExperimentConfig::default();
        b.iter(|| calculate_w(&run_experiment(&eye, black_box(&s), &cfg).unwrap()));
    });

    c.bench_function("monte_carlo_600k", |b| {
        let cfg = ExperimentConfig {
            mode: Mode::MonteCarlo,
            ..ExperimentConfig::default()
        };
        b.iter(|| calculate_w(&run_experiment(&eye, black_box(&s), &cfg).unwrap()));
    });

    c.bench_function("analytic_w", |b| {
        let cfg = HumanEyeConfig::default();
        let constants = ModelConstants::default();
        b.iter(|| analytic_w(&cfg, black_box(&s), &constants).unwrap());
    });
}

criterion_group!(benches, bench_experiment);
criterion_main!(benches);
