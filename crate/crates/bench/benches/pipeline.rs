use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use homeadv_bench::{decade_params, synthetic_design};
use homeadv_core::geo::haversine_km;
use homeadv_core::glm::{fit_logistic, FitOptions};
use homeadv_core::pipeline::run_study;
use homeadv_core::synth::generate;

fn bench_haversine(c: &mut Criterion) {
    c.bench_function("haversine_km", |b| {
        b.iter(|| {
            haversine_km(
                black_box(-23.55),
                black_box(-46.63),
                black_box(-22.91),
                black_box(-43.17),
            )
        })
    });
}

fn bench_glm(c: &mut Criterion) {
    let small = synthetic_design(500, 8, 7);
    let large = synthetic_design(5000, 8, 8);
    let opts = FitOptions::default();
    c.bench_function("fit_logistic_500x9", |b| {
        b.iter(|| fit_logistic(black_box(&small), &opts).unwrap())
    });
    c.bench_function("fit_logistic_5000x9", |b| {
        b.iter(|| fit_logistic(black_box(&large), &opts).unwrap())
    });
}

fn bench_generate(c: &mut Criterion) {
    let params = decade_params(11);
    c.bench_function("generate_decade_12_teams", |b| {
        b.iter(|| generate(black_box(&params)))
    });
}

fn bench_study(c: &mut Criterion) {
    let params = decade_params(13);
    let sim = generate(&params);
    let config = params.study_config();
    c.bench_function("run_study_decade_12_teams", |b| {
        b.iter(|| run_study(black_box(&sim.dataset), &sim.gazetteer, &config).unwrap())
    });
}

criterion_group!(
    benches,
    bench_haversine,
    bench_glm,
    bench_generate,
    bench_study
);
criterion_main!(benches);
