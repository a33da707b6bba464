use std::hint::black_box;
use std::path::Path;

use classdist::baselines::fit_baseline;
use classdist::model::{class_probabilities, ModelParams};
use classdist::special::lerch_phi;
use classdist::{fit, BaselineConfig, BaselineMethod, Dataset, FitConfig, SeriesConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn english() -> classdist::EmpiricalDistribution {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/letter_frequency_en.csv");
    Dataset::load(&path).unwrap().distribution().unwrap()
}

fn lerch(c: &mut Criterion) {
    let cfg = SeriesConfig::default();
    c.bench_function("lerch_phi z=0.5", |b| {
        b.iter(|| lerch_phi(black_box(0.5), 2.0, black_box(10.0), &cfg).unwrap())
    });
    c.bench_function("lerch_phi z=0.99", |b| {
        b.iter(|| lerch_phi(black_box(0.99), 2.0, black_box(10.0), &cfg).unwrap())
    });
}

fn model(c: &mut Criterion) {
    let params = ModelParams::new(20, 0.1).unwrap();
    c.bench_function("class_probabilities m=100", |b| {
        b.iter(|| class_probabilities(black_box(&params), 100).unwrap())
    });
}

fn fitting(c: &mut Criterion) {
    let d = english();
    let base = FitConfig { refine_rounds: 0, ..FitConfig::default() };
    let mut group = c.benchmark_group("fit english");
    group.sample_size(10);
    group.bench_function("base grid", |b| b.iter(|| fit(black_box(&d), &base).unwrap()));
    group.bench_function("refined", |b| {
        b.iter(|| fit(black_box(&d), &FitConfig::default()).unwrap())
    });
    let bcfg = BaselineConfig::default();
    for method in BaselineMethod::ALL {
        group.bench_function(method.name(), |b| {
            b.iter(|| fit_baseline(black_box(&d), method, &bcfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lerch, model, fitting);
criterion_main!(benches);
