use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use logvol::stationarity::lyapunov_exponent_mc;
use logvol::{
    lm_test_aslog_vs_augmented, portmanteau_test, qmle_aslog, qmle_egarch11, AsLogGarchOrder, InitPolicy, OptimConfig, Rng, TestOptions,
};
use logvol_bench::{aslog_sample, aslog_theta, egarch_sample};

fn estimation(c: &mut Criterion) {
    let init = InitPolicy::default();
    let config = OptimConfig { restarts: 1, ..OptimConfig::default() };
    let eps = aslog_sample(4000, 2);
    let order = AsLogGarchOrder::new(1, 1).unwrap();

    let mut group = c.benchmark_group("qmle");
    group.sample_size(10);
    group.bench_function("aslog_4000", |b| b.iter(|| qmle_aslog(black_box(&eps), order, &config, &init).unwrap()));
    let eg = egarch_sample(4000, 2);
    group.bench_function("egarch_4000", |b| b.iter(|| qmle_egarch11(black_box(&eg), &config, &init).unwrap()));
    group.finish();

    let fit = qmle_aslog(&eps, order, &config, &init).unwrap();
    let opts = TestOptions::default();
    let mut group = c.benchmark_group("tests");
    group.bench_function("lm_aslog_lag1", |b| b.iter(|| lm_test_aslog_vs_augmented(&fit, black_box(&eps), 1, &init, &opts).unwrap()));
    group.bench_function("portmanteau_m12", |b| b.iter(|| portmanteau_test(&fit, black_box(&eps), 12, &init, &opts).unwrap()));
    group.finish();

    let theta = aslog_theta();
    c.bench_function("lyapunov_mc", |b| {
        b.iter(|| lyapunov_exponent_mc(black_box(&theta), 0.5, 1000, 20, &mut Rng::new(3)).unwrap())
    });
}

criterion_group!(benches, estimation);
criterion_main!(benches);
