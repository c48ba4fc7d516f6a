use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isac_core::lb::{self, CltSampling};
use isac_core::mc::{self, Scheme};
use isac_core::special::GenChi2Params;
use isac_core::{sjb, LbWeights, ScenarioConfig, SjbWeights};

fn genchi2(c: &mut Criterion) {
    let mut g = c.benchmark_group("genchi2_cdf");
    let small = GenChi2Params::new(vec![1.0, -0.4], vec![2, 1], vec![1.5, 0.0], 0.3, 0.5).unwrap();
    let wide = GenChi2Params::new(vec![1e3, 2.0, -0.5], vec![1, 1, 1], vec![4.0, 0.0, 2.0], 1.0, -10.0).unwrap();
    for (name, p) in [("small", &small), ("wide_weights", &wide)] {
        let x = p.mean();
        g.bench_with_input(BenchmarkId::from_parameter(name), p, |b, p| b.iter(|| p.cdf(black_box(x)).unwrap()));
    }
    g.finish();
}

fn outages(c: &mut Criterion) {
    let cfg = ScenarioConfig::default();
    let mut g = c.benchmark_group("outage");
    g.sample_size(20);
    g.bench_function("sjb_user_op", |b| b.iter(|| sjb::user_op(black_box(20.0), 1.0, &cfg).unwrap()));
    g.bench_function("sjb_target_op", |b| b.iter(|| sjb::target_op(black_box(2.0 * cfg.crb_g0()), 1.0, &cfg).unwrap()));
    let w = LbWeights::from_power_split(2.0, &cfg).unwrap();
    g.bench_function("lb_user_op_no_dpc", |b| {
        b.iter(|| lb::user_op(black_box(5.0), &w, &cfg, false, CltSampling::default()).unwrap())
    });
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let cfg = ScenarioConfig::default();
    let scheme = Scheme::Sjb(SjbWeights::from_magnitude(1.0, &cfg).unwrap());
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("sjb_realizations_10k", |b| b.iter(|| mc::realizations(&scheme, &cfg, 10_000, black_box(1)).unwrap()));
    g.finish();
}

criterion_group!(benches, genchi2, outages, monte_carlo);
criterion_main!(benches);
