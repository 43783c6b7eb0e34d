use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use szego_core::direct::rk4_szego_states;
use szego_core::experiments::{flow_for, run_instability, InstabilityConfig};
use szego_core::{build_hankel, eigh_psd, rational_to_coeffs, RationalSymbol, SobolevIndex, C64};

fn datum(n: usize) -> szego_core::HardyFunction {
    let c = |re: f64, im: f64| C64::new(re, im);
    let r = RationalSymbol::new(vec![c(0.5, 0.1), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-0.45, 0.3)], 3).unwrap();
    rational_to_coeffs(&r, n)
}

fn propagator_sweep(c: &mut Criterion) {
    let flow = flow_for(&datum(120)).unwrap();
    c.bench_function("explicit/100 times x 256 coefficients", |b| {
        b.iter(|| {
            for k in 0..100 {
                black_box(flow.propagator(0.1 * k as f64).coefficients(256));
            }
        })
    });
}

fn rk4_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4/10 steps");
    for n in [64, 128, 256] {
        let u0 = datum(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &u0, |b, u0| {
            b.iter(|| rk4_szego_states(black_box(u0), 1e-2, 1e-3, 100).unwrap())
        });
    }
    group.finish();
}

fn eigh(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigh/H2");
    for n in [32, 64, 128] {
        let h2 = build_hankel(&datum(n), n).h2;
        group
            .bench_with_input(BenchmarkId::from_parameter(n), &h2, |b, h2| b.iter(|| eigh_psd(black_box(h2)).unwrap()));
    }
    group.finish();
}

fn instability(c: &mut Criterion) {
    let cfg = InstabilityConfig::new(vec![1.0 / 16.0], SobolevIndex::new(1.0).unwrap());
    c.bench_function("instability/eps=1/16", |b| b.iter(|| run_instability(black_box(&cfg)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(3));
    targets = propagator_sweep, rk4_step, eigh, instability
}
criterion_main!(benches);
