use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use spikeqrs_core::data::{gen_random_train, gen_synthetic_ecg, gen_wave_with_diracs};
use spikeqrs_core::lif::{lif_encode, lif_encode_train};
use spikeqrs_core::metrics::{alexiewicz_norm, weyl_discrepancy};
use spikeqrs_core::sod::{normalize, sod_encode, upsample_cubic};
use spikeqrs_core::{LifConfig, ResetMode, SodConfig};

fn lif(c: &mut Criterion) {
    let mut g = c.benchmark_group("lif_train");
    for n in [100, 1000, 10_000] {
        let eta = gen_random_train(n, (-1.5, 1.5), 1.0, 7).unwrap();
        g.throughput(Throughput::Elements(n as u64));
        for reset in ResetMode::ALL {
            let cfg = LifConfig::new(1.0, 0.1, 0.0, reset).unwrap();
            g.bench_with_input(BenchmarkId::new(reset.as_str(), n), &eta, |b, eta| {
                b.iter(|| lif_encode_train(black_box(eta), &cfg).unwrap())
            });
        }
    }
    g.finish();

    let f = gen_wave_with_diracs(3, 60.0, 0.001).unwrap();
    let cfg = LifConfig::new(0.5, 0.1, 0.0, ResetMode::ToMod).unwrap();
    c.bench_function("lif_hybrid_60s_1khz", |b| b.iter(|| lif_encode(black_box(&f), &cfg).unwrap()));
}

fn norms(c: &mut Criterion) {
    let eta = gen_random_train(10_000, (-1.5, 1.5), 1.0, 11).unwrap();
    let amps: Vec<f64> = eta.amplitudes().collect();
    c.bench_function("alexiewicz_norm_10k", |b| b.iter(|| alexiewicz_norm(black_box(&eta), 0.1)));
    c.bench_function("weyl_discrepancy_10k", |b| b.iter(|| weyl_discrepancy(black_box(&amps))));
}

fn sod(c: &mut Criterion) {
    let (x, _) = gen_synthetic_ecg(72.0, 60.0, 360.0).unwrap();
    let up = upsample_cubic(&normalize(&x).unwrap(), 10).unwrap();
    let cfg = SodConfig::new(0.05).unwrap();
    let mut g = c.benchmark_group("sod_ecg_60s");
    g.throughput(Throughput::Elements(up.len() as u64));
    g.bench_function("upsample_x10", |b| b.iter(|| upsample_cubic(black_box(&x), 10).unwrap()));
    g.bench_function("encode", |b| b.iter(|| sod_encode(black_box(&up), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, lif, norms, sod);
criterion_main!(benches);
