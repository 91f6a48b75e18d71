//! Benchmarks for the hot paths: jet products, cube decomposition,
//! partition evaluation, and the minimal-level search.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nninterp::czdecomp::{cz_decompose, DyadicRegion};
use nninterp::feasibility::{min_norm, FeasConfig};
use nninterp::jets::{jet_multiply, Jet};
use nninterp::smoothfn::whitney_partition;
use nninterp::synth;
use rand::Rng;
use std::hint::black_box;

fn bench_jet_multiply(c: &mut Criterion) {
    let mut rng = synth::rng(1);
    let base = [0.3, -0.2];
    let count = nninterp::multiindex::count(2, 3);
    let coeffs: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let p = Jet::from_coeffs(&base, 3, coeffs).unwrap();
    let coeffs: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let q = Jet::from_coeffs(&base, 3, coeffs).unwrap();
    c.bench_function("jet_multiply_n2_m4", |b| {
        b.iter(|| black_box(jet_multiply(black_box(&p), black_box(&q)).unwrap()))
    });
}

fn bench_cz_decompose(c: &mut Criterion) {
    let mut rng = synth::rng(2);
    let (points, _) = synth::random_dataset(&mut rng, 2, 20, 3.0, 1.0);
    let region = DyadicRegion::padded_around(&points, 2, 6);
    c.bench_function("cz_decompose_n2_20pts", |b| {
        b.iter(|| black_box(cz_decompose(black_box(&points), black_box(&region)).unwrap()))
    });
}

fn bench_partition_eval(c: &mut Criterion) {
    let region = DyadicRegion::new(vec![-2], vec![2]).unwrap();
    let e = vec![vec![0.5], vec![0.5 + 2.0f64.powi(-6)]];
    let dec = cz_decompose(&e, &region).unwrap();
    let thetas = whitney_partition(&dec, 2).unwrap();
    c.bench_function("whitney_partition_sum_eval", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            let mut t = -1.9;
            while t < 1.9 {
                acc += thetas.iter().map(|th| th.eval(&[t])).sum::<f64>();
                t += 0.1;
            }
            black_box(acc)
        })
    });
}

fn bench_min_norm(c: &mut Criterion) {
    let cfg = FeasConfig {
        certificates: false,
        ..FeasConfig::default()
    };
    let mut rng = synth::rng(3);
    let (points, values) = synth::random_dataset(&mut rng, 1, 8, 3.0, 2.0);
    c.bench_function("min_norm_m2_8pts", |b| {
        b.iter_batched(
            || (points.clone(), values.clone()),
            |(p, v)| black_box(min_norm(&p, &v, 2, &cfg).unwrap().level),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_jet_multiply,
    bench_cz_decompose,
    bench_partition_eval,
    bench_min_norm
);
criterion_main!(benches);
