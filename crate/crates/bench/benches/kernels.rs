use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slicelab::gowers::{gowers_norm_exact, gowers_norm_mc};
use slicelab::nonclassical::{verify_degree, weight_polynomial};
use slicelab::slicemodel::dense_model_difference;
use slicelab::synth::random_table;
use slicelab::testers::{decode_linear, linearity_pass_rate};
use slicelab::{wht, Mode, SliceFunction};

fn transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("wht");
    for dim in [12u32, 16, 20] {
        let f = random_table(dim, 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &f, |b, f| b.iter(|| wht(black_box(f)).unwrap()));
    }
    group.finish();
}

fn gowers(c: &mut Criterion) {
    let f = dense_model_difference(6, 2).unwrap();
    c.bench_function("u3 exact 2n=12", |b| b.iter(|| gowers_norm_exact(black_box(&f), 3).unwrap()));
    c.bench_function("u3 mc 2n=12 x512", |b| b.iter(|| gowers_norm_mc(black_box(&f), 3, 512, 0).unwrap()));
    let g = random_table(16, 2).unwrap();
    c.bench_function("u2 exact dim 16", |b| b.iter(|| gowers_norm_exact(black_box(&g), 2).unwrap()));
}

fn testers(c: &mut Criterion) {
    let f = SliceFunction::planted_linear(6, 0x2d, 0.1, 3).unwrap();
    c.bench_function("linearity exact 2n=12", |b| {
        b.iter(|| linearity_pass_rate(black_box(&f), Mode::Exact).unwrap())
    });
    c.bench_function("linearity mc 2n=12 x4096", |b| {
        b.iter(|| linearity_pass_rate(black_box(&f), Mode::MonteCarlo { samples: 4096, seed: 0 }).unwrap())
    });
    c.bench_function("decode 2n=12", |b| b.iter(|| decode_linear(black_box(&f), 4).unwrap()));
}

fn degrees(c: &mut Criterion) {
    let p = weight_polynomial(4, 3, 3, 0).unwrap();
    c.bench_function("verify degree 3 dim 8", |b| b.iter(|| verify_degree(black_box(&p), 3)));
}

criterion_group!(benches, transform, gowers, testers, degrees);
criterion_main!(benches);
