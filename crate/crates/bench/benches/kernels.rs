use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hinfcalc::library::{builtin_function, Family};
use hinfcalc::linops::{expm, lyapunov_gram, sqrt_minus_a};
use hinfcalc::{TimeGrid, ToeplitzMultiplier};
use num_complex::Complex64;

fn multiplier(c: &mut Criterion) {
    let grid = TimeGrid::for_abscissa(-1.0, 1 << 14).unwrap();
    let g = builtin_function("blaschke5").unwrap();
    c.bench_function("multiplier setup N=2^14", |b| b.iter(|| ToeplitzMultiplier::new(black_box(&g), grid).unwrap()));
    let m = ToeplitzMultiplier::new(&g, grid).unwrap();
    let input: Vec<Complex64> = grid.times().iter().map(|t| Complex64::new((-t).exp(), 0.0)).collect();
    let mut buf = Vec::new();
    c.bench_function("multiplier apply N=2^14", |b| b.iter(|| m.apply_scalar_into(black_box(&input), &mut buf)));
}

fn dense(c: &mut Criterion) {
    let a = Family::Random.build(64).unwrap();
    c.bench_function("expm random:64", |b| b.iter(|| expm(black_box(a.entries()))));
    c.bench_function("sqrt_minus_a random:64", |b| b.iter(|| sqrt_minus_a(black_box(&a)).unwrap()));
    let root = sqrt_minus_a(&a).unwrap();
    c.bench_function("lyapunov_gram random:64", |b| b.iter(|| lyapunov_gram(black_box(&a), &root).unwrap()));
}

criterion_group!(benches, multiplier, dense);
criterion_main!(benches);
