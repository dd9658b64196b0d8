use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mono_spectrum::oracle::full_weight_distribution;
use mono_spectrum::{lta, DecreasingSet, Monomial, Poly, ResidualFamily};

fn evaluate(c: &mut Criterion) {
    let p = Poly::parse("x0*x1*x2 + x3*x4*x5 + x6*x7*x8 + x9*x10 + x11*x12*x13*x14 + x15", 20).unwrap();
    c.bench_function("evaluate m=20", |b| b.iter(|| black_box(&p).weight().unwrap()));
}

fn sigma(c: &mut Criterion) {
    // Twelve overlapping cubic tails: 4095 subsets.
    let tails: Vec<Monomial> = (0..12).map(|i| Monomial::from_mask(0b111 << i)).collect();
    let fam = ResidualFamily::new(Monomial::ONE, tails);
    c.bench_function("sigma q=12", |b| b.iter(|| black_box(&fam).sigma().unwrap()));
}

fn orbit(c: &mut Criterion) {
    let p = Poly::parse("x1*x3 + x0*x2*x4", 5).unwrap();
    c.bench_function("orbit m=5", |b| b.iter(|| lta::orbit_size(black_box(&p), None, 5).unwrap()));
}

fn spectrum(c: &mut Criterion) {
    let code = DecreasingSet::reed_muller(2, 5).unwrap();
    c.bench_function("spectrum RM(2,5)", |b| b.iter(|| full_weight_distribution(black_box(&code), 24).unwrap()));
}

criterion_group!(benches, evaluate, sigma, orbit, spectrum);
criterion_main!(benches);
