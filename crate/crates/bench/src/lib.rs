//! Criterion benchmarks for the ranking routes, kept in a library so the
//! bench target stays a thin `criterion_main!` shim.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use totalrank_core::dense_verify::{closed_form_totalrank, DenseMatrix};
use totalrank_core::pagerank::power_iteration;
use totalrank_core::quadrature::marginalize_pagerank;
use totalrank_core::random::{
    random_graph, random_guarded_matrix, random_stochastic_vector, seeded,
};
use totalrank_core::totalrank::series_sum;
use totalrank_core::{
    DampingFactor, QuadratureConfig, SeriesConfig, StochasticVector, TransitionMatrix,
};

pub const SEED: u64 = 42;

pub fn instance(n: usize) -> (TransitionMatrix, StochasticVector) {
    let mut rng = seeded(SEED ^ n as u64);
    let g = random_graph(&mut rng, n);
    let o0 = StochasticVector::uniform(n).expect("n > 0");
    let h = TransitionMatrix::build(&g, &o0).expect("valid graph");
    (h, o0)
}

pub fn guarded(n: usize) -> (DenseMatrix, Vec<f64>) {
    let mut rng = seeded(SEED ^ n as u64);
    let m = random_guarded_matrix(&mut rng, n, 0.8);
    let o0 = random_stochastic_vector(&mut rng, n).into_inner();
    (m, o0)
}

pub fn benchmarks(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for n in [1_000, 100_000] {
        let (h, o0) = instance(n);
        let mut out = vec![0.0; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| h.matvec_into(black_box(o0.as_slice()), &mut out))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("power_iteration");
    let (h, o0) = instance(10_000);
    for alpha in [0.5, 0.85, 0.99] {
        let a = DampingFactor::new(alpha).expect("alpha in (0, 1)");
        group.bench_with_input(BenchmarkId::from_parameter(alpha), &a, |b, &a| {
            b.iter(|| power_iteration(&h, &o0, a, 1e-10, 1_000_000).expect("solve"))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("totalrank");
    group.sample_size(10);
    let (h, o0) = instance(1_000);
    for tol in [1e-3, 1e-4] {
        let cfg = SeriesConfig::new(tol, 100_000_000, true).expect("valid config");
        group.bench_with_input(BenchmarkId::new("series", tol), &cfg, |b, cfg| {
            b.iter(|| series_sum(&h, &o0, cfg).expect("series"))
        });
    }
    let cfg = QuadratureConfig::default();
    group.bench_function("quadrature", |b| {
        b.iter(|| marginalize_pagerank(&h, &o0, &cfg).expect("quadrature"))
    });
    group.finish();

    let mut group = c.benchmark_group("closed_form");
    for n in [8, 32] {
        let (m, o0) = guarded(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| closed_form_totalrank(&m, &o0, 1e-14).expect("closed form"))
        });
    }
    group.finish();
}
