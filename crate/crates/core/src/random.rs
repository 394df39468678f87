//! Seeded generators for test graphs and matrices.
//!
//! Used by the `verify` subcommand, the benchmarks and the test suites.
//! ChaCha8 keeps streams identical across platforms and releases.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense_verify::DenseMatrix;
use crate::graph_io::{Edge, GraphEdges, StochasticVector};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weight<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.1..2.0)
}

/// Random weighted digraph on `n >= 1` nodes with out-degrees in `0..=3`,
/// so dangling nodes, self-loops and parallel edges all occur.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> GraphEdges {
    assert!(n >= 1);
    let mut edges = Vec::new();
    for src in 0..n {
        for _ in 0..rng.random_range(0..=3) {
            let dst = rng.random_range(0..n);
            edges.push(Edge { src, dst, weight: weight(rng) });
        }
    }
    if edges.is_empty() {
        edges.push(Edge { src: 0, dst: n - 1, weight: 1.0 });
    }
    GraphEdges::new(n, edges).expect("generated graph is valid")
}

/// Random strongly connected weighted digraph: a Hamiltonian cycle through a
/// random permutation plus up to two extra out-edges per node.
pub fn random_strongly_connected_graph<R: Rng>(rng: &mut R, n: usize) -> GraphEdges {
    assert!(n >= 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 0..n {
        edges.push(Edge {
            src: order[k],
            dst: order[(k + 1) % n],
            weight: weight(rng),
        });
    }
    for src in 0..n {
        for _ in 0..rng.random_range(0..=2) {
            let dst = rng.random_range(0..n);
            edges.push(Edge { src, dst, weight: weight(rng) });
        }
    }
    GraphEdges::new(n, edges).expect("generated graph is valid")
}

/// Random nonnegative vector normalized to unit mass.
pub fn random_stochastic_vector<R: Rng>(rng: &mut R, n: usize) -> StochasticVector {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    StochasticVector::from_weights(w).expect("positive weights")
}

/// Dense column-stochastic matrix with roughly 30% zero entries.
pub fn random_stochastic_dense<R: Rng>(rng: &mut R, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for j in 0..n {
        let mut sum = 0.0;
        for i in 0..n {
            if rng.random::<f64>() >= 0.3 {
                let v = rng.random::<f64>();
                m[(i, j)] = v;
                sum += v;
            }
        }
        if sum == 0.0 {
            m[(rng.random_range(0..n), j)] = 1.0;
            continue;
        }
        for i in 0..n {
            m[(i, j)] /= sum;
        }
    }
    m
}

/// Invertible sub-stochastic matrix `beta (lambda I + (1 - lambda) S)` with
/// `S` random column-stochastic, `beta` in `[0.3, max_rho]` and `lambda` in
/// `[0.6, 0.9]`.
///
/// Its induced 1-norm and spectral radius both equal `beta`, and every
/// eigenvalue has modulus at least `beta (2 lambda - 1) >= 0.06`.
pub fn random_guarded_matrix<R: Rng>(rng: &mut R, n: usize, max_rho: f64) -> DenseMatrix {
    assert!(max_rho >= 0.3);
    let beta = rng.random_range(0.3..=max_rho);
    let lambda = rng.random_range(0.6..=0.9);
    let s = random_stochastic_dense(rng, n);
    DenseMatrix::identity(n)
        .scale(lambda)
        .add(&s.scale(1.0 - lambda))
        .scale(beta)
}
