//! PageRank and TotalRank on sparse column-stochastic graphs.
//!
//! TotalRank is the PageRank vector averaged uniformly over the damping
//! factor `alpha` in `(0, 1)`. It is computed here by three independent
//! routes that check one another:
//!
//! * [`totalrank::series_sum`]: the truncated coefficient series
//!   `sum_t 1/((t+1)(t+2)) H^t o0` with an exact, certified L1 tail bound;
//! * [`quadrature::marginalize_pagerank`]: graded composite Gauss-Legendre
//!   integration of the PageRank vector over `alpha`;
//! * [`dense_verify::closed_form_totalrank`]: the matrix-logarithm closed
//!   form `M^-1 [I + (M^-1 - I) log(I - M)] o0`.
//!
//! The closed form is only valid when `log(I - M)` and `M^-1` exist. A
//! stochastic transition matrix has spectral radius 1 (so `log(I - H)` is
//! undefined) and can be singular, so the closed form is restricted to
//! invertible sub-stochastic matrices with spectral radius at most
//! [`dense_verify::RHO_GUARD`]. Production TotalRank on real graphs goes
//! through the series or quadrature routes.

pub mod dense_verify;
pub mod error;
pub mod graph_io;
pub mod metrics;
pub mod pagerank;
pub mod quadrature;
pub mod random;
pub mod totalrank;

pub use dense_verify::DenseMatrix;
pub use error::{Error, Result};
pub use graph_io::{parse_edge_list, Edge, GraphEdges, StochasticVector, TransitionMatrix};
pub use metrics::{kendall_tau, RankComparison};
pub use pagerank::{DampingFactor, Method, RankResult};
pub use quadrature::{InnerMethod, QuadratureConfig};
pub use totalrank::SeriesConfig;

/// L1 norm of a slice.
pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// L1 distance between two equal-length slices.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
