//! Dense verification of the algebra behind TotalRank on small matrices.
//!
//! Everything here works on a [`DenseMatrix`] `M` that is invertible with
//! estimated spectral radius at most [`RHO_GUARD`]. On that domain the
//! Neumann series, the Mercator series for `log(I - M)` and the closed
//! form `M^-1 [I + (M^-1 - I) log(I - M)]` are all well defined and can be
//! checked against brute-force power sums.
//!
//! A genuinely stochastic transition matrix is outside this domain: its
//! spectral radius is 1, so `log(I - H)` does not exist, and it may be
//! singular (any graph with two identical columns, e.g. a dangling-repaired
//! star). TotalRank for such matrices comes from the series or quadrature
//! routes instead.

mod identities;
mod matrix;
pub mod suite;

pub use identities::{
    closed_form_totalrank, mercator_log, neumann_residual, shifted_series_lhs,
    spectral_radius_estimate, RHO_GUARD, SPECTRAL_ITERS,
};
pub use matrix::{dense_inverse, DenseMatrix, Inverse, PIVOT_REL_TOL};
