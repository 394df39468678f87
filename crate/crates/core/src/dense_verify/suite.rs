//! Randomized identity suite behind the `verify` subcommand.
//!
//! Every check compares a routine from this module against an oracle that
//! only uses repeated matrix products (no logarithms or eigensolvers).

use serde::Serialize;

use crate::error::Result;
use crate::l1_distance;
use crate::pagerank::DampingFactor;
use crate::random::{
    random_guarded_matrix, random_stochastic_dense, random_stochastic_vector, seeded,
};
use crate::totalrank::coefficient;

use super::identities::{closed_form_totalrank, mercator_log, neumann_residual, shifted_series_lhs};
use super::matrix::DenseMatrix;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Log tolerance used inside the identity checks.
pub const LOG_TOL: f64 = 1e-14;
/// Mercator tolerance for the exponential round trip.
pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const SHIFTED_TERMS: usize = 500;
pub const SHIFTED_THRESHOLD: f64 = 1e-8;
pub const BRUTE_FORCE_TERMS: u64 = 2_000;
pub const CLOSED_FORM_THRESHOLD: f64 = 1e-6;
pub const SCALAR_THRESHOLD: f64 = 1e-10;
pub const SCALAR_BETAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.89];
/// Spectral radius cap for the random invertible matrices.
pub const MATRIX_RHO: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 8,
            trials: 10,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub threshold: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    /// Largest `residual / threshold` over all cases.
    pub worst_ratio: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &'static str, threshold: &'static str) -> Self {
        IdentityCheck {
            name,
            threshold,
            cases: 0,
            max_residual: 0.0,
            worst_ratio: 0.0,
            passed: true,
        }
    }

    fn record(&mut self, residual: f64, threshold: f64) {
        self.cases += 1;
        self.max_residual = self.max_residual.max(residual);
        let ratio = residual / threshold;
        self.worst_ratio = self.worst_ratio.max(ratio);
        // NaN residuals fail
        if residual.is_nan() || residual > threshold {
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub identities: Vec<IdentityCheck>,
    pub passed: bool,
}

/// `exp(A)` by its Taylor series, summed until terms stop contributing.
pub fn exp_taylor(a: &DenseMatrix) -> DenseMatrix {
    let n = a.n();
    let mut term = DenseMatrix::identity(n);
    let mut sum = DenseMatrix::identity(n);
    for k in 1..200 {
        term = term.mul(a).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.max_norm() <= 1e-18 * sum.max_norm() {
            break;
        }
    }
    sum
}

/// `sum_{t=0}^{T} c_t M^t o0` with `c_t = 1/((t+1)(t+2))`.
pub fn brute_force_totalrank(m: &DenseMatrix, o0: &[f64], terms: u64) -> Result<Vec<f64>> {
    let mut power = o0.to_vec();
    let mut acc = vec![0.0; o0.len()];
    for t in 0..=terms {
        let c = coefficient(t);
        for (s, p) in acc.iter_mut().zip(&power) {
            *s += c * p;
        }
        power = m.mul_vec(&power)?;
    }
    Ok(acc)
}

/// `max|S_1 + M^-1 log(I - M)|` with `S_1 = sum_{t<=T} M^t/(t+1)`.
pub fn shift_one_residual(m: &DenseMatrix, terms: usize, log_tol: f64) -> Result<f64> {
    let s = shifted_series_lhs(m, 1, terms)?;
    let log = mercator_log(m, log_tol)?;
    let inv = m.inverse()?.matrix;
    Ok(s.add(&inv.mul(&log)).max_norm())
}

/// `max|S_2 + M^-2 log(I - M) + M^-1|` with `S_2 = sum_{t<=T} M^t/(t+2)`.
pub fn shift_two_residual(m: &DenseMatrix, terms: usize, log_tol: f64) -> Result<f64> {
    let s = shifted_series_lhs(m, 2, terms)?;
    let log = mercator_log(m, log_tol)?;
    let inv = m.inverse()?.matrix;
    Ok(s.add(&inv.mul(&inv).mul(&log)).add(&inv).max_norm())
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let n = cfg.n.max(1);
    let mut rng = seeded(cfg.seed);

    let mut neumann = IdentityCheck::new("neumann_geometric_limit", "alpha^(K+1) + 1e-12");
    let mut round_trip = IdentityCheck::new("mercator_log_exp_round_trip", "10 * 1e-12");
    let mut shift_one = IdentityCheck::new("shifted_series_t_plus_1", "1e-8");
    let mut shift_two = IdentityCheck::new("shifted_series_t_plus_2", "1e-8");
    let mut closed = IdentityCheck::new("closed_form_vs_series", "1e-6 (L1)");
    let mut scalar = IdentityCheck::new("closed_form_scalar_reduction", "1e-10");

    for _ in 0..cfg.trials {
        let h = random_stochastic_dense(&mut rng, n);
        for alpha in [0.5, 0.9] {
            for k in [10usize, 50, 100] {
                let r = neumann_residual(&h, DampingFactor::new(alpha)?, k)?;
                neumann.record(r, alpha.powi(k as i32 + 1) + 1e-12);
            }
        }

        let m = random_guarded_matrix(&mut rng, n, MATRIX_RHO);
        let log = mercator_log(&m, ROUND_TRIP_TOL)?;
        let back = exp_taylor(&log);
        round_trip.record(back.sub(&m.identity_minus()).max_norm(), 10.0 * ROUND_TRIP_TOL);

        shift_one.record(shift_one_residual(&m, SHIFTED_TERMS, LOG_TOL)?, SHIFTED_THRESHOLD);
        shift_two.record(shift_two_residual(&m, SHIFTED_TERMS, LOG_TOL)?, SHIFTED_THRESHOLD);

        let o0 = random_stochastic_vector(&mut rng, n);
        let cf = closed_form_totalrank(&m, o0.as_slice(), LOG_TOL)?;
        let bf = brute_force_totalrank(&m, o0.as_slice(), BRUTE_FORCE_TERMS)?;
        closed.record(l1_distance(&cf.vector, &bf), CLOSED_FORM_THRESHOLD);
    }

    let o0 = random_stochastic_vector(&mut rng, n);
    for beta in SCALAR_BETAS {
        let m = DenseMatrix::identity(n).scale(beta);
        let s = ((1.0 - beta) * (1.0 - beta).ln() + beta) / (beta * beta);
        let cf = closed_form_totalrank(&m, o0.as_slice(), LOG_TOL)?;
        let err = cf
            .vector
            .iter()
            .zip(o0.as_slice())
            .map(|(x, p)| (x - s * p).abs())
            .fold(0.0, f64::max);
        scalar.record(err, SCALAR_THRESHOLD);
    }

    let identities = vec![neumann, round_trip, shift_one, shift_two, closed, scalar];
    let passed = identities.iter().all(|c| c.passed);
    Ok(SuiteReport {
        n,
        trials: cfg.trials,
        seed: cfg.seed,
        identities,
        passed,
    })
}
