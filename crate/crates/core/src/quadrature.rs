//! TotalRank as the integral of the PageRank vector over the damping
//! factor, evaluated with a graded composite Gauss-Legendre rule.
//!
//! The integrand `(1 - alpha)(I - alpha H)^-1 o0` is bounded on `[0, 1]`
//! but loses smoothness near `alpha = 1` when `H` has eigenvalues close
//! to 1, so panels shrink geometrically toward that end.

use std::f64::consts::PI;

use crate::dense_verify::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph_io::{StochasticVector, TransitionMatrix};
use crate::l1_distance;
use crate::pagerank::{
    iterate_from, DampingFactor, DenseResolvent, Method, RankResult,
};

pub const MAX_GAUSS_POINTS: usize = 64;

/// Graphs up to this size use the dense inner solver under
/// [`InnerMethod::Auto`].
pub const DENSE_AUTO_LIMIT: usize = 256;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    PowerIteration,
    DenseSolve,
    /// Dense solve when `n <= DENSE_AUTO_LIMIT`, power iteration otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes_per_panel: usize,
    pub panels: usize,
    /// Ratio between consecutive panel widths, > 1.
    pub grading: f64,
    /// Tolerance of every PageRank solve at a quadrature node.
    pub inner_tol: f64,
    pub inner_method: InnerMethod,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_panel: 16,
            panels: 8,
            grading: 2.0,
            inner_tol: 1e-12,
            inner_method: InnerMethod::Auto,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel == 0 || self.nodes_per_panel > MAX_GAUSS_POINTS {
            return Err(Error::InvalidParameter(format!(
                "nodes_per_panel must be in 1..={MAX_GAUSS_POINTS}, got {}",
                self.nodes_per_panel
            )));
        }
        if self.panels == 0 {
            return Err(Error::InvalidParameter("panels must be >= 1".into()));
        }
        if !self.grading.is_finite() || self.grading <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "grading must be a finite value > 1, got {}",
                self.grading
            )));
        }
        if self.inner_tol.is_nan() || self.inner_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inner_tol must be positive, got {}",
                self.inner_tol
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes (ascending, in `(-1, 1)`) and weights for `k`
/// points. Nodes are Newton-polished roots of `P_k` started from
/// Chebyshev-like guesses.
pub fn gauss_legendre(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 || k > MAX_GAUSS_POINTS {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Legendre order must be in 1..={MAX_GAUSS_POINTS}, got {k}"
        )));
    }
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let half = k.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre(k, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k - 1 - i] = x;
        nodes[i] = -x;
        weights[k - 1 - i] = w;
        weights[i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_k(x), P_k'(x))` by the three-term recurrence.
fn legendre(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if k == 0 { 1.0 } else { p1 };
    let dp = k as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Panel breakpoints `b_j = (1 - g^-j) / (1 - g^-P)`, `j = 0..=P`.
pub fn panel_breakpoints(panels: usize, grading: f64) -> Vec<f64> {
    let last = 1.0 - grading.powi(-(panels as i32));
    let mut b: Vec<f64> = (0..=panels)
        .map(|j| (1.0 - grading.powi(-(j as i32))) / last)
        .collect();
    b[panels] = 1.0;
    b
}

/// Composite rule on `(0, 1)`: `(alpha, weight)` pairs ordered by panel
/// then node. Each graded panel is cut into `split` equal sub-panels.
/// Every `alpha` lies strictly inside `(0, 1)`.
pub fn composite_rule(cfg: &QuadratureConfig, split: usize) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    if split == 0 {
        return Err(Error::InvalidParameter("split must be >= 1".into()));
    }
    let (x, w) = gauss_legendre(cfg.nodes_per_panel)?;
    let b = panel_breakpoints(cfg.panels, cfg.grading);
    let mut rule = Vec::with_capacity(cfg.panels * split * cfg.nodes_per_panel);
    for p in b.windows(2) {
        let width = (p[1] - p[0]) / split as f64;
        for s in 0..split {
            let lo = p[0] + s as f64 * width;
            let hi = if s + 1 == split { p[1] } else { lo + width };
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                rule.push((mid + half * xi, half * wi));
            }
        }
    }
    Ok(rule)
}

/// Rounding noise in a power-iteration step grows like `eps / (1 - alpha)`.
/// A sparse inner solve stops once its step is below this many units of
/// that noise level, even if the certified threshold
/// `inner_tol (1 - alpha) / alpha` is smaller; the node's bound is then
/// reported as it is.
const INNER_STEP_FLOOR_ULPS: f64 = 64.0;

#[derive(Debug)]
struct NodeValue {
    vector: Vec<f64>,
    /// L1 bound on the distance to the exact PageRank vector.
    bound: f64,
}

enum Integrand<'a> {
    Sparse {
        h: &'a TransitionMatrix,
        o0: &'a StochasticVector,
        tol: f64,
    },
    Dense(DenseResolvent<'a>),
}

impl Integrand<'_> {
    /// PageRank at `alpha`. The sparse route warm-starts from `start`.
    fn eval(&self, alpha: f64, start: Option<&[f64]>) -> Result<NodeValue> {
        let wrap = |e: Error| Error::InnerSolve {
            alpha,
            source: Box::new(e),
        };
        let a = DampingFactor::new(alpha).map_err(wrap)?;
        match self {
            Integrand::Sparse { h, o0, tol } => {
                let floor = INNER_STEP_FLOOR_ULPS * f64::EPSILON / (1.0 - alpha);
                let threshold = (tol * (1.0 - alpha) / alpha).max(floor);
                // from any stochastic start the step after t iterations is at
                // most 2 alpha^(t-1); doubled for rounding noise near the floor
                let max_iter = 2 * ((threshold / 2.0).ln() / alpha.ln()).ceil() as usize + 100;
                let start = start.map_or_else(|| o0.as_slice().to_vec(), <[f64]>::to_vec);
                let run = iterate_from(h, o0, a, start, threshold, max_iter);
                if run.last_step > threshold {
                    return Err(wrap(Error::Domain(format!(
                        "power iteration stalled at step {:e} after {} iterations",
                        run.last_step, run.iterations
                    ))));
                }
                Ok(NodeValue {
                    bound: alpha / (1.0 - alpha) * run.last_step,
                    vector: run.vector,
                })
            }
            Integrand::Dense(solver) => {
                let r = solver.solve(a).map_err(wrap)?;
                // |(I - aH)^-1|_1 <= 1/(1 - a) for column-stochastic H
                Ok(NodeValue {
                    bound: r.error_bound / (1.0 - alpha),
                    vector: r.vector,
                })
            }
        }
    }
}

struct Integral {
    vector: Vec<f64>,
    /// `sum_i w_i max(inner_tol, node bound_i)`
    inner_error: f64,
}

fn integrate(
    integrand: &Integrand,
    rule: &[(f64, f64)],
    n: usize,
    inner_tol: f64,
) -> Result<Integral> {
    let mut acc = vec![0.0; n];
    let mut inner_error = 0.0;
    let mut previous: Option<Vec<f64>> = None;
    for &(alpha, w) in rule {
        let node = integrand.eval(alpha, previous.as_deref())?;
        for (s, x) in acc.iter_mut().zip(&node.vector) {
            *s += w * x;
        }
        inner_error += w * node.bound.max(inner_tol);
        previous = Some(node.vector);
    }
    Ok(Integral {
        vector: acc,
        inner_error,
    })
}

/// Integrates `(1 - alpha)(I - alpha H)^-1 o0` over `alpha` in `(0, 1)`.
///
/// The returned vector uses the refined rule in which every graded panel
/// is bisected. `error_bound` is the L1 difference between the refined and
/// the unrefined rule plus the weighted inner-solve error; it is an
/// estimate, not a certificate.
pub fn marginalize_pagerank(
    h: &TransitionMatrix,
    o0: &StochasticVector,
    cfg: &QuadratureConfig,
) -> Result<RankResult> {
    cfg.validate()?;
    let n = h.n();
    if n != o0.len() {
        return Err(Error::dims(n, o0.len()));
    }
    let dense_storage: DenseMatrix;
    let use_dense = match cfg.inner_method {
        InnerMethod::DenseSolve => true,
        InnerMethod::PowerIteration => false,
        InnerMethod::Auto => n <= DENSE_AUTO_LIMIT,
    };
    let integrand = if use_dense {
        dense_storage = h.to_dense();
        Integrand::Dense(DenseResolvent::new(&dense_storage, o0)?)
    } else {
        Integrand::Sparse {
            h,
            o0,
            tol: cfg.inner_tol,
        }
    };

    let coarse_rule = composite_rule(cfg, 1)?;
    let fine_rule = composite_rule(cfg, 2)?;
    let coarse = integrate(&integrand, &coarse_rule, n, cfg.inner_tol)?;
    let fine = integrate(&integrand, &fine_rule, n, cfg.inner_tol)?;

    Ok(RankResult {
        error_bound: l1_distance(&fine.vector, &coarse.vector) + fine.inner_error,
        vector: fine.vector,
        method: Method::Quadrature,
        iterations_or_terms: coarse_rule.len() + fine_rule.len(),
        renormalized: false,
        converged: true,
    })
}
