//! Damped PageRank: the fixed point of `o <- alpha H o + (1 - alpha) o0`.
//!
//! Three routes are provided. [`power_iteration`] runs the recursion with
//! a certified stopping rule, [`unrolled_form`] evaluates the recursion's
//! closed-form expansion after `t` steps, and [`dense_solve`] solves
//! `(I - alpha H) x = (1 - alpha) o0` directly.

use serde::Serialize;

use crate::dense_verify::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph_io::{StochasticVector, TransitionMatrix};
use crate::l1_distance;

/// Damping factors within this distance of 0 or 1 are rejected.
pub const ALPHA_MARGIN: f64 = 1e-12;

/// Damping factor, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DampingFactor(f64);

impl DampingFactor {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > ALPHA_MARGIN && alpha < 1.0 - ALPHA_MARGIN) {
            return Err(Error::InvalidParameter(format!(
                "damping factor must lie strictly inside (0, 1), got {alpha}"
            )));
        }
        Ok(DampingFactor(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PowerIteration,
    Unrolled,
    DenseSolve,
    Series,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PowerIteration => "power_iteration",
            Method::Unrolled => "unrolled",
            Method::DenseSolve => "dense_solve",
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// A rank vector together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankResult {
    pub vector: Vec<f64>,
    pub method: Method,
    /// Iterations, series terms or integrand evaluations, depending on
    /// `method`.
    pub iterations_or_terms: usize,
    /// L1 error bound. Certified for power iteration and the series;
    /// a residual for the dense solve; heuristic for quadrature and the
    /// closed form.
    pub error_bound: f64,
    pub renormalized: bool,
    /// False when an iteration or term cap was hit before the requested
    /// tolerance was certified. `vector` then holds the best iterate and
    /// `error_bound` its (larger) bound.
    pub converged: bool,
}

/// A-priori iteration count for the certified stopping rule plus slack:
/// `ceil(ln(tol (1 - alpha)) / ln(alpha)) + 10`.
pub fn default_max_iter(alpha: DampingFactor, tol: f64) -> usize {
    let a = alpha.value();
    let k = ((tol * (1.0 - a)).ln() / a.ln()).ceil();
    if k.is_finite() && k > 0.0 {
        k as usize + 10
    } else {
        10
    }
}

/// One step of the recursion: `alpha H x + (1 - alpha) o0`.
pub fn recursion_step(
    h: &TransitionMatrix,
    o0: &StochasticVector,
    alpha: DampingFactor,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_dims(h, o0)?;
    let mut out = h.matvec(x)?;
    let a = alpha.value();
    for (y, p) in out.iter_mut().zip(o0.as_slice()) {
        *y = a * *y + (1.0 - a) * p;
    }
    Ok(out)
}

/// Iterator over the recursion `o_1, o_2, ...` starting from `o_0 = o0`.
pub struct Iterates<'a> {
    h: &'a TransitionMatrix,
    o0: &'a [f64],
    alpha: f64,
    current: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Iterates<'a> {
    pub fn new(
        h: &'a TransitionMatrix,
        o0: &'a StochasticVector,
        alpha: DampingFactor,
    ) -> Result<Self> {
        check_dims(h, o0)?;
        Ok(Iterates {
            h,
            o0: o0.as_slice(),
            alpha: alpha.value(),
            current: o0.as_slice().to_vec(),
            scratch: vec![0.0; h.n()],
        })
    }
}

impl Iterator for Iterates<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.h.matvec_into(&self.current, &mut self.scratch);
        let a = self.alpha;
        for ((y, hx), p) in self.current.iter_mut().zip(&self.scratch).zip(self.o0) {
            *y = a * hx + (1.0 - a) * p;
        }
        Some(self.current.clone())
    }
}

/// Runs the recursion from `o0` until `|o_{t+1} - o_t|_1 <= tol (1 - alpha) / alpha`,
/// which certifies `|o_{t+1} - o_inf|_1 <= tol`.
///
/// If `max_iter` steps pass without certification the last iterate is
/// returned with `converged = false` and bound `alpha / (1 - alpha)` times
/// the last step.
pub fn power_iteration(
    h: &TransitionMatrix,
    o0: &StochasticVector,
    alpha: DampingFactor,
    tol: f64,
    max_iter: usize,
) -> Result<RankResult> {
    check_dims(h, o0)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let a = alpha.value();
    let threshold = tol * (1.0 - a) / a;
    let run = iterate_from(h, o0, alpha, o0.as_slice().to_vec(), threshold, max_iter);
    Ok(RankResult {
        error_bound: a / (1.0 - a) * run.last_step,
        vector: run.vector,
        method: Method::PowerIteration,
        iterations_or_terms: run.iterations,
        renormalized: false,
        converged: run.last_step <= threshold,
    })
}

pub(crate) struct IterationRun {
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub last_step: f64,
}

/// Runs the recursion from `start` until the L1 step drops to
/// `step_threshold` or `max_iter` steps were taken. Dimensions must
/// already be checked.
pub(crate) fn iterate_from(
    h: &TransitionMatrix,
    o0: &StochasticVector,
    alpha: DampingFactor,
    start: Vec<f64>,
    step_threshold: f64,
    max_iter: usize,
) -> IterationRun {
    let a = alpha.value();
    let mut x = start;
    let mut next = vec![0.0; h.n()];
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        h.matvec_into(&x, &mut next);
        for (y, p) in next.iter_mut().zip(o0.as_slice()) {
            *y = a * *y + (1.0 - a) * p;
        }
        step = l1_distance(&next, &x);
        std::mem::swap(&mut x, &mut next);
        iterations += 1;
        if step <= step_threshold {
            break;
        }
    }
    IterationRun {
        vector: x,
        iterations,
        last_step: step,
    }
}

/// `(alpha H)^t o0 + (1 - alpha) sum_{i<t} (alpha H)^i o0`, using `t`
/// matrix-vector products. Test oracle for the recursion.
pub fn unrolled_form(
    h: &TransitionMatrix,
    o0: &StochasticVector,
    alpha: DampingFactor,
    t: usize,
) -> Result<Vec<f64>> {
    check_dims(h, o0)?;
    let a = alpha.value();
    let mut power = o0.as_slice().to_vec();
    let mut acc = vec![0.0; h.n()];
    let mut scratch = vec![0.0; h.n()];
    for _ in 0..t {
        for (s, p) in acc.iter_mut().zip(&power) {
            *s += p;
        }
        h.matvec_into(&power, &mut scratch);
        for (p, hp) in power.iter_mut().zip(&scratch) {
            *p = a * hp;
        }
    }
    Ok(power
        .iter()
        .zip(&acc)
        .map(|(p, s)| p + (1.0 - a) * s)
        .collect())
}

/// Solves `(I - alpha H) x = (1 - alpha) o0` by pivoted Gaussian
/// elimination. `error_bound` is the L1 residual of the solve.
pub fn dense_solve(
    h: &DenseMatrix,
    o0: &StochasticVector,
    alpha: DampingFactor,
) -> Result<RankResult> {
    let solver = DenseResolvent::new(h, o0)?;
    solver.solve(alpha)
}

/// Dense `(1 - alpha)(I - alpha H)^-1 o0` for repeated values of `alpha`.
pub(crate) struct DenseResolvent<'a> {
    h: &'a DenseMatrix,
    o0: &'a StochasticVector,
}

impl<'a> DenseResolvent<'a> {
    pub(crate) fn new(h: &'a DenseMatrix, o0: &'a StochasticVector) -> Result<Self> {
        if h.n() != o0.len() {
            return Err(Error::dims(h.n(), o0.len()));
        }
        Ok(DenseResolvent { h, o0 })
    }

    pub(crate) fn solve(&self, alpha: DampingFactor) -> Result<RankResult> {
        let a = alpha.value();
        let system = self.h.scale(a).identity_minus();
        let rhs: Vec<f64> = self.o0.as_slice().iter().map(|p| (1.0 - a) * p).collect();
        let x = system.solve(&rhs)?;
        let residual = l1_distance(&system.mul_vec(&x)?, &rhs);
        Ok(RankResult {
            vector: x,
            method: Method::DenseSolve,
            iterations_or_terms: 1,
            error_bound: residual,
            renormalized: false,
            converged: true,
        })
    }
}

fn check_dims(h: &TransitionMatrix, o0: &StochasticVector) -> Result<()> {
    if h.n() != o0.len() {
        return Err(Error::dims(h.n(), o0.len()));
    }
    Ok(())
}
