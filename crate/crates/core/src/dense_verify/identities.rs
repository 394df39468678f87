use crate::error::{Error, Result};
use crate::pagerank::{DampingFactor, Method, RankResult};

use super::matrix::DenseMatrix;

/// Largest estimated spectral radius accepted by the log-based routines.
/// Keeps the Mercator series under ~300 terms at `tol = 1e-10`.
pub const RHO_GUARD: f64 = 0.9;

/// Power-iteration steps used when a routine checks [`RHO_GUARD`].
pub const SPECTRAL_ITERS: usize = 500;

const STOCHASTIC_CHECK_TOL: f64 = 1e-10;

/// Estimates `rho(M)` by power iteration on `|M|` from the uniform vector,
/// returning the last L1 growth ratio. `rho(|M|) >= rho(M)`, so this leans
/// high; it is an estimate, not a certificate.
pub fn spectral_radius_estimate(m: &DenseMatrix, iters: usize) -> f64 {
    let n = m.n();
    let a = m.abs();
    let mut v = vec![1.0 / n as f64; n];
    let mut ratio = 0.0;
    for _ in 0..iters.max(1) {
        let w = a.mul_vec(&v).expect("square");
        let s: f64 = w.iter().sum();
        if s == 0.0 {
            return 0.0;
        }
        ratio = s;
        v = w.into_iter().map(|x| x / s).collect();
    }
    ratio
}

fn guard(m: &DenseMatrix) -> Result<f64> {
    let r = spectral_radius_estimate(m, SPECTRAL_ITERS);
    if r > RHO_GUARD {
        return Err(Error::Domain(format!(
            "estimated spectral radius {r:.6} exceeds {RHO_GUARD}; log(I - M) is \
             only defined as a convergent series when rho(M) < 1"
        )));
    }
    Ok(r)
}

/// `max|(I - alpha M) sum_{i<=K} (alpha M)^i - I|`. The product telescopes
/// to `-(alpha M)^{K+1}`, so for column-stochastic `M` the result is at most
/// `alpha^{K+1}`.
pub fn neumann_residual(m: &DenseMatrix, alpha: DampingFactor, k: usize) -> Result<f64> {
    let n = m.n();
    if m.as_slice().iter().any(|&x| x < 0.0) {
        return Err(Error::Domain("matrix has negative entries".into()));
    }
    if let Some((j, s)) = m
        .column_sums()
        .into_iter()
        .enumerate()
        .find(|(_, s)| (s - 1.0).abs() > STOCHASTIC_CHECK_TOL)
    {
        return Err(Error::Domain(format!("column {j} sums to {s}, not 1")));
    }
    let am = m.scale(alpha.value());
    let mut power = DenseMatrix::identity(n);
    let mut sum = DenseMatrix::identity(n);
    for _ in 0..k {
        power = power.mul(&am);
        sum = sum.add(&power);
    }
    Ok(am
        .identity_minus()
        .mul(&sum)
        .sub(&DenseMatrix::identity(n))
        .max_norm())
}

/// `log(I - M) = -sum_{t>=1} M^t / t`, truncated once the tail bound
/// `r^{K+1} / ((K+1)(1 - r))` is at most `tol`, with `r` the spectral
/// radius estimate.
pub fn mercator_log(m: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    mercator_series(m, tol).map(|(l, _)| l)
}

pub(crate) fn mercator_series(m: &DenseMatrix, tol: f64) -> Result<(DenseMatrix, usize)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let r = guard(m)?.min(RHO_GUARD);
    let terms = if r == 0.0 {
        // nilpotent: M^n = 0 and the series is a finite sum
        m.n()
    } else {
        let mut k = 1usize;
        while r.powi(k as i32 + 1) / ((k as f64 + 1.0) * (1.0 - r)) > tol {
            k += 1;
        }
        k
    };
    let mut power = DenseMatrix::identity(m.n());
    let mut acc = DenseMatrix::zeros(m.n());
    for t in 1..=terms {
        power = power.mul(m);
        acc = acc.sub(&power.scale(1.0 / t as f64));
    }
    Ok((acc, terms))
}

/// `M^-1 [I + (M^-1 - I) log(I - M)] o0`, the damping-averaged PageRank
/// in closed form. Only valid for invertible `M` inside [`RHO_GUARD`].
pub fn closed_form_totalrank(m: &DenseMatrix, o0: &[f64], tol: f64) -> Result<RankResult> {
    let n = m.n();
    if o0.len() != n {
        return Err(Error::dims(n, o0.len()));
    }
    let (log, terms) = mercator_series(m, tol)?;
    let inv = m.inverse()?;
    let identity = DenseMatrix::identity(n);
    let inv_minus_i = inv.matrix.sub(&identity);
    let bracket = identity.add(&inv_minus_i.mul(&log));
    let vector = inv.matrix.mul_vec(&bracket.mul_vec(o0)?)?;

    // first-order propagation of the log truncation and inverse residual
    let o0_norm = crate::l1_norm(o0);
    let inv_norm = inv.matrix.norm_1();
    let error_bound = o0_norm
        * (inv_norm * inv_minus_i.norm_1() * tol
            + n as f64 * inv.residual * inv_norm * (1.0 + inv_minus_i.norm_1() * log.norm_1()));

    Ok(RankResult {
        vector,
        method: Method::ClosedForm,
        iterations_or_terms: terms,
        error_bound,
        renormalized: false,
        converged: true,
    })
}

/// Brute-force `sum_{t=0}^{T} M^t / (t + shift)` for `shift` in `{1, 2}`.
///
/// With `shift = 1` this converges to `-M^-1 log(I - M)`; with `shift = 2`
/// to `-M^-2 log(I - M) - M^-1`.
pub fn shifted_series_lhs(m: &DenseMatrix, shift: u32, terms: usize) -> Result<DenseMatrix> {
    if !(shift == 1 || shift == 2) {
        return Err(Error::InvalidParameter(format!("shift must be 1 or 2, got {shift}")));
    }
    guard(m)?;
    let n = m.n();
    let mut power = DenseMatrix::identity(n);
    let mut acc = power.scale(1.0 / shift as f64);
    for t in 1..=terms {
        power = power.mul(m);
        acc = acc.add(&power.scale(1.0 / (t as f64 + shift as f64)));
    }
    Ok(acc)
}
