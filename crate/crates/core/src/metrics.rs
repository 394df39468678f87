//! Ranking-level comparison of score vectors.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// Kendall tau-b between the rankings induced by `a` and `b`.
///
/// Uses Knight's `O(n log n)` algorithm. The concordance and tie counts are
/// integers, so the result is identical to the naive pairwise definition.
/// Fails for length mismatch, `n < 2`, non-finite input, or when either
/// vector is constant (tau-b is undefined there).
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::dims(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "kendall tau needs at least 2 entries, got {n}"
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite score".into()));
    }
    let cmp = |x: f64, y: f64| x.partial_cmp(&y).expect("finite");

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| cmp(a[i], a[j]).then(cmp(b[i], b[j])));

    let pairs = |t: u64| t * (t.saturating_sub(1)) / 2;
    let total = pairs(n as u64);

    let mut ties_a = 0u64;
    let mut ties_joint = 0u64;
    let mut run_a = 1u64;
    let mut run_joint = 1u64;
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        if a[i] == a[j] {
            run_a += 1;
            if b[i] == b[j] {
                run_joint += 1;
            } else {
                ties_joint += pairs(run_joint);
                run_joint = 1;
            }
        } else {
            ties_a += pairs(run_a);
            ties_joint += pairs(run_joint);
            run_a = 1;
            run_joint = 1;
        }
    }
    ties_a += pairs(run_a);
    ties_joint += pairs(run_joint);

    let mut seq: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut seq, &mut buf);

    let mut ties_b = 0u64;
    let mut run_b = 1u64;
    for w in seq.windows(2) {
        if w[0] == w[1] {
            run_b += 1;
        } else {
            ties_b += pairs(run_b);
            run_b = 1;
        }
    }
    ties_b += pairs(run_b);

    if total == ties_a || total == ties_b {
        return Err(Error::Undefined(
            "kendall tau-b is undefined for a constant score vector".into(),
        ));
    }
    let s = total as i64 - ties_a as i64 - ties_b as i64 + ties_joint as i64 - 2 * swaps as i64;
    Ok(s as f64 / ((total - ties_a) as f64 * (total - ties_b) as f64).sqrt())
}

/// Sorts `v` ascending, returning the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]);
    swaps += merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Node indices by descending score, ascending index on ties.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| {
        scores[j]
            .partial_cmp(&scores[i])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    idx
}

/// Size of the intersection of the two top-`k` sets.
pub fn top_k_overlap(a: &[f64], b: &[f64], k: usize) -> usize {
    let ra = ranking(a);
    let rb = ranking(b);
    let k = k.min(ra.len()).min(rb.len());
    let mut in_a = vec![false; a.len()];
    for &i in &ra[..k] {
        in_a[i] = true;
    }
    rb[..k].iter().filter(|&&i| in_a[i]).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankComparison {
    pub methods: (String, String),
    /// `None` when tau-b is undefined (constant scores or a single node).
    pub kendall_tau: Option<f64>,
    pub l1_distance: f64,
    pub top_k: usize,
    pub top_k_overlap: usize,
}

impl RankComparison {
    pub fn new(
        methods: (String, String),
        a: &[f64],
        b: &[f64],
        top_k: usize,
    ) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::dims(a.len(), b.len()));
        }
        let kendall_tau = match kendall_tau(a, b) {
            Ok(t) => Some(t),
            Err(Error::Undefined(_)) => None,
            Err(Error::InvalidParameter(_)) if a.len() < 2 => None,
            Err(e) => return Err(e),
        };
        let top_k = top_k.min(a.len());
        Ok(RankComparison {
            methods,
            kendall_tau,
            l1_distance: crate::l1_distance(a, b),
            top_k,
            top_k_overlap: top_k_overlap(a, b, top_k),
        })
    }
}
