//! Edge-list ingestion and the sparse column-stochastic transition matrix.
//!
//! Convention: `H[i][j]` is the probability of moving from node `j` to node
//! `i`, so columns sum to one and `H * o` maps stochastic vectors to
//! stochastic vectors.

use std::num::IntErrorKind;

use crate::dense_verify::DenseMatrix;
use crate::error::{Error, Result};

/// Largest accepted node count. Indices at or above this are rejected as
/// overflow rather than allocating a huge matrix.
pub const MAX_NODE_COUNT: usize = u32::MAX as usize;

/// Tolerance on the unit mass of a [`StochasticVector`] and on every
/// column sum of a [`TransitionMatrix`].
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// A directed weighted edge list over dense 0-based node indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphEdges {
    node_count: usize,
    edges: Vec<Edge>,
}

impl GraphEdges {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if node_count > MAX_NODE_COUNT {
            return Err(Error::InvalidParameter(format!(
                "node count {node_count} exceeds {MAX_NODE_COUNT}"
            )));
        }
        for (k, e) in edges.iter().enumerate() {
            if e.src >= node_count || e.dst >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge {k} ({} -> {}) out of range for {node_count} nodes",
                    e.src, e.dst
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge {k} has invalid weight {}",
                    e.weight
                )));
            }
        }
        if !edges.is_empty() && edges.iter().all(|e| e.weight == 0.0) {
            return Err(Error::InvalidParameter(
                "all edge weights are zero".to_string(),
            ));
        }
        Ok(GraphEdges { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Total outgoing weight per node.
    pub fn out_weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.node_count];
        for e in &self.edges {
            out[e.src] += e.weight;
        }
        out
    }
}

/// Parses the whitespace-separated `src dst [weight]` edge-list format.
///
/// `#` starts a comment, blank lines are skipped and CRLF line endings are
/// accepted. An optional `%nodes N` line raises the node count to `N` when
/// that is larger than one plus the maximum index seen.
pub fn parse_edge_list(text: &str) -> Result<GraphEdges> {
    let mut edges = Vec::new();
    let mut max_index: Option<usize> = None;
    let mut header_nodes: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }

        if tokens[0].starts_with('%') {
            if tokens[0] != "%nodes" || tokens.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("unrecognized header `{}`", content.trim()),
                });
            }
            let n = parse_index(tokens[1], line)?;
            if n > MAX_NODE_COUNT {
                return Err(Error::Validation {
                    line,
                    message: format!("node count {n} exceeds {MAX_NODE_COUNT}"),
                });
            }
            header_nodes = Some(header_nodes.map_or(n, |h: usize| h.max(n)));
            continue;
        }

        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `src dst [weight]`, got {} tokens", tokens.len()),
            });
        }
        let src = parse_node(tokens[0], line)?;
        let dst = parse_node(tokens[1], line)?;
        let weight = match tokens.get(2) {
            Some(tok) => parse_weight(tok, line)?,
            None => 1.0,
        };
        max_index = Some(max_index.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push(Edge { src, dst, weight });
    }

    let seen = max_index.map_or(0, |m| m + 1);
    let node_count = header_nodes.map_or(seen, |h| h.max(seen));
    if !edges.is_empty() && edges.iter().all(|e| e.weight == 0.0) {
        return Err(Error::Validation {
            line: text.lines().count(),
            message: "all edge weights are zero".to_string(),
        });
    }
    Ok(GraphEdges { node_count, edges })
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|e| match e.kind() {
        IntErrorKind::PosOverflow => Error::Validation {
            line,
            message: format!("index `{tok}` overflows"),
        },
        _ => Error::Parse {
            line,
            message: format!("malformed integer `{tok}`"),
        },
    })
}

fn parse_node(tok: &str, line: usize) -> Result<usize> {
    let idx = parse_index(tok, line)?;
    if idx >= MAX_NODE_COUNT {
        return Err(Error::Validation {
            line,
            message: format!("node index {idx} exceeds the limit of {MAX_NODE_COUNT} nodes"),
        });
    }
    Ok(idx)
}

fn parse_weight(tok: &str, line: usize) -> Result<f64> {
    let w: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("malformed weight `{tok}`"),
    })?;
    if !w.is_finite() {
        return Err(Error::Validation {
            line,
            message: format!("weight `{tok}` is not finite"),
        });
    }
    if w < 0.0 {
        return Err(Error::Validation {
            line,
            message: format!("negative weight {w}"),
        });
    }
    Ok(w)
}

/// A nonnegative vector with unit L1 mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticVector(Vec<f64>);

impl StochasticVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotStochastic("empty vector".to_string()));
        }
        if let Some((i, x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::NotStochastic(format!("entry {i} is {x}")));
        }
        let mass: f64 = values.iter().sum();
        if (mass - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotStochastic(format!("mass {mass} is not 1")));
        }
        Ok(StochasticVector(values))
    }

    /// Normalizes nonnegative weights to unit mass.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some(x) = weights.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::NotStochastic(format!("invalid weight {x}")));
        }
        let mass: f64 = weights.iter().sum();
        if mass <= 0.0 {
            return Err(Error::NotStochastic("weights sum to zero".to_string()));
        }
        StochasticVector::new(weights.into_iter().map(|w| w / mass).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotStochastic("empty vector".to_string()));
        }
        Ok(StochasticVector(vec![1.0 / n as f64; n]))
    }

    /// The unit vector at `index`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::dims(n, index + 1));
        }
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Ok(StochasticVector(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for StochasticVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Sparse column-compressed column-stochastic matrix.
///
/// Dangling columns are implicit: they equal the teleport vector, which is
/// stored once, so memory stays `O(n + edges)` however many nodes dangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    dangling: Vec<usize>,
    is_dangling: Vec<bool>,
    teleport: Vec<f64>,
}

impl TransitionMatrix {
    /// Builds `H` from an edge list. Column `j` holds `w(j -> i) / out(j)`
    /// at row `i`; parallel edges accumulate. Columns of nodes with zero
    /// out-weight are replaced by `teleport` and listed in
    /// [`dangling_columns`](Self::dangling_columns).
    pub fn build(graph: &GraphEdges, teleport: &StochasticVector) -> Result<Self> {
        let n = graph.node_count();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "transition matrix needs at least one node".to_string(),
            ));
        }
        if teleport.len() != n {
            return Err(Error::dims(n, teleport.len()));
        }

        let out = graph.out_weights();
        let mut buckets: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for e in graph.edges() {
            if e.weight > 0.0 {
                buckets[e.src].push((e.dst, e.weight));
            }
        }

        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut dangling = Vec::new();
        col_ptr.push(0);

        for (j, bucket) in buckets.iter_mut().enumerate() {
            if out[j] > 0.0 {
                // stable sort keeps the input order of parallel edges, so
                // their accumulation is deterministic
                bucket.sort_by_key(|&(row, _)| row);
                let mut k = 0;
                while k < bucket.len() {
                    let row = bucket[k].0;
                    let mut w = 0.0;
                    while k < bucket.len() && bucket[k].0 == row {
                        w += bucket[k].1;
                        k += 1;
                    }
                    row_idx.push(row);
                    values.push(w / out[j]);
                }
            } else {
                dangling.push(j);
            }
            col_ptr.push(row_idx.len());
        }
        let mut is_dangling = vec![false; n];
        dangling.iter().for_each(|&j| is_dangling[j] = true);

        Ok(TransitionMatrix {
            n,
            col_ptr,
            row_idx,
            values,
            dangling,
            is_dangling,
            teleport: teleport.as_slice().to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Explicitly stored link entries; dangling columns are not counted.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Columns that were replaced by the teleport vector.
    pub fn dangling_columns(&self) -> &[usize] {
        &self.dangling
    }

    /// Nonzero `(row, value)` pairs of column `j`, ascending by row.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        let teleport = if self.is_dangling[j] { &self.teleport[..] } else { &[] };
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
            .chain(
                teleport
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|&(_, p)| p > 0.0),
            )
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.column(j).map(|(_, v)| v).sum()).collect()
    }

    /// Largest `|column sum - 1|`.
    pub fn max_column_sum_deviation(&self) -> f64 {
        self.column_sums()
            .into_iter()
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `H * v`: link entries by ascending column then row, then the
    /// dangling mass spread along the teleport vector.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::dims(self.n, v.len()));
        }
        let mut out = vec![0.0; self.n];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`matvec`](Self::matvec) writing into `out`.
    /// Panics if either slice has the wrong length.
    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.iter_mut().for_each(|x| *x = 0.0);
        let mut dangling_mass = 0.0;
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            if self.is_dangling[j] {
                dangling_mass += vj;
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                out[self.row_idx[k]] += self.values[k] * vj;
            }
        }
        if dangling_mass != 0.0 {
            for (o, &p) in out.iter_mut().zip(&self.teleport) {
                *o += dangling_mass * p;
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n);
        for j in 0..self.n {
            for (i, v) in self.column(j) {
                m[(i, j)] += v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(src: usize, dst: usize, weight: f64) -> Edge {
        Edge { src, dst, weight }
    }

    fn two_cycle() -> TransitionMatrix {
        let g = parse_edge_list("0 1\n1 0").unwrap();
        TransitionMatrix::build(&g, &StochasticVector::uniform(2).unwrap()).unwrap()
    }

    #[test]
    fn parses_simple_list() {
        let g = parse_edge_list("0 1\n1 0").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[edge(0, 1, 1.0), edge(1, 0, 1.0)]);
    }

    #[test]
    fn parses_empty_input() {
        let g = parse_edge_list("").unwrap();
        assert_eq!(g.node_count(), 0);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn parses_weights_and_comments() {
        let g = parse_edge_list("0 1 2.5\n# comment\n2 0").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[edge(0, 1, 2.5), edge(2, 0, 1.0)]);
    }

    #[test]
    fn malformed_token_reports_line() {
        match parse_edge_list("0 x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("0 1\n\n1 2 abc") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("0 1 2 3"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("-1 0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn negative_weight_is_validation_error() {
        assert!(matches!(
            parse_edge_list("0 1\n1 0 -2"),
            Err(Error::Validation { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 inf"),
            Err(Error::Validation { line: 1, .. })
        ));
    }

    #[test]
    fn index_overflow_is_validation_error() {
        assert!(matches!(
            parse_edge_list("0 99999999999999999999999"),
            Err(Error::Validation { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 4294967295"),
            Err(Error::Validation { line: 1, .. })
        ));
    }

    #[test]
    fn nodes_header_wins_when_larger() {
        let g = parse_edge_list("%nodes 5\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 5);
        let g = parse_edge_list("%nodes 1\r\n0 3\r\n").unwrap();
        assert_eq!(g.node_count(), 4);
        assert!(matches!(parse_edge_list("%foo 3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn all_zero_weights_rejected() {
        assert!(matches!(
            parse_edge_list("0 1 0\n1 0 0"),
            Err(Error::Validation { .. })
        ));
        assert!(GraphEdges::new(2, vec![edge(0, 1, 0.0)]).is_err());
        assert!(GraphEdges::new(2, vec![edge(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn two_cycle_transition() {
        let h = two_cycle();
        assert!(h.dangling_columns().is_empty());
        assert_eq!(h.column(0).collect::<Vec<_>>(), vec![(1, 1.0)]);
        assert_eq!(h.column(1).collect::<Vec<_>>(), vec![(0, 1.0)]);
    }

    #[test]
    fn dangling_column_gets_teleport() {
        let g = parse_edge_list("0 1").unwrap();
        let h = TransitionMatrix::build(&g, &StochasticVector::uniform(2).unwrap()).unwrap();
        assert_eq!(h.column(0).collect::<Vec<_>>(), vec![(1, 1.0)]);
        assert_eq!(h.column(1).collect::<Vec<_>>(), vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(h.dangling_columns(), &[1]);
    }

    #[test]
    fn dangling_columns_are_not_materialized() {
        // a star into node 0: every other node dangles
        let n = 50_000;
        let edges = (1..n).map(|j| edge(j, 0, 1.0)).collect();
        let g = GraphEdges::new(n, edges).unwrap();
        let h = TransitionMatrix::build(&g, &StochasticVector::uniform(n).unwrap()).unwrap();
        assert_eq!(h.nnz(), n - 1);
        assert_eq!(h.dangling_columns(), &[0]);
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let w = h.matvec(&v).unwrap();
        assert!(w.iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-18));
        assert_eq!(h.column(0).count(), n);
    }

    #[test]
    fn weights_are_normalized() {
        let g = GraphEdges::new(3, vec![edge(0, 1, 1.0), edge(0, 2, 3.0)]).unwrap();
        let h = TransitionMatrix::build(&g, &StochasticVector::uniform(3).unwrap()).unwrap();
        assert_eq!(h.column(0).collect::<Vec<_>>(), vec![(1, 0.25), (2, 0.75)]);
        assert_eq!(h.matvec(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.25, 0.75]);
    }

    #[test]
    fn parallel_edges_accumulate() {
        let g = parse_edge_list("0 1\n0 1\n0 0 2\n1 0").unwrap();
        let h = TransitionMatrix::build(&g, &StochasticVector::uniform(2).unwrap()).unwrap();
        assert_eq!(h.column(0).collect::<Vec<_>>(), vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn build_rejects_bad_dimensions() {
        let g = parse_edge_list("0 1").unwrap();
        assert!(matches!(
            TransitionMatrix::build(&g, &StochasticVector::uniform(3).unwrap()),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        let empty = parse_edge_list("").unwrap();
        assert!(TransitionMatrix::build(&empty, &StochasticVector::uniform(1).unwrap()).is_err());
    }

    #[test]
    fn matvec_on_two_cycle() {
        let h = two_cycle();
        assert_eq!(h.matvec(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(h.matvec(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);
        assert!(h.matvec(&[1.0]).is_err());
    }

    #[test]
    fn stochastic_vector_validation() {
        assert!(StochasticVector::new(vec![0.5, 0.5]).is_ok());
        assert!(StochasticVector::new(vec![0.5, 0.6]).is_err());
        assert!(StochasticVector::new(vec![1.5, -0.5]).is_err());
        assert!(StochasticVector::new(vec![]).is_err());
        let v = StochasticVector::from_weights(vec![1.0, 3.0]).unwrap();
        assert_eq!(v.as_slice(), &[0.25, 0.75]);
        assert!(StochasticVector::from_weights(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn dense_view_matches_sparse() {
        let g = parse_edge_list("0 1\n0 2 3\n2 2").unwrap();
        let h = TransitionMatrix::build(&g, &StochasticVector::uniform(3).unwrap()).unwrap();
        let d = h.to_dense();
        let v = [0.2, 0.3, 0.5];
        let a = h.matvec(&v).unwrap();
        let b = d.mul_vec(&v).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
