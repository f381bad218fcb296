//! Dense weighted graphs and the normalization chain shared by brain and
//! attention graphs: negative clamp, masked softmax, min-max scaling of the
//! nonzero entries, symmetrization, and the connectivity → distance map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Largest graph the dense representation accepts.
pub const MAX_NODES: usize = 4096;

/// Square weight matrix; row `i` holds the out-edges of node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    weights: DenseMatrix,
    directed: bool,
    allows_self_loops: bool,
}

impl AdjacencyMatrix {
    /// Validates and wraps a weight matrix.
    ///
    /// Rejects non-square or oversized matrices, non-finite weights, a nonzero
    /// diagonal when self-loops are disallowed, and asymmetric weights when
    /// `directed` is false.
    pub fn new(weights: DenseMatrix, directed: bool, allows_self_loops: bool) -> Result<Self> {
        let n = weights.rows();
        if weights.cols() != n {
            return Err(Error::invalid(format!(
                "adjacency matrix must be square, got {}×{}",
                n,
                weights.cols()
            )));
        }
        if n > MAX_NODES {
            return Err(Error::invalid(format!(
                "graph has {n} nodes; at most {MAX_NODES} supported"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights.get(i, j);
                if !w.is_finite() {
                    return Err(Error::invalid(format!("non-finite weight at ({i}, {j})")));
                }
                if i == j && !allows_self_loops && w != 0.0 {
                    return Err(Error::invalid(format!(
                        "self-loop weight {w} at node {i} but self-loops are not allowed"
                    )));
                }
                if !directed && j > i && w != weights.get(j, i) {
                    return Err(Error::invalid(format!(
                        "undirected graph is asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            directed,
            allows_self_loops,
        })
    }

    /// Directed graph without self-loops from nested rows.
    pub fn directed<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?, true, false)
    }

    /// Undirected graph without self-loops from nested rows.
    pub fn undirected<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?, false, false)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.weights.row(i)
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn allows_self_loops(&self) -> bool {
        self.allows_self_loops
    }

    /// True when `i` and `j` are joined by a nonzero weight in either direction.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && (self.weight(i, j) != 0.0 || self.weight(j, i) != 0.0)
    }

    /// Copy with the diagonal zeroed and self-loops disallowed.
    pub fn without_self_loops(&self) -> AdjacencyMatrix {
        let mut w = self.weights.clone();
        for i in 0..self.n() {
            w.set(i, i, 0.0);
        }
        AdjacencyMatrix {
            weights: w,
            directed: self.directed,
            allows_self_loops: false,
        }
    }

    /// Principal submatrix on `nodes`, in the given order.
    pub fn submatrix(&self, nodes: &[usize]) -> Result<AdjacencyMatrix> {
        let n = self.n();
        if let Some(&bad) = nodes.iter().find(|&&v| v >= n) {
            return Err(Error::invalid(format!("node {bad} out of range for {n}-node graph")));
        }
        let mut w = DenseMatrix::zeros(nodes.len(), nodes.len());
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                w.set(a, b, self.weight(i, j));
            }
        }
        AdjacencyMatrix::new(w, self.directed, self.allows_self_loops)
    }

    fn map_weights(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.n();
        let data = self.weights.as_slice().iter().map(|&w| f(w)).collect();
        DenseMatrix::new(n, n, data).expect("shape preserved")
    }
}

/// Shortest-path costs per edge; `f64::INFINITY` marks an absent edge and the
/// diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    costs: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != n * n {
            return Err(Error::invalid("distance matrix has the wrong number of entries"));
        }
        for i in 0..n {
            for j in 0..n {
                let c = costs[i * n + j];
                if i == j {
                    if c != 0.0 {
                        return Err(Error::invalid(format!("nonzero self-distance at node {i}")));
                    }
                } else if c.is_nan() || c < 0.0 {
                    return Err(Error::invalid(format!("invalid distance {c} at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, costs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.n + j]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.cost(i, j).is_finite()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.costs[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.costs
    }
}

/// Connectivity graph plus its derived distance graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPair {
    pub conn: AdjacencyMatrix,
    pub dist: DistanceMatrix,
}

impl GraphPair {
    /// Pairs a connectivity graph with an explicit distance graph. Both must
    /// share the same off-diagonal sparsity pattern.
    pub fn new(conn: AdjacencyMatrix, dist: DistanceMatrix) -> Result<Self> {
        if conn.n() != dist.n() {
            return Err(Error::invalid("conn and dist differ in node count"));
        }
        let n = conn.n();
        for i in 0..n {
            for j in 0..n {
                if i != j && (conn.weight(i, j) != 0.0) != dist.has_edge(i, j) {
                    return Err(Error::invalid(format!(
                        "conn and dist sparsity patterns differ at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { conn, dist })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.conn.n()
    }
}

/// The `ε`, `δ` margins of the min-max scaling; nonzero outputs land in
/// `[δ, 1 − ε]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub epsilon: f64,
    pub delta: f64,
}

impl NormalizationConstants {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && delta > 0.0 && epsilon + delta < 1.0) {
            return Err(Error::invalid(format!(
                "normalization constants need 0 < ε, 0 < δ, ε + δ < 1 (got ε={epsilon}, δ={delta})"
            )));
        }
        Ok(Self { epsilon, delta })
    }
}

impl Default for NormalizationConstants {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            delta: 1e-5,
        }
    }
}

/// Sets negative weights to zero.
pub fn remove_negatives(m: &AdjacencyMatrix) -> AdjacencyMatrix {
    AdjacencyMatrix {
        weights: m.map_weights(|w| if w < 0.0 { 0.0 } else { w }),
        directed: m.directed,
        allows_self_loops: m.allows_self_loops,
    }
}

/// Row-wise softmax over the nonzero entries only; zeros stay zero and an
/// all-zero row stays all-zero. The result is directed.
pub fn masked_softmax(m: &AdjacencyMatrix) -> Result<AdjacencyMatrix> {
    let n = m.n();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row = m.row(i);
        if row[i] != 0.0 {
            return Err(Error::invalid(format!("masked softmax needs a zero diagonal (node {i})")));
        }
        if let Some(w) = row.iter().find(|&&w| w < 0.0) {
            return Err(Error::invalid(format!("masked softmax needs non-negative weights, found {w}")));
        }
        let max = row.iter().copied().filter(|&w| w != 0.0).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            continue;
        }
        let denom: f64 = row.iter().filter(|&&w| w != 0.0).map(|&w| (w - max).exp()).sum();
        for (o, &w) in out.row_mut(i).iter_mut().zip(row) {
            if w != 0.0 {
                *o = (w - max).exp() / denom;
            }
        }
    }
    AdjacencyMatrix::new(out, true, false)
}

/// Min-max scaling of the off-diagonal nonzero entries into `[δ, 1 − ε]`.
///
/// Zeros are preserved and the diagonal is cleared. When every nonzero entry
/// has the same value they all map to the midpoint `(δ + 1 − ε) / 2`.
pub fn minmax_normalize(m: &AdjacencyMatrix, c: NormalizationConstants) -> Result<AdjacencyMatrix> {
    let n = m.n();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        for (j, &w) in m.row(i).iter().enumerate() {
            if i != j && w != 0.0 {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    if lo > hi {
        return Err(Error::degenerate_graph("min-max scaling of a graph without edges"));
    }
    let span = 1.0 - c.epsilon - c.delta;
    let range = hi - lo;
    let midpoint = (c.delta + 1.0 - c.epsilon) / 2.0;
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for (j, &w) in m.row(i).iter().enumerate() {
            if i == j || w == 0.0 {
                continue;
            }
            let v = if range > 0.0 {
                c.delta + (w - lo) / range * span
            } else {
                midpoint
            };
            out.set(i, j, v);
        }
    }
    AdjacencyMatrix::new(out, m.directed, false)
}

/// `(m + mᵀ) / 2`, marked undirected.
pub fn symmetrize(m: &AdjacencyMatrix) -> AdjacencyMatrix {
    let n = m.n();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, (m.weight(i, j) + m.weight(j, i)) / 2.0);
        }
    }
    AdjacencyMatrix {
        weights: out,
        directed: false,
        allows_self_loops: m.allows_self_loops,
    }
}

/// Pairs an undirected graph with its distance graph, `d = 1 − |w|` on
/// existing edges. Absent edges stay absent rather than costing 1.
pub fn to_distance(m: &AdjacencyMatrix) -> Result<GraphPair> {
    if m.is_directed() {
        return Err(Error::invalid("distance transform needs an undirected graph"));
    }
    let n = m.n();
    let mut costs = vec![f64::INFINITY; n * n];
    for i in 0..n {
        costs[i * n + i] = 0.0;
        for (j, &w) in m.row(i).iter().enumerate() {
            if i == j {
                if w != 0.0 {
                    return Err(Error::invalid(format!("self-loop at node {i}")));
                }
                continue;
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::invalid(format!(
                    "edge weight {w} at ({i}, {j}) outside [0, 1]"
                )));
            }
            if w != 0.0 {
                costs[i * n + j] = 1.0 - w.abs();
            }
        }
    }
    Ok(GraphPair {
        conn: m.clone(),
        dist: DistanceMatrix { n, costs },
    })
}

/// Connected components over nonzero connectivity edges, ordered by their
/// smallest node index. Each component lists its nodes ascending.
pub fn connected_components(conn: &AdjacencyMatrix) -> Vec<Vec<usize>> {
    let n = conn.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for u in 0..n {
                if !seen[u] && conn.has_edge(v, u) {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Largest connected component; ties go to the component with the smallest
/// minimum node index. Empty graph → empty set.
pub fn largest_connected_component(g: &GraphPair) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for comp in connected_components(&g.conn) {
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

/// The preprocessing chain applied to every graph before metrics: diagonal
/// removal, optional min-max scaling, symmetrization, distance transform.
pub fn preprocess(
    m: &AdjacencyMatrix,
    c: NormalizationConstants,
    apply_minmax: bool,
) -> Result<GraphPair> {
    let m = m.without_self_loops();
    let scaled = if apply_minmax { minmax_normalize(&m, c)? } else { m };
    to_distance(&symmetrize(&scaled))
}
