use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, DistanceMatrix, GraphPair};

/// All-pairs shortest path costs; `f64::INFINITY` marks unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths {
    n: usize,
    d: Vec<f64>,
}

impl ShortestPaths {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }
}

/// Array-based Dijkstra for dense graphs, O(n²) per source.
fn single_source(dist: &DistanceMatrix, source: usize) -> Vec<f64> {
    let n = dist.n();
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    best[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut du = f64::INFINITY;
        for v in 0..n {
            if !done[v] && best[v] < du {
                du = best[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for (v, &c) in dist.row(u).iter().enumerate() {
            if v == u || done[v] || !c.is_finite() {
                continue;
            }
            let cand = du + c;
            if cand < best[v] {
                best[v] = cand;
            }
        }
    }
    best
}

/// Exact shortest paths from every node. Sources may be searched in
/// parallel; rows are assembled in source order.
pub fn all_pairs_shortest(g: &GraphPair) -> ShortestPaths {
    let n = g.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(&g.dist, s))
        .collect();
    ShortestPaths {
        n,
        d: rows.concat(),
    }
}

/// Mean shortest-path cost over ordered pairs; on a disconnected graph the
/// mean is restricted to the largest connected component.
pub fn avg_shortest_path(g: &GraphPair) -> Result<f64> {
    avg_shortest_path_with(g, &all_pairs_shortest(g))
}

pub(crate) fn avg_shortest_path_with(g: &GraphPair, sp: &ShortestPaths) -> Result<f64> {
    let nodes: Vec<usize> = if is_connected(sp) {
        (0..g.n()).collect()
    } else {
        largest_connected_component(g)
    };
    let k = nodes.len();
    if k < 2 {
        return Err(Error::degenerate_graph(format!(
            "largest connected component has {k} node(s); path length needs at least 2"
        )));
    }
    let mut sum = 0.0;
    for &i in &nodes {
        for &j in &nodes {
            if i != j {
                sum += sp.get(i, j);
            }
        }
    }
    Ok(sum / (k * (k - 1)) as f64)
}

fn is_connected(sp: &ShortestPaths) -> bool {
    sp.d.iter().all(|d| d.is_finite())
}

/// Mean inverse shortest-path cost over all ordered pairs of the whole graph;
/// unreachable pairs contribute 0.
pub fn global_efficiency(g: &GraphPair) -> Result<f64> {
    global_efficiency_with(&all_pairs_shortest(g))
}

pub(crate) fn global_efficiency_with(sp: &ShortestPaths) -> Result<f64> {
    let n = sp.n();
    if n < 2 {
        return Err(Error::degenerate_graph("global efficiency needs at least 2 nodes"));
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = sp.get(i, j);
            if d == 0.0 {
                return Err(Error::degenerate_graph(format!(
                    "zero-cost path between nodes {i} and {j}"
                )));
            }
            if d.is_finite() {
                sum += 1.0 / d;
            }
        }
    }
    Ok(sum / (n * (n - 1)) as f64)
}
