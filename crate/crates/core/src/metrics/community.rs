//! Modularity and deterministic Louvain community detection.
//!
//! Modularity uses the weighted strength `k_i = Σ_j W_ij` and total weight
//! `m = Σ_{i<j} W_ij` (every undirected edge counted once), so that
//! `2m = Σ_ij W_ij` over ordered pairs.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GraphPair};
use crate::rng::{stage_rng, Stage};

/// Sweep orders tried in addition to the ascending one.
pub const LOUVAIN_EXTRA_SWEEPS: usize = 4;

const MAX_PASSES: usize = 1000;
const MAX_LEVELS: usize = 64;

/// Node → community assignment with contiguous ids starting at 0, numbered in
/// order of first appearance by node index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary community ids into canonical contiguous form.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self { assignment }
    }

    pub fn single(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_communities(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&c| c + 1)
    }
}

fn check_undirected(conn: &AdjacencyMatrix) -> Result<()> {
    if conn.is_directed() {
        return Err(Error::invalid("modularity needs an undirected connectivity graph"));
    }
    Ok(())
}

/// Newman modularity of `p` on the connectivity graph.
pub fn modularity(g: &GraphPair, p: &Partition) -> Result<f64> {
    check_undirected(&g.conn)?;
    let n = g.n();
    if p.len() != n {
        return Err(Error::invalid(format!(
            "partition covers {} nodes, graph has {n}",
            p.len()
        )));
    }
    let labels = p.assignment();
    let c = p.num_communities();
    let mut inside = vec![0.0; c];
    let mut total = vec![0.0; c];
    let mut two_m = 0.0;
    for i in 0..n {
        let ci = labels[i];
        let mut strength = 0.0;
        let mut within = 0.0;
        for (j, &w) in g.conn.row(i).iter().enumerate() {
            if i == j {
                continue;
            }
            strength += w;
            if labels[j] == ci {
                within += w;
            }
        }
        inside[ci] += within;
        total[ci] += strength;
        two_m += strength;
    }
    if two_m <= 0.0 {
        return Err(Error::degenerate_graph("modularity of a graph with zero total weight"));
    }
    Ok(inside
        .iter()
        .zip(&total)
        .map(|(&a, &t)| a / two_m - (t / two_m) * (t / two_m))
        .sum())
}

/// Weighted graph at one Louvain level; the diagonal holds the ordered-pair
/// weight internal to each aggregated node.
struct Level {
    n: usize,
    w: Vec<f64>,
}

impl Level {
    fn strengths(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.w[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }

    /// Local moving phase. Returns the community of every node and whether any
    /// node changed community.
    fn local_moves(&self, order: &[usize]) -> (Vec<usize>, bool) {
        let n = self.n;
        let k = self.strengths();
        let two_m: f64 = k.iter().sum();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut acc = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::with_capacity(n);
        let mut is_touched = vec![false; n];
        let mut any_move = false;
        if two_m <= 0.0 {
            return (comm, false);
        }

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in order {
                let ki = k[i];
                if ki == 0.0 {
                    continue;
                }
                let old = comm[i];
                tot[old] -= ki;

                let row = &self.w[i * n..(i + 1) * n];
                for (j, &w) in row.iter().enumerate() {
                    if j == i || w == 0.0 {
                        continue;
                    }
                    let c = comm[j];
                    if !is_touched[c] {
                        is_touched[c] = true;
                        touched.push(c);
                    }
                    acc[c] += w;
                }
                touched.sort_unstable();

                let gain = |c: usize, acc: &[f64]| acc[c] - tot[c] * ki / two_m;
                let mut best = old;
                let mut best_gain = gain(old, &acc);
                let tol = 1e-13 * ki;
                for &c in &touched {
                    let g = gain(c, &acc);
                    if g > best_gain + tol {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &touched {
                    acc[c] = 0.0;
                    is_touched[c] = false;
                }
                touched.clear();

                tot[best] += ki;
                if best != old {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> Level {
        let mut w = vec![0.0; count * count];
        for i in 0..self.n {
            let ci = comm[i];
            for j in 0..self.n {
                let v = self.w[i * self.n + j];
                if v != 0.0 {
                    w[ci * count + comm[j]] += v;
                }
            }
        }
        Level { n: count, w }
    }
}

fn louvain(conn: &AdjacencyMatrix, first_order: &[usize]) -> Partition {
    let n = conn.n();
    let mut level = Level {
        n,
        w: conn.weights().as_slice().to_vec(),
    };
    for i in 0..n {
        level.w[i * n + i] = 0.0;
    }
    let mut membership: Vec<usize> = (0..n).collect();
    let mut order = first_order.to_vec();
    for _ in 0..MAX_LEVELS {
        let (comm, moved) = level.local_moves(&order);
        if !moved {
            break;
        }
        let canon = Partition::from_labels(&comm);
        let count = canon.num_communities();
        for m in membership.iter_mut() {
            *m = canon.assignment[*m];
        }
        level = level.aggregate(&canon.assignment, count);
        order = (0..count).collect();
    }
    Partition::from_labels(&membership)
}

/// Louvain modularity maximization.
///
/// The first run sweeps nodes in ascending index order; `seed` drives a fixed
/// number of further runs over shuffled sweep orders. The partition with the
/// highest modularity wins, earlier runs winning ties. The result never scores
/// below the single-community partition.
pub fn detect_communities(g: &GraphPair, seed: u64) -> Result<Partition> {
    check_undirected(&g.conn)?;
    let n = g.n();
    if n <= 1 {
        return Ok(Partition::single(n));
    }
    let ascending: Vec<usize> = (0..n).collect();
    let mut best = louvain(&g.conn, &ascending);
    let Ok(mut best_q) = modularity(g, &best) else {
        // edgeless graph: every node is its own community
        return Ok(Partition::singletons(n));
    };

    let mut rng = stage_rng(seed, Stage::Louvain);
    let mut order = ascending;
    for _ in 0..LOUVAIN_EXTRA_SWEEPS {
        order.shuffle(&mut rng);
        let candidate = louvain(&g.conn, &order);
        let q = modularity(g, &candidate)?;
        if q > best_q + 1e-12 {
            best = candidate;
            best_q = q;
        }
    }

    if best_q < 0.0 {
        best = Partition::single(n);
    }
    Ok(best)
}
