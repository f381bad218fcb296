//! The five graph-topology metrics and the feature vector built from them.

mod clustering;
mod community;
mod paths;

pub use clustering::avg_clustering;
pub use community::{detect_communities, modularity, Partition, LOUVAIN_EXTRA_SWEEPS};
pub use paths::{all_pairs_shortest, avg_shortest_path, global_efficiency, ShortestPaths};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphPair;
use crate::matrix::population_std;

/// Metric names in feature-vector order.
pub const FEATURE_NAMES: [&str; 5] = [
    "clustering",
    "modularity",
    "degree_std",
    "path_length",
    "efficiency",
];

/// `[C, Q, σ_k, L, E_global]` for one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub clustering: f64,
    pub modularity: f64,
    pub degree_std: f64,
    pub path_length: f64,
    pub efficiency: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 5] {
        [
            self.clustering,
            self.modularity,
            self.degree_std,
            self.path_length,
            self.efficiency,
        ]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Self {
            clustering: v[0],
            modularity: v[1],
            degree_std: v[2],
            path_length: v[3],
            efficiency: v[4],
        }
    }
}

/// Population standard deviation of the weighted node strengths.
pub fn degree_std(g: &GraphPair) -> Result<f64> {
    if g.conn.is_directed() {
        return Err(Error::invalid("degree deviation needs an undirected graph"));
    }
    let n = g.n();
    let strengths: Vec<f64> = (0..n)
        .map(|i| {
            g.conn
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| w)
                .sum()
        })
        .collect();
    Ok(population_std(&strengths))
}

/// Computes all five metrics; modularity is evaluated on the partition found
/// by [`detect_communities`] under `seed`.
pub fn feature_vector(g: &GraphPair, seed: u64) -> Result<FeatureVector> {
    let clustering = avg_clustering(g)?;
    let partition = detect_communities(g, seed)?;
    let modularity = modularity(g, &partition)?;
    let degree_std = degree_std(g)?;
    let sp = all_pairs_shortest(g);
    let path_length = paths::avg_shortest_path_with(g, &sp)?;
    let efficiency = paths::global_efficiency_with(&sp)?;
    Ok(FeatureVector {
        clustering,
        modularity,
        degree_std,
        path_length,
        efficiency,
    })
}
