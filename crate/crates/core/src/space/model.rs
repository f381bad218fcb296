use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::kmeans::{fit_kmeans, nearest};
use super::pca::{centered_dot, fit_pca};
use super::scoring::{match_head, DEFAULT_MATCH_THRESHOLD};
use super::similarity::{
    fit_standardization, similarities, standardize, SimilarityVector, StandardizationParams,
};
use crate::attention::HeadRef;
use crate::brain::NetworkId;
use crate::error::{Error, Result};
use crate::metrics::FeatureVector;
use crate::rng::DEFAULT_SEED;

pub const SPACE_FORMAT_VERSION: &str = "brainspace-space-1";

/// Which population the metric standardization is fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizationScope {
    /// One set of parameters over brain networks and heads together.
    Pooled,
    /// Separate parameters for brain networks and for heads.
    PerFamily,
}

/// Whether head vectors are centered on the PCA mean before projecting onto
/// the first axis in the brain-likeness score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    Centered,
    Uncentered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceConfig {
    pub seed: u64,
    pub k_range: RangeInclusive<usize>,
    pub match_threshold: f64,
    pub scope: StandardizationScope,
    pub score_mode: ScoreMode,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            k_range: 2..=8,
            match_threshold: DEFAULT_MATCH_THRESHOLD,
            scope: StandardizationScope::Pooled,
            score_mode: ScoreMode::Centered,
        }
    }
}

/// Metric vector of one attention head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadFeatures {
    pub head_ref: HeadRef,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrainReference {
    pub network: NetworkId,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteScore {
    pub k: usize,
    pub silhouette: f64,
}

/// The frozen similarity space: standardization, reference brain vectors,
/// principal axes and cluster centroids. New models are positioned against it
/// without refitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceModel {
    pub format_version: String,
    pub seed: u64,
    pub standardization_scope: StandardizationScope,
    pub head_standardization: StandardizationParams,
    pub brain_standardization: StandardizationParams,
    pub brains: Vec<BrainReference>,
    pub pca_mean: [f64; 7],
    pub pca_axes: Vec<[f64; 7]>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub chosen_k: usize,
    pub silhouettes: Vec<SilhouetteScore>,
    /// Centroids in PC1/PC2 coordinates, ordered C1..Ck by ascending PC1.
    pub kmeans_centroids: Vec<[f64; 2]>,
    pub match_threshold: f64,
    pub score_mode: ScoreMode,
}

/// A head left out of the space, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedHead {
    pub head_ref: HeadRef,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedSpace {
    pub model: SpaceModel,
    pub excluded: Vec<ExcludedHead>,
}

/// One head's position in the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadRecord {
    pub layer: usize,
    pub head: usize,
    pub similarity: [f64; 7],
    pub pc1: f64,
    pub pc2: f64,
    /// 1-based cluster index (C1..Ck).
    pub cluster: usize,
    pub matched: Option<NetworkId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model_id: String,
    pub score: f64,
    pub heads: Vec<HeadRecord>,
    /// Head count per cluster, C1 first.
    pub cluster_histogram: Vec<usize>,
    /// Head count per matched network in canonical order, then unmatched.
    pub match_histogram: [usize; 8],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub chosen_k: usize,
    pub match_threshold: f64,
    pub models: Vec<ModelReport>,
    pub excluded: Vec<ExcludedHead>,
}

fn standardized_brains(brains: &[FeatureVector; 7], p: &StandardizationParams) -> Result<[[f64; 5]; 7]> {
    let out = brains.map(|b| standardize(&b, p));
    if let Some(i) = out.iter().position(|v| v.iter().all(|&x| x == 0.0)) {
        return Err(Error::UndefinedSimilarity(format!(
            "{} brain vector is zero after standardization",
            NetworkId::ALL[i]
        )));
    }
    Ok(out)
}

impl SpaceModel {
    /// Fits the space on the seven brain vectors and a corpus of heads.
    pub fn fit(brains: &[FeatureVector; 7], heads: &[HeadFeatures], cfg: &SpaceConfig) -> Result<FittedSpace> {
        if heads.is_empty() {
            return Err(Error::Degenerate("cannot fit a space without heads".into()));
        }
        if !(cfg.match_threshold > 0.0 && cfg.match_threshold <= 1.0) {
            return Err(Error::invalid(format!(
                "match threshold {} outside (0, 1]",
                cfg.match_threshold
            )));
        }
        let head_vectors: Vec<FeatureVector> = heads.iter().map(|h| h.features).collect();
        let (head_std, brain_std) = match cfg.scope {
            StandardizationScope::Pooled => {
                let mut corpus = brains.to_vec();
                corpus.extend_from_slice(&head_vectors);
                let p = fit_standardization(&corpus)?;
                (p, p)
            }
            StandardizationScope::PerFamily => (
                fit_standardization(&head_vectors)?,
                fit_standardization(brains)?,
            ),
        };
        let brain_z = standardized_brains(brains, &brain_std)?;

        let mut excluded = Vec::new();
        let mut vectors = Vec::with_capacity(heads.len());
        for h in heads {
            match similarities(&standardize(&h.features, &head_std), &brain_z) {
                Ok(s) => vectors.push(s),
                Err(Error::UndefinedSimilarity(reason)) => {
                    log::warn!(
                        "excluding {}/L{}/H{}: {reason}",
                        h.head_ref.model_id,
                        h.head_ref.layer,
                        h.head_ref.head
                    );
                    excluded.push(ExcludedHead {
                        head_ref: h.head_ref.clone(),
                        reason,
                    });
                }
                Err(e) => return Err(e),
            }
        }

        let pca = fit_pca(&vectors)?;
        let coords: Vec<[f64; 2]> = vectors
            .iter()
            .map(|s| {
                [
                    centered_dot(s, &pca.mean, &pca.axes[0]),
                    centered_dot(s, &pca.mean, &pca.axes[1]),
                ]
            })
            .collect();
        let selection = fit_kmeans(&coords, cfg.k_range.clone(), cfg.seed)?;

        let model = SpaceModel {
            format_version: SPACE_FORMAT_VERSION.into(),
            seed: cfg.seed,
            standardization_scope: cfg.scope,
            head_standardization: head_std,
            brain_standardization: brain_std,
            brains: NetworkId::ALL
                .iter()
                .zip(brains)
                .map(|(&network, &features)| BrainReference { network, features })
                .collect(),
            pca_mean: pca.mean,
            pca_axes: pca.axes,
            eigenvalues: pca.eigenvalues,
            explained_variance_ratio: pca.explained_variance_ratio,
            chosen_k: selection.best.k,
            silhouettes: selection
                .silhouettes
                .iter()
                .map(|&(k, silhouette)| SilhouetteScore { k, silhouette })
                .collect(),
            kmeans_centroids: selection.best.centroids,
            match_threshold: cfg.match_threshold,
            score_mode: cfg.score_mode,
        };
        Ok(FittedSpace { model, excluded })
    }

    /// Structural checks for a model loaded from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.format_version != SPACE_FORMAT_VERSION {
            return bad(format!("unsupported space format '{}'", self.format_version));
        }
        if self.brains.len() != 7
            || self.brains.iter().zip(NetworkId::ALL).any(|(b, n)| b.network != n)
        {
            return bad("space must list the seven networks in canonical order".into());
        }
        if self.pca_axes.len() < 2 {
            return bad("space needs at least two principal axes".into());
        }
        for (a, u) in self.pca_axes.iter().enumerate() {
            for (b, v) in self.pca_axes.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-10 {
                    return bad(format!("principal axes {a} and {b} are not orthonormal"));
                }
            }
        }
        if self.explained_variance_ratio.iter().sum::<f64>() > 1.0 + 1e-10 {
            return bad("explained variance ratios exceed 1".into());
        }
        if self.kmeans_centroids.len() != self.chosen_k || self.chosen_k == 0 {
            return bad("centroid count differs from chosen k".into());
        }
        if !(self.match_threshold > 0.0 && self.match_threshold <= 1.0) {
            return bad(format!("match threshold {} outside (0, 1]", self.match_threshold));
        }
        Ok(())
    }

    pub fn brain_features(&self) -> [FeatureVector; 7] {
        std::array::from_fn(|i| self.brains[i].features)
    }

    pub fn pc1_axis(&self) -> &[f64; 7] {
        &self.pca_axes[0]
    }

    /// Places one head in the 7-dimensional similarity space.
    pub fn embed(&self, head: &HeadFeatures) -> Result<SimilarityVector> {
        let brain_z = standardized_brains(&self.brain_features(), &self.brain_standardization)?;
        Ok(SimilarityVector {
            head_ref: head.head_ref.clone(),
            s: similarities(&standardize(&head.features, &self.head_standardization), &brain_z)?,
        })
    }

    /// Coordinates along every principal axis.
    pub fn project(&self, s: &[f64; 7]) -> Vec<f64> {
        self.pca_axes
            .iter()
            .map(|a| centered_dot(s, &self.pca_mean, a))
            .collect()
    }

    pub fn project2(&self, s: &[f64; 7]) -> [f64; 2] {
        [
            centered_dot(s, &self.pca_mean, &self.pca_axes[0]),
            centered_dot(s, &self.pca_mean, &self.pca_axes[1]),
        ]
    }

    /// 0-based index of the nearest centroid (C1 = 0).
    pub fn cluster_of(&self, pc: &[f64; 2]) -> usize {
        nearest(pc, &self.kmeans_centroids)
    }

    fn head_score(&self, s: &[f64; 7]) -> f64 {
        match self.score_mode {
            ScoreMode::Centered => centered_dot(s, &self.pca_mean, self.pc1_axis()),
            ScoreMode::Uncentered => s.iter().zip(self.pc1_axis()).map(|(x, u)| x * u).sum(),
        }
    }

    /// Positions every head, grouping the results per model in order of first
    /// appearance.
    pub fn report(&self, heads: &[HeadFeatures], threshold: f64) -> Result<SpaceReport> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::invalid(format!("match threshold {threshold} outside (0, 1]")));
        }
        let mut models: Vec<ModelReport> = Vec::new();
        let mut excluded = Vec::new();
        for h in heads {
            let s = match self.embed(h) {
                Ok(s) => s.s,
                Err(Error::UndefinedSimilarity(reason)) => {
                    excluded.push(ExcludedHead {
                        head_ref: h.head_ref.clone(),
                        reason,
                    });
                    continue;
                }
                Err(e) => return Err(e),
            };
            let pc = self.project2(&s);
            let cluster = self.cluster_of(&pc);
            let matched = match_head(&s, threshold);
            let idx = match models.iter().position(|m| m.model_id == h.head_ref.model_id) {
                Some(i) => i,
                None => {
                    models.push(ModelReport {
                        model_id: h.head_ref.model_id.clone(),
                        score: 0.0,
                        heads: Vec::new(),
                        cluster_histogram: vec![0; self.chosen_k],
                        match_histogram: [0; 8],
                    });
                    models.len() - 1
                }
            };
            let m = &mut models[idx];
            m.score += self.head_score(&s);
            m.cluster_histogram[cluster] += 1;
            m.match_histogram[matched.map_or(7, NetworkId::index)] += 1;
            m.heads.push(HeadRecord {
                layer: h.head_ref.layer,
                head: h.head_ref.head,
                similarity: s,
                pc1: pc[0],
                pc2: pc[1],
                cluster: cluster + 1,
                matched,
            });
        }
        Ok(SpaceReport {
            chosen_k: self.chosen_k,
            match_threshold: threshold,
            models,
            excluded,
        })
    }
}

/// Sum over heads of each head's projection onto the first principal axis.
pub fn brain_likeness_score(heads: &[SimilarityVector], m: &SpaceModel) -> Result<f64> {
    if heads.is_empty() {
        return Err(Error::Degenerate("brain-likeness score of an empty head list".into()));
    }
    Ok(heads.iter().map(|h| m.head_score(&h.s)).sum())
}
