//! End-to-end stages: attention heads and brain inputs to graphs and
//! feature vectors.

use rayon::prelude::*;

use crate::attention::{
    build_attention_graph, build_bias_attention_graph, preprocess_head, rope_substitute, BaseSource, HeadRef,
    RopePolicy,
};
use crate::brain::{
    dice_assign, extract_all_networks, group_fc, pearson_fc, BrainNetworkGraph, NetworkAssignment, RoiTimeSeries,
    Warned,
};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GraphPair, NormalizationConstants};
use crate::io::{Modality, ModelBundle, PositionalScheme};
use crate::metrics::{feature_vector, FeatureVector};
use crate::space::HeadFeatures;

/// Preprocessed graph of one head.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadGraph {
    pub head_ref: HeadRef,
    pub graph: GraphPair,
    /// Scale factor applied to the borrowed embedding on the rotary path.
    pub rope_scale: Option<f64>,
}

fn head_graph(bundle: &ModelBundle, idx: usize, rope: Option<&RopePolicy>, c: NormalizationConstants) -> Result<HeadGraph> {
    let head = &bundle.heads[idx];
    let (attn, rope_scale) = match (bundle.manifest.positional_scheme, &bundle.pos_embed) {
        (PositionalScheme::Rope, _) => {
            let policy = rope.ok_or_else(|| {
                Error::invalid(format!(
                    "{} uses rotary positions; a base embedding is required",
                    bundle.manifest.model_id
                ))
            })?;
            let sub = rope_substitute(policy, head.d(), head)?;
            log::info!(
                "{} layer {} head {}: rope scale k = {}",
                head.head_ref.model_id,
                head.head_ref.layer,
                head.head_ref.head,
                sub.scale
            );
            (build_attention_graph(&sub.embedding, head)?, Some(sub.scale))
        }
        (_, Some(p)) => (build_attention_graph(p, head)?, None),
        (_, None) => (build_bias_attention_graph(head)?, None),
    };
    Ok(HeadGraph {
        head_ref: head.head_ref.clone(),
        graph: preprocess_head(&attn, c)?,
        rope_scale,
    })
}

fn check_rope_source(bundle: &ModelBundle, rope: Option<&RopePolicy>) {
    if bundle.manifest.positional_scheme != PositionalScheme::Rope {
        return;
    }
    if let Some(p) = rope {
        let expected = match bundle.manifest.modality {
            Modality::Vision => BaseSource::VisionBase,
            Modality::Language => BaseSource::LanguageBase,
        };
        if p.base_source != expected {
            log::warn!(
                "{}: {:?} model paired with a {:?} embedding",
                bundle.manifest.model_id,
                bundle.manifest.modality,
                p.base_source
            );
        }
    }
}

/// Graphs of every head, in `(layer, head)` order. Heads run in parallel.
pub fn model_graphs(bundle: &ModelBundle, rope: Option<&RopePolicy>, c: NormalizationConstants) -> Result<Vec<HeadGraph>> {
    check_rope_source(bundle, rope);
    (0..bundle.heads.len())
        .into_par_iter()
        .map(|i| head_graph(bundle, i, rope, c))
        .collect()
}

/// Feature vector of every head, in `(layer, head)` order.
pub fn model_features(
    bundle: &ModelBundle,
    rope: Option<&RopePolicy>,
    c: NormalizationConstants,
    seed: u64,
) -> Result<Vec<HeadFeatures>> {
    check_rope_source(bundle, rope);
    (0..bundle.heads.len())
        .into_par_iter()
        .map(|i| {
            let hg = head_graph(bundle, i, rope, c)?;
            Ok(HeadFeatures {
                features: feature_vector(&hg.graph, seed)?,
                head_ref: hg.head_ref,
            })
        })
        .collect()
}

/// Where the brain stage starts.
#[derive(Debug, Clone)]
pub enum BrainInput {
    TimeSeries(Vec<RoiTimeSeries>),
    SubjectFc(Vec<AdjacencyMatrix>),
    GroupFc(AdjacencyMatrix),
}

#[derive(Debug, Clone)]
pub struct BrainBuild {
    pub group: AdjacencyMatrix,
    pub assignment: NetworkAssignment,
    pub networks: Vec<BrainNetworkGraph>,
}

/// Vertex labels for Dice assignment.
#[derive(Debug, Clone)]
pub struct VertexLabels {
    pub roi: Vec<Option<usize>>,
    pub network: Vec<Option<crate::brain::NetworkId>>,
}

/// Correlation, group averaging, network assignment and per-network graphs.
pub fn build_brain_networks(
    input: BrainInput,
    labels: &VertexLabels,
    c: NormalizationConstants,
    apply_minmax: bool,
) -> Result<Warned<BrainBuild>> {
    let mut warnings = Vec::new();
    let group = match input {
        BrainInput::TimeSeries(series) => {
            let fcs: Vec<Warned<AdjacencyMatrix>> = series.par_iter().map(pearson_fc).collect::<Result<_>>()?;
            let mut mats = Vec::with_capacity(fcs.len());
            for fc in fcs {
                warnings.extend(fc.warnings);
                mats.push(fc.value);
            }
            let g = group_fc(&mats)?;
            warnings.extend(g.warnings);
            g.value
        }
        BrainInput::SubjectFc(mats) => {
            let g = group_fc(&mats)?;
            warnings.extend(g.warnings);
            g.value
        }
        BrainInput::GroupFc(g) => g,
    };
    let assignment = dice_assign(&labels.roi, &labels.network, group.n())?;
    let networks = extract_all_networks(&group, &assignment, c, apply_minmax)?;
    Ok(Warned {
        value: BrainBuild {
            group,
            assignment,
            networks,
        },
        warnings,
    })
}

/// Feature vectors of the seven network graphs, in canonical order.
pub fn brain_features(networks: &[BrainNetworkGraph], seed: u64) -> Result<[FeatureVector; 7]> {
    if networks.len() != 7 {
        return Err(Error::invalid(format!("expected 7 networks, got {}", networks.len())));
    }
    let feats: Vec<FeatureVector> = networks
        .par_iter()
        .map(|n| feature_vector(&n.graph, seed))
        .collect::<Result<_>>()?;
    Ok(std::array::from_fn(|i| feats[i]))
}
