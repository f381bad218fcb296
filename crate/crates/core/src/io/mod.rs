//! On-disk formats.

mod bsm;
mod bundle;
mod json;
mod tables;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bsm::{
    read_adjacency, read_bsm, read_graph_pair, write_adjacency, write_bsm, write_graph_pair, BsmManifest, BsmMatrix,
    BSM_FORMAT_VERSION,
};
pub use bundle::{
    head_bias_name, layer_bias_name, pos_embed_name, read_bundle, w_k_name, w_q_name, write_bundle, Modality,
    ModelBundle, ModelManifest, PositionalScheme, TensorEntry, BSE_FORMAT_VERSION,
};
pub use json::{read_json, to_json_string, write_json};
pub use tables::{
    fmt_f64, read_accuracy_csv, read_brain_features, read_head_features, read_matrix_csv, read_report_csv,
    read_timeseries_csv, read_vertex_labels, write_brain_features, write_head_features, write_matrix_csv,
    write_report_csv, ReportRow,
};

use crate::brain::{BrainNetworkGraph, NetworkId};
use crate::error::{Error, Result};
use crate::graph::NormalizationConstants;
use crate::space::SpaceModel;

const NETWORKS_JSON: &str = "networks.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEntry {
    pub network: NetworkId,
    /// Graph directory relative to the manifest.
    pub dir: String,
    pub roi_indices: Vec<usize>,
}

/// Index of the seven persisted network graphs and the constants that
/// produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworksManifest {
    pub constants: NormalizationConstants,
    pub minmax_applied: bool,
    pub networks: Vec<NetworkEntry>,
}

pub fn write_brain_networks(
    dir: &Path,
    networks: &[BrainNetworkGraph],
    constants: NormalizationConstants,
    minmax_applied: bool,
    roi_labels: Option<&[String]>,
) -> Result<NetworksManifest> {
    let mut entries = Vec::with_capacity(networks.len());
    for net in networks {
        let labels: Option<Vec<String>> =
            roi_labels.map(|l| net.roi_indices.iter().map(|&i| l[i].clone()).collect());
        let sub = net.network.code().to_string();
        write_graph_pair(&dir.join(&sub), &net.graph, labels.as_deref())?;
        entries.push(NetworkEntry {
            network: net.network,
            dir: sub,
            roi_indices: net.roi_indices.clone(),
        });
    }
    let manifest = NetworksManifest {
        constants,
        minmax_applied,
        networks: entries,
    };
    write_json(&dir.join(NETWORKS_JSON), &manifest)?;
    Ok(manifest)
}

/// Reads all seven networks back in canonical order.
pub fn read_brain_networks(dir: &Path) -> Result<Vec<BrainNetworkGraph>> {
    let path = dir.join(NETWORKS_JSON);
    let man: NetworksManifest = read_json(&path)?;
    if man.networks.len() != 7 || man.networks.iter().zip(NetworkId::ALL).any(|(e, n)| e.network != n) {
        return Err(Error::format(&path, "expected the seven networks in canonical order"));
    }
    man.networks
        .iter()
        .map(|e| {
            let graph = read_graph_pair(&dir.join(&e.dir))?;
            if graph.n() != e.roi_indices.len() {
                return Err(Error::format(&path, format!("{}: ROI list does not match graph size", e.network)));
            }
            Ok(BrainNetworkGraph {
                network: e.network,
                graph,
                roi_indices: e.roi_indices.clone(),
            })
        })
        .collect()
}

pub fn save_space(path: &Path, model: &SpaceModel) -> Result<()> {
    write_json(path, model)
}

pub fn load_space(path: &Path) -> Result<SpaceModel> {
    let model: SpaceModel = read_json(path)?;
    model.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(model)
}
