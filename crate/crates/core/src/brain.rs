//! Canonical functional brain network graphs.
//!
//! Per-subject Pearson connectivity is Fisher-z averaged into a group matrix,
//! ROIs are assigned to the seven canonical networks by maximum Dice overlap,
//! and each network's intra-network submatrix becomes one graph: negative
//! correlations dropped, masked row softmax, then the shared preprocessing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, masked_softmax, remove_negatives, AdjacencyMatrix, GraphPair, NormalizationConstants};
use crate::matrix::DenseMatrix;

/// Largest correlation magnitude fed to `atanh`.
pub const FISHER_CLAMP: f64 = 1.0 - 1e-7;

/// The seven canonical resting-state networks, in embedding order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NetworkId {
    #[serde(rename = "VIS")]
    Visual,
    #[serde(rename = "SMN")]
    Somatomotor,
    #[serde(rename = "DAN")]
    DorsalAttention,
    #[serde(rename = "VAN")]
    VentralAttention,
    #[serde(rename = "FPN")]
    Frontoparietal,
    #[serde(rename = "DMN")]
    DefaultMode,
    #[serde(rename = "LIM")]
    Limbic,
}

impl NetworkId {
    pub const ALL: [NetworkId; 7] = [
        NetworkId::Visual,
        NetworkId::Somatomotor,
        NetworkId::DorsalAttention,
        NetworkId::VentralAttention,
        NetworkId::Frontoparietal,
        NetworkId::DefaultMode,
        NetworkId::Limbic,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            NetworkId::Visual => "VIS",
            NetworkId::Somatomotor => "SMN",
            NetworkId::DorsalAttention => "DAN",
            NetworkId::VentralAttention => "VAN",
            NetworkId::Frontoparietal => "FPN",
            NetworkId::DefaultMode => "DMN",
            NetworkId::Limbic => "LIM",
        }
    }

    /// Integer code used by the 7-network cortical atlas files
    /// (1 visual … 5 limbic, 6 frontoparietal, 7 default); 0 is unlabeled.
    pub fn from_atlas_code(code: i64) -> Option<NetworkId> {
        match code {
            1 => Some(NetworkId::Visual),
            2 => Some(NetworkId::Somatomotor),
            3 => Some(NetworkId::DorsalAttention),
            4 => Some(NetworkId::VentralAttention),
            5 => Some(NetworkId::Limbic),
            6 => Some(NetworkId::Frontoparietal),
            7 => Some(NetworkId::DefaultMode),
            _ => None,
        }
    }
}

impl fmt::Display for NetworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for NetworkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NetworkId::ALL
            .into_iter()
            .find(|n| n.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown network '{s}'")))
    }
}

/// A value together with the non-fatal warnings produced while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Warned<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

/// Mean BOLD signal per ROI for one subject (`n_rois × n_timepoints`).
#[derive(Debug, Clone, PartialEq)]
pub struct RoiTimeSeries {
    pub subject_id: String,
    values: DenseMatrix,
}

impl RoiTimeSeries {
    pub fn new(subject_id: impl Into<String>, values: DenseMatrix) -> Result<Self> {
        if values.cols() < 3 {
            return Err(Error::invalid(format!(
                "time series needs at least 3 timepoints, got {}",
                values.cols()
            )));
        }
        if !values.is_finite() {
            return Err(Error::invalid("time series has non-finite samples"));
        }
        Ok(Self {
            subject_id: subject_id.into(),
            values,
        })
    }

    pub fn n_rois(&self) -> usize {
        self.values.rows()
    }

    pub fn n_timepoints(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }
}

/// Pearson correlation between every pair of ROI signals, diagonal zeroed.
/// A constant ROI gets zero correlation with everything and a warning.
pub fn pearson_fc(ts: &RoiTimeSeries) -> Result<Warned<AdjacencyMatrix>> {
    let n = ts.n_rois();
    let t = ts.n_timepoints() as f64;
    let mut warnings = Vec::new();
    let mut centered = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let row = ts.values().row(i);
        let mean = row.iter().sum::<f64>() / t;
        let c: Vec<f64> = row.iter().map(|v| v - mean).collect();
        let ss: f64 = c.iter().map(|v| v * v).sum();
        if ss == 0.0 {
            warnings.push(format!(
                "subject {}: ROI {i} has zero variance; its correlations are set to 0",
                ts.subject_id
            ));
        }
        norms.push(ss.sqrt());
        centered.push(c);
    }
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            out.set(i, j, r);
            out.set(j, i, r);
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Warned {
        value: AdjacencyMatrix::new(out, false, false)?,
        warnings,
    })
}

/// Fisher-z group average `tanh(mean(atanh r))`, reduced in subject order.
/// Off-diagonal `|r| ≥ 1` is clamped to `±FISHER_CLAMP` with a warning.
pub fn group_fc(mats: &[AdjacencyMatrix]) -> Result<Warned<AdjacencyMatrix>> {
    let first = mats
        .first()
        .ok_or_else(|| Error::invalid("group connectivity needs at least one subject"))?;
    let n = first.n();
    if let Some((s, m)) = mats.iter().enumerate().find(|(_, m)| m.n() != n) {
        return Err(Error::invalid(format!(
            "subject {s} matrix is {}×{}, expected {n}×{n}",
            m.n(),
            m.n()
        )));
    }
    if mats.len() == 1 {
        return Ok(Warned {
            value: first.without_self_loops(),
            warnings: Vec::new(),
        });
    }
    let mut clamped = 0usize;
    let mut out = DenseMatrix::zeros(n, n);
    let count = mats.len() as f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut z = 0.0;
            for m in mats {
                let r = m.weight(i, j);
                let r = if r.abs() >= 1.0 {
                    clamped += 1;
                    r.signum() * FISHER_CLAMP
                } else {
                    r
                };
                z += r.atanh();
            }
            out.set(i, j, (z / count).tanh());
        }
    }
    let mut warnings = Vec::new();
    if clamped > 0 {
        let w = format!("{clamped} correlation entries with |r| ≥ 1 clamped to ±{FISHER_CLAMP}");
        log::warn!("{w}");
        warnings.push(w);
    }
    let directed = mats.iter().any(|m| m.is_directed());
    Ok(Warned {
        value: AdjacencyMatrix::new(out, directed, false)?,
        warnings,
    })
}

/// ROI → network mapping with the Dice overlaps that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkAssignment {
    pub roi_to_network: Vec<NetworkId>,
    pub dice_scores: Vec<[f64; 7]>,
}

impl NetworkAssignment {
    pub fn n_rois(&self) -> usize {
        self.roi_to_network.len()
    }

    /// Member ROIs of `net`, ascending.
    pub fn members(&self, net: NetworkId) -> Vec<usize> {
        self.roi_to_network
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == net)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Assigns each ROI to the network with the highest Dice overlap
/// `2|A∩B| / (|A| + |B|)` over the shared vertex domain; ties go to the
/// earlier network in [`NetworkId::ALL`]. `None` marks an unlabeled vertex.
pub fn dice_assign(
    roi_labels: &[Option<usize>],
    network_labels: &[Option<NetworkId>],
    n_rois: usize,
) -> Result<NetworkAssignment> {
    if roi_labels.len() != network_labels.len() {
        return Err(Error::invalid(format!(
            "label arrays differ in length ({} vs {})",
            roi_labels.len(),
            network_labels.len()
        )));
    }
    let mut roi_size = vec![0usize; n_rois];
    let mut net_size = [0usize; 7];
    let mut overlap = vec![[0usize; 7]; n_rois];
    for (r, nl) in roi_labels.iter().zip(network_labels) {
        if let Some(r) = *r {
            if r >= n_rois {
                return Err(Error::Assignment(format!(
                    "vertex labeled with ROI {r} but only {n_rois} ROIs exist"
                )));
            }
            roi_size[r] += 1;
            if let Some(net) = nl {
                overlap[r][net.index()] += 1;
            }
        }
        if let Some(net) = nl {
            net_size[net.index()] += 1;
        }
    }
    let mut roi_to_network = Vec::with_capacity(n_rois);
    let mut dice_scores = Vec::with_capacity(n_rois);
    for roi in 0..n_rois {
        if roi_size[roi] == 0 {
            return Err(Error::Assignment(format!("ROI {roi} has no vertices")));
        }
        let mut scores = [0.0; 7];
        for (b, s) in scores.iter_mut().enumerate() {
            *s = 2.0 * overlap[roi][b] as f64 / (roi_size[roi] + net_size[b]) as f64;
        }
        let mut best = 0;
        for b in 1..7 {
            if scores[b] > scores[best] {
                best = b;
            }
        }
        if scores[best] == 0.0 {
            log::warn!("ROI {roi} overlaps no network; assigned to {}", NetworkId::ALL[best]);
        }
        roi_to_network.push(NetworkId::ALL[best]);
        dice_scores.push(scores);
    }
    Ok(NetworkAssignment {
        roi_to_network,
        dice_scores,
    })
}

/// One network's graph and the global ROI index of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct BrainNetworkGraph {
    pub network: NetworkId,
    pub graph: GraphPair,
    pub roi_indices: Vec<usize>,
}

/// Slices the intra-network submatrix of `net` and turns it into a graph.
/// `apply_minmax = false` skips the min-max scaling after the softmax.
pub fn extract_network_graph(
    group: &AdjacencyMatrix,
    assign: &NetworkAssignment,
    net: NetworkId,
    c: NormalizationConstants,
    apply_minmax: bool,
) -> Result<BrainNetworkGraph> {
    if group.is_directed() {
        return Err(Error::invalid("group connectivity matrix must be symmetric"));
    }
    if assign.n_rois() != group.n() {
        return Err(Error::invalid(format!(
            "assignment covers {} ROIs, connectivity matrix has {}",
            assign.n_rois(),
            group.n()
        )));
    }
    let roi_indices = assign.members(net);
    if roi_indices.len() < 2 {
        return Err(Error::DegenerateNetwork {
            network: net.code().into(),
            reason: format!("{} member ROI(s); at least 2 required", roi_indices.len()),
        });
    }
    let sub = group.submatrix(&roi_indices)?.without_self_loops();
    let probs = masked_softmax(&remove_negatives(&sub))?;
    let graph = graph::preprocess(&probs, c, apply_minmax)?;
    Ok(BrainNetworkGraph {
        network: net,
        graph,
        roi_indices,
    })
}

/// All seven network graphs, in [`NetworkId::ALL`] order.
pub fn extract_all_networks(
    group: &AdjacencyMatrix,
    assign: &NetworkAssignment,
    c: NormalizationConstants,
    apply_minmax: bool,
) -> Result<Vec<BrainNetworkGraph>> {
    NetworkId::ALL
        .iter()
        .map(|&net| extract_network_graph(group, assign, net, c, apply_minmax))
        .collect()
}
