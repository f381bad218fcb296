//! Position-driven attention graphs.
//!
//! For one head the graph is the row softmax of
//! `(P·W_Q (P·W_K)ᵀ + R) / √d_h`, where `P` is the model's absolute positional
//! embedding and `R` an optional relative-position bias. Rotary models carry no
//! absolute embedding; for them a borrowed base embedding is interpolated to the
//! model width and rescaled to the spread of the head's projections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, AdjacencyMatrix, GraphPair, NormalizationConstants};
use crate::matrix::DenseMatrix;

/// Identifies one attention head.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HeadRef {
    pub model_id: String,
    pub layer: usize,
    pub head: usize,
}

/// Query/key projections of one head, plus its relative bias if any.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadWeights {
    pub head_ref: HeadRef,
    w_q: DenseMatrix,
    w_k: DenseMatrix,
    rel_bias: Option<DenseMatrix>,
    d: usize,
    num_heads: usize,
}

impl HeadWeights {
    pub fn new(
        head_ref: HeadRef,
        w_q: DenseMatrix,
        w_k: DenseMatrix,
        rel_bias: Option<DenseMatrix>,
        d: usize,
        num_heads: usize,
    ) -> Result<Self> {
        if num_heads == 0 || d == 0 || !d.is_multiple_of(num_heads) {
            return Err(Error::invalid(format!(
                "hidden size {d} is not divisible by {num_heads} heads"
            )));
        }
        let d_h = d / num_heads;
        for (name, m) in [("w_q", &w_q), ("w_k", &w_k)] {
            if m.rows() != d || m.cols() != d_h {
                return Err(Error::invalid(format!(
                    "{name} is {}×{}, expected {d}×{d_h}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::invalid(format!("{name} has non-finite entries")));
            }
        }
        if let Some(r) = &rel_bias {
            if r.rows() != r.cols() {
                return Err(Error::invalid("relative bias must be square"));
            }
            if !r.is_finite() {
                return Err(Error::invalid("relative bias has non-finite entries"));
            }
        }
        Ok(Self {
            head_ref,
            w_q,
            w_k,
            rel_bias,
            d,
            num_heads,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_heads(&self) -> usize {
        self.num_heads
    }

    pub fn head_dim(&self) -> usize {
        self.d / self.num_heads
    }

    pub fn w_q(&self) -> &DenseMatrix {
        &self.w_q
    }

    pub fn w_k(&self) -> &DenseMatrix {
        &self.w_k
    }

    pub fn rel_bias(&self) -> Option<&DenseMatrix> {
        self.rel_bias.as_ref()
    }
}

/// `N × dim` positional embedding, special tokens included.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionalEmbedding {
    values: DenseMatrix,
}

impl PositionalEmbedding {
    pub fn new(values: DenseMatrix) -> Result<Self> {
        if values.rows() < 2 {
            return Err(Error::invalid(format!(
                "positional embedding needs at least 2 tokens, got {}",
                values.rows()
            )));
        }
        if !values.is_finite() {
            return Err(Error::invalid("positional embedding has non-finite entries"));
        }
        Ok(Self { values })
    }

    pub fn tokens(&self) -> usize {
        self.values.rows()
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }
}

/// Which borrowed embedding stands in for a rotary model's positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSource {
    /// 50-token language embedding.
    LanguageBase,
    /// 197-token vision embedding (196 patches + class token).
    VisionBase,
}

impl BaseSource {
    pub fn token_count(self) -> usize {
        match self {
            BaseSource::LanguageBase => 50,
            BaseSource::VisionBase => 197,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RopePolicy {
    pub base_source: BaseSource,
    base_values: DenseMatrix,
}

impl RopePolicy {
    pub fn new(base_source: BaseSource, base_values: DenseMatrix) -> Result<Self> {
        if base_values.rows() != base_source.token_count() {
            return Err(Error::invalid(format!(
                "{:?} embedding must have {} rows, got {}",
                base_source,
                base_source.token_count(),
                base_values.rows()
            )));
        }
        if base_values.cols() == 0 || !base_values.is_finite() {
            return Err(Error::invalid("base embedding must be finite and non-empty"));
        }
        Ok(Self {
            base_source,
            base_values,
        })
    }

    pub fn base_values(&self) -> &DenseMatrix {
        &self.base_values
    }
}

/// Result of [`rope_substitute`]: the rescaled embedding and the factor used.
#[derive(Debug, Clone, PartialEq)]
pub struct RopeSubstitution {
    pub embedding: PositionalEmbedding,
    pub scale: f64,
}

/// Endpoint-aligned piecewise-linear resampling of `row` to `target` points.
pub fn interpolate_features(row: &[f64], target: usize) -> Vec<f64> {
    let src = row.len();
    if src == 0 || target == 0 {
        return vec![0.0; target];
    }
    if src == 1 || target == 1 {
        return vec![row[0]; target];
    }
    (0..target)
        .map(|j| {
            let x = (j * (src - 1)) as f64 / (target - 1) as f64;
            let lo = (x.floor() as usize).min(src - 1);
            if lo == src - 1 {
                return row[src - 1];
            }
            let frac = x - lo as f64;
            row[lo] * (1.0 - frac) + row[lo + 1] * frac
        })
        .collect()
}

/// Substitutes a base embedding for a rotary model's positions: interpolate
/// the feature axis to the hidden size, then scale by
/// `k = ((σ_Q + σ_K) / 2) / σ_P` (population standard deviations over all
/// entries, `σ_P` taken after interpolation).
pub fn rope_substitute(
    policy: &RopePolicy,
    target_dim: usize,
    head: &HeadWeights,
) -> Result<RopeSubstitution> {
    if target_dim != head.d() {
        return Err(Error::invalid(format!(
            "target width {target_dim} differs from the head's hidden size {}",
            head.d()
        )));
    }
    let base = policy.base_values();
    let mut data = Vec::with_capacity(base.rows() * target_dim);
    for i in 0..base.rows() {
        data.extend(interpolate_features(base.row(i), target_dim));
    }
    let interpolated = DenseMatrix::new(base.rows(), target_dim, data)?;
    let sigma_p = interpolated.population_std();
    if sigma_p == 0.0 {
        return Err(Error::DegenerateEmbedding(
            "base embedding has zero standard deviation".into(),
        ));
    }
    let sigma_q = head.w_q().population_std();
    let sigma_k = head.w_k().population_std();
    let scale = ((sigma_q + sigma_k) / 2.0) / sigma_p;
    Ok(RopeSubstitution {
        embedding: PositionalEmbedding::new(interpolated.scale(scale))?,
        scale,
    })
}

fn softmax_rows(scores: &mut DenseMatrix) {
    for i in 0..scores.rows() {
        let row = scores.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

fn finish_scores(mut scores: DenseMatrix, head: &HeadWeights) -> Result<AdjacencyMatrix> {
    let n = scores.rows();
    if let Some(r) = head.rel_bias() {
        if r.rows() != n {
            return Err(Error::invalid(format!(
                "relative bias is {}×{} but there are {n} tokens",
                r.rows(),
                r.cols()
            )));
        }
        for i in 0..n {
            for (s, &b) in scores.row_mut(i).iter_mut().zip(r.row(i)) {
                *s += b;
            }
        }
    }
    let scale = (head.head_dim() as f64).sqrt();
    for i in 0..n {
        for s in scores.row_mut(i) {
            *s /= scale;
        }
    }
    softmax_rows(&mut scores);
    AdjacencyMatrix::new(scores, true, true)
}

/// Row-stochastic `N × N` attention graph of one head; the diagonal is kept.
pub fn build_attention_graph(p: &PositionalEmbedding, head: &HeadWeights) -> Result<AdjacencyMatrix> {
    if p.dim() != head.d() {
        return Err(Error::invalid(format!(
            "embedding width {} differs from hidden size {}",
            p.dim(),
            head.d()
        )));
    }
    let q = p.values().matmul(head.w_q())?;
    let k = p.values().matmul(head.w_k())?;
    finish_scores(q.matmul_transposed(&k)?, head)
}

/// Attention graph of a head whose positions enter only through the relative
/// bias (no absolute embedding), so the score matrix is `R` alone.
pub fn build_bias_attention_graph(head: &HeadWeights) -> Result<AdjacencyMatrix> {
    let r = head
        .rel_bias()
        .ok_or_else(|| Error::invalid("head has neither positional embedding nor relative bias"))?;
    if r.rows() < 2 {
        return Err(Error::invalid("relative bias must cover at least 2 tokens"));
    }
    finish_scores(DenseMatrix::zeros(r.rows(), r.cols()), head)
}

/// Diagonal removal, min-max scaling, symmetrization and distance transform.
pub fn preprocess_head(a: &AdjacencyMatrix, c: NormalizationConstants) -> Result<GraphPair> {
    graph::preprocess(a, c, true)
}
