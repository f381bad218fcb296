use serde::{Deserialize, Serialize};

use crate::attention::HeadRef;
use crate::error::{Error, Result};
use crate::metrics::FeatureVector;

/// Per-metric mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: [f64; 5],
    pub std: [f64; 5],
}

/// Fits per-metric mean and population std over the corpus.
pub fn fit_standardization(corpus: &[FeatureVector]) -> Result<StandardizationParams> {
    if corpus.is_empty() {
        return Err(Error::Degenerate("standardization over an empty corpus".into()));
    }
    let n = corpus.len() as f64;
    let mut mean = [0.0; 5];
    for v in corpus {
        for (m, x) in mean.iter_mut().zip(v.to_array()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; 5];
    for v in corpus {
        for ((s, x), m) in var.iter_mut().zip(v.to_array()).zip(&mean) {
            *s += (x - m) * (x - m);
        }
    }
    let std = var.map(|s| (s / n).sqrt());
    Ok(StandardizationParams { mean, std })
}

/// `(v − mean) / std`; constant metrics (std = 0) map to 0.
pub fn standardize(v: &FeatureVector, p: &StandardizationParams) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (i, x) in v.to_array().into_iter().enumerate() {
        if p.std[i] > 0.0 {
            out[i] = (x - p.mean[i]) / p.std[i];
        }
    }
    out
}

/// Cosine of the angle between `a` and `b`, clamped to `[−1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("cosine similarity of vectors of different length"));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedSimilarity("zero vector".into()));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// A head's cosine similarities to the seven networks, in
/// [`crate::brain::NetworkId::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityVector {
    pub head_ref: HeadRef,
    pub s: [f64; 7],
}

/// Similarities of an already standardized head vector to the seven
/// standardized brain vectors.
pub fn similarities(head: &[f64; 5], brains: &[[f64; 5]; 7]) -> Result<[f64; 7]> {
    let mut s = [0.0; 7];
    for (out, b) in s.iter_mut().zip(brains) {
        *out = cosine_similarity(head, b)?;
    }
    Ok(s)
}

/// Standardizes the head and every brain vector with `p` and returns the
/// seven similarities.
pub fn similarity_vector(
    head_ref: HeadRef,
    head: &FeatureVector,
    brains: &[FeatureVector; 7],
    p: &StandardizationParams,
) -> Result<SimilarityVector> {
    let brains = brains.map(|b| standardize(&b, p));
    Ok(SimilarityVector {
        head_ref,
        s: similarities(&standardize(head, p), &brains)?,
    })
}
