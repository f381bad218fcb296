use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of similarity vectors a PCA fit accepts.
pub const MIN_PCA_SAMPLES: usize = 8;

/// Principal axes of the 7-dimensional similarity space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaFit {
    pub mean: [f64; 7],
    /// Unit axes by descending variance, first axis first.
    pub axes: Vec<[f64; 7]>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaFit {
    /// Coordinates of `s` along every axis: `(s − mean) · axis`.
    pub fn project(&self, s: &[f64; 7]) -> Vec<f64> {
        self.axes.iter().map(|a| centered_dot(s, &self.mean, a)).collect()
    }
}

pub(crate) fn centered_dot(s: &[f64; 7], mean: &[f64; 7], axis: &[f64; 7]) -> f64 {
    s.iter().zip(mean).zip(axis).map(|((x, m), a)| (x - m) * a).sum()
}

fn largest_loading_positive(axis: &mut [f64; 7]) {
    let mut best = 0;
    for i in 1..7 {
        if axis[i].abs() > axis[best].abs() {
            best = i;
        }
    }
    if axis[best] < 0.0 {
        axis.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Eigendecomposition of the sample covariance of `vectors`.
///
/// The first axis is oriented so that the all-ones direction projects
/// non-negatively onto it; every other axis has its largest-magnitude loading
/// positive.
pub fn fit_pca(vectors: &[[f64; 7]]) -> Result<PcaFit> {
    let n = vectors.len();
    if n < MIN_PCA_SAMPLES {
        return Err(Error::Degenerate(format!(
            "PCA needs at least {MIN_PCA_SAMPLES} vectors, got {n}"
        )));
    }
    if vectors.iter().all(|v| v == &vectors[0]) {
        return Err(Error::Degenerate("similarity vectors are all identical".into()));
    }
    let mut mean = [0.0; 7];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = SMatrix::<f64, 7, 7>::zeros();
    for v in vectors {
        let c: [f64; 7] = std::array::from_fn(|i| v[i] - mean[i]);
        for i in 0..7 {
            for j in i..7 {
                cov[(i, j)] += c[i] * c[j];
            }
        }
    }
    for i in 0..7 {
        for j in i..7 {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..7).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("similarity vectors have zero variance".into()));
    }

    let mut axes: Vec<[f64; 7]> = order
        .iter()
        .map(|&c| std::array::from_fn(|r| eig.eigenvectors[(r, c)]))
        .collect();
    let ones_projection: f64 = axes[0].iter().sum();
    if ones_projection < 0.0 {
        axes[0].iter_mut().for_each(|v| *v = -*v);
    } else if ones_projection == 0.0 {
        largest_loading_positive(&mut axes[0]);
    }
    for axis in axes.iter_mut().skip(1) {
        largest_loading_positive(axis);
    }

    Ok(PcaFit {
        mean,
        axes,
        explained_variance_ratio: eigenvalues.iter().map(|l| l / total).collect(),
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spread(k: usize) -> [f64; 7] {
        std::array::from_fn(|i| ((k * 31 + i * 17) % 13) as f64 / 13.0 - 0.5)
    }

    #[test]
    fn too_few_vectors() {
        let v: Vec<[f64; 7]> = (0..7).map(spread).collect();
        assert!(fit_pca(&v).is_err());
    }

    #[test]
    fn constant_data_is_degenerate() {
        let v = vec![[0.3; 7]; 10];
        assert!(matches!(fit_pca(&v), Err(Error::Degenerate(_))));
    }

    #[test]
    fn axes_orthonormal_and_sorted() {
        let v: Vec<[f64; 7]> = (0..40).map(spread).collect();
        let fit = fit_pca(&v).unwrap();
        for (a, ai) in fit.axes.iter().enumerate() {
            for (b, bi) in fit.axes.iter().enumerate() {
                let dot: f64 = ai.iter().zip(bi).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10);
            }
        }
        assert!(fit.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(fit.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-10);
        assert!(fit.axes[0].iter().sum::<f64>() >= 0.0);
    }

    #[test]
    fn projection_of_mean_is_origin() {
        let v: Vec<[f64; 7]> = (0..20).map(spread).collect();
        let fit = fit_pca(&v).unwrap();
        assert!(fit.project(&fit.mean).iter().all(|c| *c == 0.0));
        let shifted: [f64; 7] = std::array::from_fn(|i| fit.mean[i] + fit.axes[0][i]);
        let p = fit.project(&shifted);
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[1].abs() < 1e-12);
    }
}
