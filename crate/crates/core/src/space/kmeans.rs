//! Seeded k-means++ with restarts, silhouette scoring and silhouette-based
//! choice of k.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stage_rng, Stage};

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_TOL: f64 = 1e-10;

fn sq_dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lower index.
pub fn nearest<const D: usize>(p: &[f64; D], centroids: &[[f64; D]]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// A k-means solution with clusters ordered by ascending first coordinate of
/// their centroid (then second coordinate, then discovery order).
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit<const D: usize> {
    pub k: usize,
    pub centroids: Vec<[f64; D]>,
    /// 0-based ordered cluster index per point.
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn plus_plus_init<const D: usize, R: Rng>(points: &[[f64; D]], k: usize, rng: &mut R) -> Vec<[f64; D]> {
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)]);
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd<const D: usize>(points: &[[f64; D]], mut centroids: Vec<[f64; D]>) -> (Vec<[f64; D]>, Vec<usize>, f64) {
    let k = centroids.len();
    let mut labels = vec![0usize; points.len()];
    for _ in 0..KMEANS_MAX_ITER {
        for (l, p) in labels.iter_mut().zip(points) {
            *l = nearest(p, &centroids);
        }
        let mut sums = vec![[0.0; D]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut next = centroids.clone();
        for c in 0..k {
            if counts[c] > 0 {
                next[c] = sums[c].map(|s| s / counts[c] as f64);
            }
        }
        // an empty cluster takes over the point farthest from its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let mut far = 0;
                let mut far_d = -1.0;
                for (i, (p, &l)) in points.iter().zip(&labels).enumerate() {
                    let d = sq_dist(p, &next[l]);
                    if d > far_d {
                        far_d = d;
                        far = i;
                    }
                }
                next[c] = points[far];
                labels[far] = c;
            }
        }
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < KMEANS_TOL {
            break;
        }
    }
    for (l, p) in labels.iter_mut().zip(points) {
        *l = nearest(p, &centroids);
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    (centroids, labels, inertia)
}

/// Best of [`KMEANS_RESTARTS`] seeded k-means++ runs (lowest inertia, earliest
/// restart on ties), with clusters reordered by centroid position.
pub fn kmeans<const D: usize>(points: &[[f64; D]], k: usize, seed: u64) -> Result<KMeansFit<D>> {
    if k == 0 || points.len() < k {
        return Err(Error::Degenerate(format!(
            "k-means with k = {k} on {} points",
            points.len()
        )));
    }
    let mut best: Option<(Vec<[f64; D]>, Vec<usize>, f64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = stage_rng(seed, Stage::KMeans { k, restart });
        let init = plus_plus_init(points, k, &mut rng);
        let run = lloyd(points, init);
        if best.as_ref().is_none_or(|b| run.2 < b.2) {
            best = Some(run);
        }
    }
    let (centroids, labels, inertia) = best.expect("at least one restart");

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&centroids[a], &centroids[b]);
        ca.iter()
            .zip(cb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; k];
    for (pos, &raw) in order.iter().enumerate() {
        rank[raw] = pos;
    }
    Ok(KMeansFit {
        k,
        centroids: order.iter().map(|&raw| centroids[raw]).collect(),
        labels: labels.iter().map(|&l| rank[l]).collect(),
        inertia,
    })
}

/// Mean silhouette coefficient under Euclidean distance. Singleton clusters
/// contribute 0, as do points with `a = b = 0`.
pub fn silhouette<const D: usize>(points: &[[f64; D]], labels: &[usize]) -> Result<f64> {
    if points.len() != labels.len() {
        return Err(Error::invalid("silhouette: points and labels differ in length"));
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::Degenerate("silhouette needs at least two non-empty clusters".into()));
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for (i, p) in points.iter().enumerate() {
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (q, &l) in points.iter().zip(labels) {
            sums[l] += sq_dist(p, q).sqrt();
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / points.len() as f64)
}

/// k-means for every k in the range; the k with the highest silhouette wins
/// (smaller k on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct KSelection<const D: usize> {
    pub best: KMeansFit<D>,
    pub best_silhouette: f64,
    /// `(k, silhouette)` for every candidate that produced ≥ 2 clusters.
    pub silhouettes: Vec<(usize, f64)>,
}

pub fn fit_kmeans<const D: usize>(
    points: &[[f64; D]],
    k_range: RangeInclusive<usize>,
    seed: u64,
) -> Result<KSelection<D>> {
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo < 2 || lo > hi {
        return Err(Error::invalid(format!("k range {lo}..={hi} is empty or below 2")));
    }
    if points.len() <= hi {
        return Err(Error::invalid(format!(
            "k range up to {hi} needs more than {hi} points, got {}",
            points.len()
        )));
    }
    let mut best: Option<(KMeansFit<D>, f64)> = None;
    let mut silhouettes = Vec::new();
    for k in k_range {
        let fit = kmeans(points, k, seed)?;
        let Ok(s) = silhouette(points, &fit.labels) else {
            continue;
        };
        silhouettes.push((k, s));
        if best.as_ref().is_none_or(|(_, bs)| s > *bs) {
            best = Some((fit, s));
        }
    }
    let (best, best_silhouette) =
        best.ok_or_else(|| Error::Degenerate("no k in range produced two clusters".into()))?;
    Ok(KSelection {
        best,
        best_silhouette,
        silhouettes,
    })
}
