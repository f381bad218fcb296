//! Deterministic synthetic inputs: network-structured ROI time series with
//! matching vertex labels, and three toy transformer models (absolute,
//! relative-bias and rotary positions).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::attention::{HeadRef, HeadWeights, PositionalEmbedding};
use crate::brain::{NetworkId, RoiTimeSeries};
use crate::io::{Modality, PositionalScheme};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone)]
pub struct SyntheticBrain {
    pub series: Vec<RoiTimeSeries>,
    pub roi_labels: Vec<String>,
    pub vertex_roi: Vec<Option<usize>>,
    pub vertex_network: Vec<Option<NetworkId>>,
}

fn normal(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    Normal::new(0.0, sd).expect("positive sd").sample(rng)
}

/// ROIs are grouped by network (`rois_per_network` each, canonical order).
/// Each network mixes a network-specific number of latent signals so the
/// seven graphs differ in topology.
pub fn synthetic_brain(seed: u64, subjects: usize, rois_per_network: usize, timepoints: usize) -> SyntheticBrain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 7 * rois_per_network;
    let mut series = Vec::with_capacity(subjects);
    for s in 0..subjects {
        let global: Vec<f64> = (0..timepoints).map(|_| normal(&mut rng, 0.3)).collect();
        let mut data = Vec::with_capacity(n * timepoints);
        for net in 0..7 {
            let n_latent = net % 3 + 1;
            let loading = 0.6 + 0.15 * net as f64;
            let latents: Vec<Vec<f64>> = (0..n_latent)
                .map(|_| (0..timepoints).map(|_| normal(&mut rng, 1.0)).collect())
                .collect();
            for r in 0..rois_per_network {
                let lat = &latents[r % n_latent];
                let own = loading * (1.0 + 0.1 * r as f64);
                for t in 0..timepoints {
                    data.push(own * lat[t] + global[t] + normal(&mut rng, 0.5));
                }
            }
        }
        let values = DenseMatrix::new(n, timepoints, data).expect("consistent shape");
        series.push(RoiTimeSeries::new(format!("sub{s:02}"), values).expect("finite series"));
    }

    let roi_labels = (0..n)
        .map(|i| format!("{}_{}", NetworkId::ALL[i / rois_per_network].code(), i % rois_per_network))
        .collect();
    let mut vertex_roi = Vec::new();
    let mut vertex_network = Vec::new();
    for roi in 0..n {
        let net = NetworkId::ALL[roi / rois_per_network];
        for _ in 0..4 {
            vertex_roi.push(Some(roi));
            vertex_network.push(Some(net));
        }
        // one boundary vertex bleeding into the next network
        vertex_roi.push(Some(roi));
        vertex_network.push(Some(NetworkId::ALL[(net.index() + 1) % 7]));
    }
    vertex_roi.push(None);
    vertex_network.push(Some(NetworkId::Visual));
    vertex_roi.push(Some(0));
    vertex_network.push(None);
    SyntheticBrain {
        series,
        roi_labels,
        vertex_roi,
        vertex_network,
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticModel {
    pub model_id: String,
    pub scheme: PositionalScheme,
    pub modality: Modality,
    pub pos_embed: Option<PositionalEmbedding>,
    pub heads: Vec<HeadWeights>,
    pub shared_rel_bias: bool,
}

fn sinusoidal(tokens: usize, dim: usize, rng: &mut ChaCha8Rng, noise: f64) -> DenseMatrix {
    let mut data = Vec::with_capacity(tokens * dim);
    for t in 0..tokens {
        for c in 0..dim {
            let freq = 1.0 / 10f64.powf((c / 2) as f64 * 2.0 / dim as f64);
            let angle = t as f64 * freq;
            let v = if c % 2 == 0 { angle.sin() } else { angle.cos() };
            data.push(v + normal(rng, noise));
        }
    }
    DenseMatrix::new(tokens, dim, data).expect("consistent shape")
}

fn random_matrix(rows: usize, cols: usize, sd: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| normal(rng, sd)).collect()).expect("consistent shape")
}

fn heads(
    model_id: &str,
    layers: usize,
    num_heads: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
    bias: impl Fn(usize, &mut ChaCha8Rng) -> Option<DenseMatrix>,
) -> Vec<HeadWeights> {
    let d_h = d / num_heads;
    let mut out = Vec::with_capacity(layers * num_heads);
    for l in 0..layers {
        let r = bias(l, rng);
        for h in 0..num_heads {
            let sd = 0.4 + 0.3 * (l * num_heads + h) as f64;
            let head_ref = HeadRef {
                model_id: model_id.into(),
                layer: l,
                head: h,
            };
            let w_q = random_matrix(d, d_h, sd, rng);
            let w_k = random_matrix(d, d_h, sd, rng);
            out.push(HeadWeights::new(head_ref, w_q, w_k, r.clone(), d, num_heads).expect("valid head"));
        }
    }
    out
}

/// The 50-token language base embedding used for rotary models.
pub fn language_base(seed: u64, dim: usize) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xba5e);
    sinusoidal(50, dim, &mut rng, 0.05)
}

/// Three 2-layer, 2-head models: `toy_absolute`, `toy_relbias` (shared
/// per-layer bias on top of an absolute embedding) and `toy_rope`.
pub fn synthetic_models(seed: u64) -> Vec<SyntheticModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 8;

    let p = PositionalEmbedding::new(sinusoidal(12, d, &mut rng, 0.1)).expect("valid embedding");
    let absolute = SyntheticModel {
        model_id: "toy_absolute".into(),
        scheme: PositionalScheme::Absolute,
        modality: Modality::Vision,
        heads: heads("toy_absolute", 2, 2, d, &mut rng, |_, _| None),
        pos_embed: Some(p),
        shared_rel_bias: false,
    };

    let n = 10;
    let p = PositionalEmbedding::new(sinusoidal(n, d, &mut rng, 0.1)).expect("valid embedding");
    let relbias = SyntheticModel {
        model_id: "toy_relbias".into(),
        scheme: PositionalScheme::RelativeBias,
        modality: Modality::Vision,
        heads: heads("toy_relbias", 2, 2, d, &mut rng, |l, rng| {
            let slope = 0.5 + l as f64;
            let data = (0..n * n)
                .map(|k| -slope * ((k / n) as f64 - (k % n) as f64).abs() + normal(rng, 0.05))
                .collect();
            Some(DenseMatrix::new(n, n, data).expect("square bias"))
        }),
        pos_embed: Some(p),
        shared_rel_bias: true,
    };

    let rope = SyntheticModel {
        model_id: "toy_rope".into(),
        scheme: PositionalScheme::Rope,
        modality: Modality::Language,
        heads: heads("toy_rope", 2, 2, d, &mut rng, |_, _| None),
        pos_embed: None,
        shared_rel_bias: false,
    };
    vec![absolute, relbias, rope]
}
