//! BSE-1 model bundles: a `model.json` manifest indexing one BSM-1 matrix
//! directory per tensor.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bsm::{read_bsm, write_bsm};
use super::json::{read_json, write_json};
use crate::attention::{HeadRef, HeadWeights, PositionalEmbedding};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const BSE_FORMAT_VERSION: &str = "bse-1";
const MODEL_JSON: &str = "model.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionalScheme {
    Absolute,
    Learnable,
    RelativeBias,
    Rope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Vision,
    Language,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    /// BSM-1 directory, relative to the bundle root.
    pub file: String,
    pub shape: [usize; 2],
    pub dtype: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    pub model_id: String,
    pub num_layers: usize,
    pub num_heads: usize,
    pub d: usize,
    pub token_count: usize,
    pub positional_scheme: PositionalScheme,
    pub modality: Modality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub architecture: Option<String>,
    pub tensors: BTreeMap<String, TensorEntry>,
}

/// A loaded bundle: manifest, optional absolute embedding and every head in
/// `(layer, head)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub manifest: ModelManifest,
    pub pos_embed: Option<PositionalEmbedding>,
    pub heads: Vec<HeadWeights>,
}

pub fn pos_embed_name() -> String {
    "pos_embed".into()
}

pub fn w_q_name(layer: usize, head: usize) -> String {
    format!("layer{layer}.head{head}.w_q")
}

pub fn w_k_name(layer: usize, head: usize) -> String {
    format!("layer{layer}.head{head}.w_k")
}

pub fn layer_bias_name(layer: usize) -> String {
    format!("layer{layer}.rel_bias")
}

pub fn head_bias_name(layer: usize, head: usize) -> String {
    format!("layer{layer}.head{head}.rel_bias")
}

fn load_tensor(root: &Path, man_path: &Path, man: &ModelManifest, name: &str) -> Result<Option<DenseMatrix>> {
    let Some(entry) = man.tensors.get(name) else {
        return Ok(None);
    };
    if entry.dtype != "f64le" {
        return Err(Error::format(man_path, format!("tensor {name}: unsupported dtype '{}'", entry.dtype)));
    }
    let m = read_bsm(&root.join(&entry.file))?.matrix;
    if [m.rows(), m.cols()] != entry.shape {
        return Err(Error::format(
            man_path,
            format!(
                "tensor {name}: declared shape {:?}, stored {}×{}",
                entry.shape,
                m.rows(),
                m.cols()
            ),
        ));
    }
    Ok(Some(m))
}

fn require_shape(man_path: &Path, name: &str, m: &DenseMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::format(
            man_path,
            format!("tensor {name} is {}×{}, expected {rows}×{cols}", m.rows(), m.cols()),
        ));
    }
    Ok(())
}

pub fn read_bundle(root: &Path) -> Result<ModelBundle> {
    let man_path = root.join(MODEL_JSON);
    let man: ModelManifest = read_json(&man_path)?;
    if let Some(v) = &man.format_version {
        if v != BSE_FORMAT_VERSION {
            return Err(Error::format(&man_path, format!("format_version '{v}', expected '{BSE_FORMAT_VERSION}'")));
        }
    }
    let (d, h_count) = (man.d, man.num_heads);
    if h_count == 0 || d == 0 || !d.is_multiple_of(h_count) {
        return Err(Error::format(&man_path, format!("d = {d} is not divisible by num_heads = {h_count}")));
    }
    if man.num_layers == 0 {
        return Err(Error::format(&man_path, "num_layers must be positive"));
    }
    let d_h = d / h_count;
    let n = man.token_count;

    let pos = load_tensor(root, &man_path, &man, &pos_embed_name())?;
    let pos_embed = match (man.positional_scheme, pos) {
        (PositionalScheme::Rope, Some(_)) => {
            return Err(Error::format(&man_path, "rope bundles must not carry pos_embed"));
        }
        (PositionalScheme::Absolute | PositionalScheme::Learnable, None) => {
            return Err(Error::format(&man_path, "missing tensor pos_embed"));
        }
        (_, Some(p)) => {
            require_shape(&man_path, "pos_embed", &p, n, d)?;
            Some(PositionalEmbedding::new(p).map_err(|e| Error::format(&man_path, e.to_string()))?)
        }
        (_, None) => None,
    };

    let mut heads = Vec::with_capacity(man.num_layers * h_count);
    for l in 0..man.num_layers {
        let shared = load_tensor(root, &man_path, &man, &layer_bias_name(l))?;
        if let Some(r) = &shared {
            require_shape(&man_path, &layer_bias_name(l), r, n, n)?;
        }
        for h in 0..h_count {
            let fetch = |name: String| -> Result<DenseMatrix> {
                let m = load_tensor(root, &man_path, &man, &name)?
                    .ok_or_else(|| Error::format(&man_path, format!("missing tensor {name}")))?;
                require_shape(&man_path, &name, &m, d, d_h)?;
                Ok(m)
            };
            let w_q = fetch(w_q_name(l, h))?;
            let w_k = fetch(w_k_name(l, h))?;
            let own = load_tensor(root, &man_path, &man, &head_bias_name(l, h))?;
            if own.is_some() && shared.is_some() {
                return Err(Error::format(
                    &man_path,
                    format!("layer {l} has both a shared and a per-head relative bias"),
                ));
            }
            if let Some(r) = &own {
                require_shape(&man_path, &head_bias_name(l, h), r, n, n)?;
            }
            let rel_bias = own.or_else(|| shared.clone());
            if man.positional_scheme == PositionalScheme::RelativeBias && rel_bias.is_none() {
                return Err(Error::format(&man_path, format!("layer {l} head {h} has no relative bias")));
            }
            let head_ref = HeadRef {
                model_id: man.model_id.clone(),
                layer: l,
                head: h,
            };
            heads.push(
                HeadWeights::new(head_ref, w_q, w_k, rel_bias, d, h_count)
                    .map_err(|e| Error::format(&man_path, e.to_string()))?,
            );
        }
    }
    Ok(ModelBundle {
        manifest: man,
        pos_embed,
        heads,
    })
}

/// Writes a bundle. With `shared_rel_bias`, each layer's bias is stored once
/// and must be identical across that layer's heads.
pub fn write_bundle(
    root: &Path,
    model_id: &str,
    scheme: PositionalScheme,
    modality: Modality,
    pos_embed: Option<&PositionalEmbedding>,
    heads: &[HeadWeights],
    shared_rel_bias: bool,
) -> Result<ModelManifest> {
    let first = heads.first().ok_or_else(|| Error::invalid("bundle needs at least one head"))?;
    let (d, h_count) = (first.d(), first.num_heads());
    if !heads.len().is_multiple_of(h_count) {
        return Err(Error::invalid("head count is not a multiple of heads per layer"));
    }
    let num_layers = heads.len() / h_count;
    for (i, hw) in heads.iter().enumerate() {
        if hw.d() != d || hw.num_heads() != h_count || hw.head_ref.layer != i / h_count || hw.head_ref.head != i % h_count {
            return Err(Error::invalid("heads must be uniform and listed in (layer, head) order"));
        }
    }
    let token_count = pos_embed
        .map(PositionalEmbedding::tokens)
        .or_else(|| heads.iter().find_map(|h| h.rel_bias().map(DenseMatrix::rows)))
        .unwrap_or(0);
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;

    let mut tensors = BTreeMap::new();
    let mut put = |name: String, m: &DenseMatrix| -> Result<()> {
        write_bsm(&root.join(&name), m, false, None)?;
        tensors.insert(
            name.clone(),
            TensorEntry {
                file: name,
                shape: [m.rows(), m.cols()],
                dtype: "f64le".into(),
            },
        );
        Ok(())
    };
    if let Some(p) = pos_embed {
        put(pos_embed_name(), p.values())?;
    }
    for (l, layer) in heads.chunks(h_count).enumerate() {
        if shared_rel_bias {
            if let Some(r) = layer[0].rel_bias() {
                if layer.iter().any(|h| h.rel_bias() != Some(r)) {
                    return Err(Error::invalid(format!("layer {l} heads do not share one bias")));
                }
                put(layer_bias_name(l), r)?;
            }
        }
        for (h, hw) in layer.iter().enumerate() {
            put(w_q_name(l, h), hw.w_q())?;
            put(w_k_name(l, h), hw.w_k())?;
            if !shared_rel_bias {
                if let Some(r) = hw.rel_bias() {
                    put(head_bias_name(l, h), r)?;
                }
            }
        }
    }
    let manifest = ModelManifest {
        format_version: Some(BSE_FORMAT_VERSION.into()),
        model_id: model_id.into(),
        num_layers,
        num_heads: h_count,
        d,
        token_count,
        positional_scheme: scheme,
        modality,
        architecture: None,
        tensors,
    };
    write_json(&root.join(MODEL_JSON), &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(r: usize, c: usize, seed: f64) -> DenseMatrix {
        DenseMatrix::new(r, c, (0..r * c).map(|i| ((i as f64 + seed) * 0.37).sin()).collect()).unwrap()
    }

    fn heads(bias: Option<DenseMatrix>) -> Vec<HeadWeights> {
        let mut out = Vec::new();
        for l in 0..2 {
            for h in 0..2 {
                let r = HeadRef { model_id: "toy".into(), layer: l, head: h };
                let s = (l * 2 + h) as f64;
                out.push(HeadWeights::new(r, mat(4, 2, s), mat(4, 2, s + 10.0), bias.clone(), 4, 2).unwrap());
            }
        }
        out
    }

    #[test]
    fn absolute_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let p = PositionalEmbedding::new(mat(5, 4, 0.5)).unwrap();
        let hs = heads(None);
        let man = write_bundle(tmp.path(), "toy", PositionalScheme::Absolute, Modality::Vision, Some(&p), &hs, false).unwrap();
        assert_eq!(man.tensors.len(), 9);
        let b = read_bundle(tmp.path()).unwrap();
        assert_eq!(b.heads, hs);
        assert_eq!(b.pos_embed, Some(p));
        assert_eq!(b.manifest.token_count, 5);
    }

    #[test]
    fn shared_bias_broadcast() {
        let tmp = tempfile::tempdir().unwrap();
        let hs = heads(Some(mat(5, 5, 3.0)));
        let man = write_bundle(tmp.path(), "toy", PositionalScheme::RelativeBias, Modality::Vision, None, &hs, true).unwrap();
        assert!(man.tensors.contains_key("layer1.rel_bias"));
        assert!(!man.tensors.contains_key("layer1.head0.rel_bias"));
        let b = read_bundle(tmp.path()).unwrap();
        assert_eq!(b.heads, hs);
    }

    #[test]
    fn missing_tensor_and_bad_shape() {
        let tmp = tempfile::tempdir().unwrap();
        let p = PositionalEmbedding::new(mat(5, 4, 0.5)).unwrap();
        write_bundle(tmp.path(), "toy", PositionalScheme::Absolute, Modality::Vision, Some(&p), &heads(None), false).unwrap();
        let path = tmp.path().join(MODEL_JSON);
        let mut man: ModelManifest = read_json(&path).unwrap();
        man.token_count = 6;
        write_json(&path, &man).unwrap();
        assert!(matches!(read_bundle(tmp.path()), Err(Error::Format { .. })));
        man.token_count = 5;
        man.tensors.remove("layer1.head1.w_k");
        write_json(&path, &man).unwrap();
        let err = read_bundle(tmp.path()).unwrap_err().to_string();
        assert!(err.contains("layer1.head1.w_k"), "{err}");
    }

    #[test]
    fn rope_rejects_pos_embed() {
        let tmp = tempfile::tempdir().unwrap();
        let p = PositionalEmbedding::new(mat(5, 4, 0.5)).unwrap();
        write_bundle(tmp.path(), "toy", PositionalScheme::Rope, Modality::Language, Some(&p), &heads(None), false).unwrap();
        assert!(read_bundle(tmp.path()).is_err());
    }
}
