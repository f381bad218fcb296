//! BSM-1 matrix directories: `manifest.json` plus raw little-endian `f64`
//! values in `data.bin`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::json::{read_json, write_json};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, DistanceMatrix, GraphPair};
use crate::matrix::DenseMatrix;

pub const BSM_FORMAT_VERSION: &str = "bsm-1";
const DTYPE: &str = "f64le";
const BYTE_ORDER: &str = "little";
const MANIFEST: &str = "manifest.json";
const DATA: &str = "data.bin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsmManifest {
    pub format_version: String,
    pub n: usize,
    pub directed: bool,
    pub dtype: String,
    pub byte_order: String,
    pub shape: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A matrix read from disk with its manifest metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct BsmMatrix {
    pub matrix: DenseMatrix,
    pub directed: bool,
    pub labels: Option<Vec<String>>,
}

pub fn write_bsm(dir: &Path, m: &DenseMatrix, directed: bool, labels: Option<&[String]>) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != m.rows() {
            return Err(Error::invalid(format!(
                "{} labels for a matrix with {} rows",
                l.len(),
                m.rows()
            )));
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = BsmManifest {
        format_version: BSM_FORMAT_VERSION.into(),
        n: m.rows(),
        directed,
        dtype: DTYPE.into(),
        byte_order: BYTE_ORDER.into(),
        shape: [m.rows(), m.cols()],
        labels: labels.map(<[String]>::to_vec),
    };
    write_json(&dir.join(MANIFEST), &manifest)?;
    let bytes: Vec<u8> = m.as_slice().iter().flat_map(|v| v.to_le_bytes()).collect();
    let path = dir.join(DATA);
    fs::write(&path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_bsm(dir: &Path) -> Result<BsmMatrix> {
    let manifest_path = dir.join(MANIFEST);
    let man: BsmManifest = read_json(&manifest_path)?;
    let bad = |reason: String| Err(Error::format(&manifest_path, reason));
    if man.format_version != BSM_FORMAT_VERSION {
        return bad(format!("format_version '{}', expected '{BSM_FORMAT_VERSION}'", man.format_version));
    }
    if man.dtype != DTYPE || man.byte_order != BYTE_ORDER {
        return bad(format!("unsupported dtype '{}' / byte order '{}'", man.dtype, man.byte_order));
    }
    let [rows, cols] = man.shape;
    if rows != man.n {
        return bad(format!("n = {} but shape is {rows}×{cols}", man.n));
    }
    if let Some(l) = &man.labels {
        if l.len() != rows {
            return bad(format!("{} labels for {rows} rows", l.len()));
        }
    }
    let data_path = dir.join(DATA);
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::format(&manifest_path, "shape overflows"))?;
    if bytes.len() != expected {
        return Err(Error::format(
            &data_path,
            format!("{} bytes, expected {expected} for shape {rows}×{cols}", bytes.len()),
        ));
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if data.iter().any(|v| v.is_nan()) {
        return Err(Error::format(&data_path, "matrix contains NaN"));
    }
    Ok(BsmMatrix {
        matrix: DenseMatrix::new(rows, cols, data)?,
        directed: man.directed,
        labels: man.labels,
    })
}

pub fn write_adjacency(dir: &Path, a: &AdjacencyMatrix, labels: Option<&[String]>) -> Result<()> {
    write_bsm(dir, a.weights(), a.is_directed(), labels)
}

/// Reads a square connectivity matrix; self-loops are permitted only when the
/// stored diagonal is nonzero.
pub fn read_adjacency(dir: &Path) -> Result<AdjacencyMatrix> {
    let m = read_bsm(dir)?;
    let self_loops = (0..m.matrix.rows().min(m.matrix.cols())).any(|i| m.matrix.get(i, i) != 0.0);
    AdjacencyMatrix::new(m.matrix, m.directed, self_loops).map_err(|e| Error::format(dir, e.to_string()))
}

/// Writes `conn/` and `dist/` BSM-1 directories under `dir`.
pub fn write_graph_pair(dir: &Path, g: &GraphPair, labels: Option<&[String]>) -> Result<()> {
    write_adjacency(&dir.join("conn"), &g.conn, labels)?;
    let n = g.dist.n();
    let dist = DenseMatrix::new(n, n, g.dist.as_slice().to_vec())?;
    write_bsm(&dir.join("dist"), &dist, false, labels)
}

pub fn read_graph_pair(dir: &Path) -> Result<GraphPair> {
    let conn = read_adjacency(&dir.join("conn"))?;
    let dist_dir = dir.join("dist");
    let d = read_bsm(&dist_dir)?.matrix;
    if d.rows() != d.cols() {
        return Err(Error::format(dist_dir, "distance matrix is not square"));
    }
    let dist = DistanceMatrix::new(d.rows(), d.into_vec()).map_err(|e| Error::format(&dist_dir, e.to_string()))?;
    GraphPair::new(conn, dist).map_err(|e| Error::format(dir, e.to_string()))
}
