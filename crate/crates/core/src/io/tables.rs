//! CSV tables: matrices, ROI time series, vertex labels, feature vectors,
//! head reports and accuracy lists.

use std::fs::File;
use std::path::Path;

use crate::attention::HeadRef;
use crate::brain::{NetworkId, RoiTimeSeries};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::metrics::{FeatureVector, FEATURE_NAMES};
use crate::space::{HeadFeatures, SpaceReport};

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::format(path, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec);
    }
    Ok(out)
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))
}

fn finish(path: &Path, mut w: csv::Writer<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn put(path: &Path, w: &mut csv::Writer<File>, row: &[String]) -> Result<()> {
    w.write_record(row).map_err(|e| Error::format(path, e.to_string()))
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| Error::format(path, format!("line {line}: '{field}' is not a number")))
}

fn parse_int<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field
        .parse::<T>()
        .map_err(|_| Error::format(path, format!("line {line}: '{field}' is not an integer")))
}

fn expect_header(path: &Path, rec: Option<&csv::StringRecord>, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = rec.map(|r| r.iter().collect()).unwrap_or_default();
    if got != expected {
        return Err(Error::format(
            path,
            format!("header {:?}, expected {:?}", got, expected),
        ));
    }
    Ok(())
}

/// Square matrix with a header row of node labels.
pub fn read_matrix_csv(path: &Path) -> Result<(DenseMatrix, Vec<String>)> {
    let recs = records(path)?;
    let (header, body) = recs
        .split_first()
        .ok_or_else(|| Error::format(path, "empty file"))?;
    let labels: Vec<String> = header.iter().map(str::to_string).collect();
    let n = labels.len();
    if body.len() != n {
        return Err(Error::format(path, format!("{n} labels but {} data rows", body.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != n {
            return Err(Error::format(path, format!("line {}: {} fields, expected {n}", i + 2, rec.len())));
        }
        for f in rec {
            data.push(parse_f64(path, i + 2, f)?);
        }
    }
    Ok((DenseMatrix::new(n, n, data)?, labels))
}

pub fn write_matrix_csv(path: &Path, m: &DenseMatrix, labels: &[String]) -> Result<()> {
    if labels.len() != m.cols() {
        return Err(Error::invalid("one label per column required"));
    }
    let mut w = writer(path)?;
    put(path, &mut w, labels)?;
    for i in 0..m.rows() {
        put(path, &mut w, &m.row(i).iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>())?;
    }
    finish(path, w)
}

/// One ROI per row: a label followed by its samples. A first row whose
/// second field is not numeric is taken as a header and skipped.
pub fn read_timeseries_csv(path: &Path, subject_id: &str) -> Result<(RoiTimeSeries, Vec<String>)> {
    let recs = records(path)?;
    let skip = recs
        .first()
        .and_then(|r| r.get(1))
        .is_some_and(|f| f.parse::<f64>().is_err());
    let body = &recs[usize::from(skip)..];
    let Some(first) = body.first() else {
        return Err(Error::format(path, "no ROI rows"));
    };
    let t = first.len().saturating_sub(1);
    let mut labels = Vec::with_capacity(body.len());
    let mut data = Vec::with_capacity(body.len() * t);
    for (i, rec) in body.iter().enumerate() {
        let line = i + 1 + usize::from(skip);
        if rec.len() != t + 1 {
            return Err(Error::format(path, format!("line {line}: {} fields, expected {}", rec.len(), t + 1)));
        }
        labels.push(rec[0].to_string());
        for f in rec.iter().skip(1) {
            data.push(parse_f64(path, line, f)?);
        }
    }
    let values = DenseMatrix::new(body.len(), t, data)?;
    let ts = RoiTimeSeries::new(subject_id, values).map_err(|e| Error::format(path, e.to_string()))?;
    Ok((ts, labels))
}

/// Per-vertex labels for Dice assignment: an ROI index (negative means
/// unlabeled) and a network given either by its atlas code (0 means
/// unlabeled) or by name. An optional header row is skipped.
pub fn read_vertex_labels(path: &Path) -> Result<(Vec<Option<usize>>, Vec<Option<NetworkId>>)> {
    let recs = records(path)?;
    let skip = recs
        .first()
        .and_then(|r| r.get(0))
        .is_some_and(|f| f.parse::<i64>().is_err());
    let mut rois = Vec::new();
    let mut nets = Vec::new();
    for (i, rec) in recs.iter().enumerate().skip(usize::from(skip)) {
        let line = i + 1;
        if rec.len() != 2 {
            return Err(Error::format(path, format!("line {line}: expected 2 columns, got {}", rec.len())));
        }
        let roi: i64 = parse_int(path, line, &rec[0])?;
        rois.push(usize::try_from(roi).ok());
        let net = match rec[1].parse::<i64>() {
            Ok(0) => None,
            Ok(code) => Some(NetworkId::from_atlas_code(code).ok_or_else(|| {
                Error::format(path, format!("line {line}: unknown network code {code}"))
            })?),
            Err(_) => Some(
                rec[1]
                    .parse::<NetworkId>()
                    .map_err(|_| Error::format(path, format!("line {line}: unknown network '{}'", &rec[1])))?,
            ),
        };
        nets.push(net);
    }
    if rois.is_empty() {
        return Err(Error::format(path, "no vertex rows"));
    }
    Ok((rois, nets))
}

fn features_from(path: &Path, line: usize, fields: &[&str]) -> Result<FeatureVector> {
    let mut v = [0.0; 5];
    for (slot, f) in v.iter_mut().zip(fields) {
        *slot = parse_f64(path, line, f)?;
    }
    Ok(FeatureVector::from_array(v))
}

fn feature_fields(f: &FeatureVector) -> impl Iterator<Item = String> {
    f.to_array().into_iter().map(fmt_f64)
}

pub fn write_head_features(path: &Path, heads: &[HeadFeatures]) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["model_id".to_string(), "layer".into(), "head".into()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    put(path, &mut w, &header)?;
    for h in heads {
        let mut row = vec![
            h.head_ref.model_id.clone(),
            h.head_ref.layer.to_string(),
            h.head_ref.head.to_string(),
        ];
        row.extend(feature_fields(&h.features));
        put(path, &mut w, &row)?;
    }
    finish(path, w)
}

pub fn read_head_features(path: &Path) -> Result<Vec<HeadFeatures>> {
    let recs = records(path)?;
    let mut expected = vec!["model_id", "layer", "head"];
    expected.extend(FEATURE_NAMES);
    expect_header(path, recs.first(), &expected)?;
    let mut out = Vec::with_capacity(recs.len().saturating_sub(1));
    for (i, rec) in recs.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != expected.len() {
            return Err(Error::format(path, format!("line {line}: {} fields, expected {}", rec.len(), expected.len())));
        }
        let fields: Vec<&str> = rec.iter().collect();
        out.push(HeadFeatures {
            head_ref: HeadRef {
                model_id: fields[0].to_string(),
                layer: parse_int(path, line, fields[1])?,
                head: parse_int(path, line, fields[2])?,
            },
            features: features_from(path, line, &fields[3..])?,
        });
    }
    Ok(out)
}

pub fn write_brain_features(path: &Path, brains: &[FeatureVector; 7]) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["network".to_string()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    put(path, &mut w, &header)?;
    for (net, f) in NetworkId::ALL.iter().zip(brains) {
        let mut row = vec![net.code().to_string()];
        row.extend(feature_fields(f));
        put(path, &mut w, &row)?;
    }
    finish(path, w)
}

/// Reads exactly one row per network, in any order.
pub fn read_brain_features(path: &Path) -> Result<[FeatureVector; 7]> {
    let recs = records(path)?;
    let mut expected = vec!["network"];
    expected.extend(FEATURE_NAMES);
    expect_header(path, recs.first(), &expected)?;
    let mut slots: [Option<FeatureVector>; 7] = [None; 7];
    for (i, rec) in recs.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != expected.len() {
            return Err(Error::format(path, format!("line {line}: {} fields, expected {}", rec.len(), expected.len())));
        }
        let fields: Vec<&str> = rec.iter().collect();
        let net: NetworkId = fields[0]
            .parse()
            .map_err(|_| Error::format(path, format!("line {line}: unknown network '{}'", fields[0])))?;
        if slots[net.index()].is_some() {
            return Err(Error::format(path, format!("line {line}: {net} listed twice")));
        }
        slots[net.index()] = Some(features_from(path, line, &fields[1..])?);
    }
    let mut out = [FeatureVector::from_array([0.0; 5]); 7];
    for (i, s) in slots.into_iter().enumerate() {
        out[i] = s.ok_or_else(|| Error::format(path, format!("missing network {}", NetworkId::ALL[i])))?;
    }
    Ok(out)
}

/// One head of a persisted report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model_id: String,
    pub layer: usize,
    pub head: usize,
    pub similarity: [f64; 7],
    pub pc1: f64,
    pub pc2: f64,
    pub cluster: usize,
    pub matched: Option<NetworkId>,
}

fn report_header() -> Vec<String> {
    let mut h = vec!["model_id".to_string(), "layer".into(), "head".into()];
    h.extend(NetworkId::ALL.iter().map(|n| format!("s_{}", n.code())));
    h.extend(["pc1", "pc2", "cluster", "match"].map(String::from));
    h
}

pub fn write_report_csv(path: &Path, report: &SpaceReport) -> Result<()> {
    let mut w = writer(path)?;
    put(path, &mut w, &report_header())?;
    for m in &report.models {
        for h in &m.heads {
            let mut row = vec![m.model_id.clone(), h.layer.to_string(), h.head.to_string()];
            row.extend(h.similarity.iter().map(|&v| fmt_f64(v)));
            row.push(fmt_f64(h.pc1));
            row.push(fmt_f64(h.pc2));
            row.push(format!("C{}", h.cluster));
            row.push(h.matched.map_or("none".into(), |n| n.code().to_string()));
            put(path, &mut w, &row)?;
        }
    }
    finish(path, w)
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let recs = records(path)?;
    let header = report_header();
    let expected: Vec<&str> = header.iter().map(String::as_str).collect();
    expect_header(path, recs.first(), &expected)?;
    let mut out = Vec::new();
    for (i, rec) in recs.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != expected.len() {
            return Err(Error::format(path, format!("line {line}: {} fields, expected {}", rec.len(), expected.len())));
        }
        let f: Vec<&str> = rec.iter().collect();
        let mut similarity = [0.0; 7];
        for (s, v) in similarity.iter_mut().zip(&f[3..10]) {
            *s = parse_f64(path, line, v)?;
        }
        let cluster = f[12]
            .strip_prefix('C')
            .and_then(|c| c.parse::<usize>().ok())
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::format(path, format!("line {line}: bad cluster '{}'", f[12])))?;
        let matched = match f[13] {
            "none" => None,
            s => Some(
                s.parse::<NetworkId>()
                    .map_err(|_| Error::format(path, format!("line {line}: unknown network '{s}'")))?,
            ),
        };
        out.push(ReportRow {
            model_id: f[0].to_string(),
            layer: parse_int(path, line, f[1])?,
            head: parse_int(path, line, f[2])?,
            similarity,
            pc1: parse_f64(path, line, f[10])?,
            pc2: parse_f64(path, line, f[11])?,
            cluster,
            matched,
        });
    }
    Ok(out)
}

/// `model_id,accuracy` rows; model ids must be unique.
pub fn read_accuracy_csv(path: &Path) -> Result<Vec<(String, f64)>> {
    let recs = records(path)?;
    expect_header(path, recs.first(), &["model_id", "accuracy"])?;
    let mut out: Vec<(String, f64)> = Vec::new();
    for (i, rec) in recs.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != 2 {
            return Err(Error::format(path, format!("line {line}: expected 2 fields, got {}", rec.len())));
        }
        let acc = parse_f64(path, line, &rec[1])?;
        if !acc.is_finite() {
            return Err(Error::format(path, format!("line {line}: accuracy must be finite")));
        }
        if out.iter().any(|(m, _)| m == &rec[0]) {
            return Err(Error::format(path, format!("line {line}: duplicate model '{}'", &rec[0])));
        }
        out.push((rec[0].to_string(), acc));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn tmpfile(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn matrix_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = DenseMatrix::from_rows(&[[0.0, 0.1], [1.0 / 3.0, f64::INFINITY]]).unwrap();
        let labels = vec!["a".to_string(), "b,c".to_string()];
        let p = dir.path().join("m.csv");
        write_matrix_csv(&p, &m, &labels).unwrap();
        let (back, l) = read_matrix_csv(&p).unwrap();
        assert_eq!(back, m);
        assert_eq!(l, labels);
    }

    #[test]
    fn timeseries_with_and_without_header() {
        let dir = tempfile::tempdir().unwrap();
        let a = tmpfile(&dir, "a.csv", "roi,t0,t1,t2\nr0,1,2,3\nr1,3,1,2\n");
        let b = tmpfile(&dir, "b.csv", "r0,1,2,3\nr1,3,1,2\n");
        let (ta, la) = read_timeseries_csv(&a, "s").unwrap();
        let (tb, _) = read_timeseries_csv(&b, "s").unwrap();
        assert_eq!(ta.values(), tb.values());
        assert_eq!(la, vec!["r0", "r1"]);
        let bad = tmpfile(&dir, "c.csv", "r0,1,2,3\nr1,3,x,2\n");
        assert!(matches!(read_timeseries_csv(&bad, "s"), Err(Error::Format { .. })));
    }

    #[test]
    fn vertex_labels_codes_and_names() {
        let dir = tempfile::tempdir().unwrap();
        let p = tmpfile(&dir, "v.csv", "roi,network\n0,1\n1,DMN\n-1,0\n2,0\n");
        let (r, n) = read_vertex_labels(&p).unwrap();
        assert_eq!(r, vec![Some(0), Some(1), None, Some(2)]);
        assert_eq!(n, vec![Some(NetworkId::Visual), Some(NetworkId::DefaultMode), None, None]);
        let bad = tmpfile(&dir, "w.csv", "0,9\n");
        assert!(read_vertex_labels(&bad).is_err());
    }

    #[test]
    fn feature_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let heads = vec![HeadFeatures {
            head_ref: HeadRef { model_id: "m".into(), layer: 1, head: 2 },
            features: FeatureVector::from_array([0.1, 0.2, 1e-17, 3.0, 1.0 / 7.0]),
        }];
        let p = dir.path().join("h.csv");
        write_head_features(&p, &heads).unwrap();
        assert_eq!(read_head_features(&p).unwrap(), heads);

        let brains: [FeatureVector; 7] = std::array::from_fn(|i| FeatureVector::from_array([i as f64 + 0.5; 5]));
        let q = dir.path().join("b.csv");
        write_brain_features(&q, &brains).unwrap();
        assert_eq!(read_brain_features(&q).unwrap(), brains);
    }

    #[test]
    fn accuracy_csv_validation() {
        let dir = tempfile::tempdir().unwrap();
        let ok = tmpfile(&dir, "a.csv", "model_id,accuracy\nm1,0.5\nm2,0.75\n");
        assert_eq!(read_accuracy_csv(&ok).unwrap().len(), 2);
        let dup = tmpfile(&dir, "b.csv", "model_id,accuracy\nm1,0.5\nm1,0.75\n");
        assert!(read_accuracy_csv(&dup).is_err());
        let hdr = tmpfile(&dir, "c.csv", "model,acc\nm1,0.5\n");
        assert!(read_accuracy_csv(&hdr).is_err());
        let val = tmpfile(&dir, "d.csv", "model_id,accuracy\nm1,high\n");
        assert!(matches!(read_accuracy_csv(&val), Err(Error::Format { .. })));
    }
}
