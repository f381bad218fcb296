#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use brainspace_core::io::{fmt_f64, write_bsm, write_bundle};
use brainspace_core::synthetic::{language_base, synthetic_brain, synthetic_models};

pub const SEED: u64 = 42;
pub const MODEL_IDS: [&str; 3] = ["toy_absolute", "toy_relbias", "toy_rope"];

pub struct Fixture {
    pub root: PathBuf,
    pub timeseries: Vec<PathBuf>,
    pub labels: PathBuf,
    pub bundles: Vec<PathBuf>,
    pub rope_base: PathBuf,
    pub accuracy: PathBuf,
}

/// Writes the synthetic inputs: three subjects' ROI time series, vertex
/// labels, three model bundles, a language base embedding and an accuracy
/// table.
pub fn write_fixture(root: &Path) -> Fixture {
    let inputs = root.join("inputs");
    fs::create_dir_all(&inputs).unwrap();

    let brain = synthetic_brain(7, 3, 6, 120);
    let mut timeseries = Vec::new();
    for ts in &brain.series {
        let mut text = String::new();
        for (i, label) in brain.roi_labels.iter().enumerate() {
            text.push_str(label);
            for v in ts.values().row(i) {
                text.push(',');
                text.push_str(&fmt_f64(*v));
            }
            text.push('\n');
        }
        let p = inputs.join(format!("{}.csv", ts.subject_id));
        fs::write(&p, text).unwrap();
        timeseries.push(p);
    }

    let mut labels = String::from("roi,network\n");
    for (r, n) in brain.vertex_roi.iter().zip(&brain.vertex_network) {
        let r = r.map_or(-1, |r| r as i64);
        let n = n.map_or(0, |n| match n.code() {
            "VIS" => 1,
            "SMN" => 2,
            "DAN" => 3,
            "VAN" => 4,
            "LIM" => 5,
            "FPN" => 6,
            _ => 7,
        });
        labels.push_str(&format!("{r},{n}\n"));
    }
    let labels_path = inputs.join("labels.csv");
    fs::write(&labels_path, labels).unwrap();

    let mut bundles = Vec::new();
    for m in synthetic_models(SEED) {
        let dir = inputs.join(&m.model_id);
        write_bundle(&dir, &m.model_id, m.scheme, m.modality, m.pos_embed.as_ref(), &m.heads, m.shared_rel_bias)
            .unwrap();
        bundles.push(dir);
    }
    let rope_base = inputs.join("language_base");
    write_bsm(&rope_base, &language_base(SEED, 6), false, None).unwrap();

    let accuracy = inputs.join("accuracy.csv");
    fs::write(&accuracy, "model_id,accuracy\ntoy_absolute,0.71\ntoy_relbias,0.64\ntoy_rope,0.80\n").unwrap();

    Fixture {
        root: root.to_path_buf(),
        timeseries,
        labels: labels_path,
        bundles,
        rope_base,
        accuracy,
    }
}

pub fn brainspace(args: &[&str]) -> Output {
    brainspace_env(args, &[])
}

pub fn brainspace_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_brainspace"));
    cmd.args(args).env_remove("BRAINSPACE_LOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn check(out: &Output, what: &str) -> Result<(), String> {
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{what} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

/// Runs every subcommand on the fixture, writing into `out`.
pub fn run_pipeline(fx: &Fixture, out: &Path, extra: &[&str]) -> Result<(), String> {
    let o = s(out);
    let mut args = vec!["build-brain", "--labels", s(&fx.labels), "--out", o, "--timeseries"];
    args.extend(fx.timeseries.iter().map(|p| s(p)));
    args.extend(extra);
    check(&brainspace(&args), "build-brain")?;

    for b in &fx.bundles {
        let mut args = vec!["build-model", "--bundle", s(b), "--out", o, "--rope-base", s(&fx.rope_base)];
        args.extend(extra);
        check(&brainspace(&args), "build-model")?;
    }

    let heads: Vec<PathBuf> = MODEL_IDS.iter().map(|m| out.join(format!("{m}.features.csv"))).collect();
    let brain = out.join("brain_features.csv");
    let space = out.join("space.json");
    let mut args = vec!["space", "fit", "--brain", s(&brain), "--out", o, "--heads"];
    args.extend(heads.iter().map(|p| s(p)));
    args.extend(extra);
    check(&brainspace(&args), "space fit")?;

    for cmd in ["match", "score"] {
        let mut args = vec![cmd, "--space", s(&space), "--out", o, "--heads"];
        args.extend(heads.iter().map(|p| s(p)));
        args.extend(extra);
        check(&brainspace(&args), cmd)?;
    }

    let report = out.join("report.json");
    let mut args = vec!["report", "--report", s(&report), "--accuracy", s(&fx.accuracy), "--out", o];
    args.extend(extra);
    check(&brainspace(&args), "report")?;
    Ok(())
}

/// Output files compared against the golden copies.
pub const GOLDEN_FILES: [&str; 13] = [
    "brain_features.csv",
    "toy_absolute.features.csv",
    "toy_relbias.features.csv",
    "toy_rope.features.csv",
    "space.json",
    "report.csv",
    "report.json",
    "matches.csv",
    "scores.csv",
    "clusters.csv",
    "network_matches.csv",
    "correlation.csv",
    "scatter.svg",
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

enum Token<'a> {
    Num(f64),
    Text(&'a str),
}

fn tokens(s: &str) -> Vec<Token<'_>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let numeric_start = |b: u8| b.is_ascii_digit() || b == b'-' || b == b'.';
    while i < bytes.len() {
        let start = i;
        if numeric_start(bytes[i]) {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || b"+-.".contains(&bytes[i])) {
                i += 1;
            }
            let word = &s[start..i];
            match word.parse::<f64>() {
                Ok(v) => out.push(Token::Num(v)),
                Err(_) => out.push(Token::Text(word)),
            }
        } else {
            while i < bytes.len() && !numeric_start(bytes[i]) {
                i += 1;
            }
            out.push(Token::Text(&s[start..i]));
        }
    }
    out
}

/// Compares text token by token: non-numeric text exactly, numbers within
/// `1e-9` absolute plus `1e-9` relative.
pub fn same_up_to_float_noise(actual: &str, golden: &str) -> Result<(), String> {
    let (a, g) = (tokens(actual), tokens(golden));
    if a.len() != g.len() {
        return Err(format!("token count {} vs golden {}", a.len(), g.len()));
    }
    for (k, (x, y)) in a.iter().zip(&g).enumerate() {
        match (x, y) {
            (Token::Num(x), Token::Num(y)) => {
                let ok = x == y || (x - y).abs() <= 1e-9 + 1e-9 * y.abs();
                if !ok {
                    return Err(format!("token {k}: {x} vs golden {y}"));
                }
            }
            (Token::Text(x), Token::Text(y)) if x == y => {}
            (Token::Text(x), Token::Text(y)) => return Err(format!("token {k}: '{x}' vs golden '{y}'")),
            _ => return Err(format!("token {k}: number/text mismatch")),
        }
    }
    Ok(())
}

/// Compares every golden file; with `BRAINSPACE_BLESS=1` the goldens are
/// rewritten from `out` instead.
pub fn compare_goldens(out: &Path) -> Result<(), String> {
    let dir = golden_dir();
    if std::env::var("BRAINSPACE_BLESS").as_deref() == Ok("1") {
        fs::create_dir_all(&dir).unwrap();
        for f in GOLDEN_FILES {
            fs::copy(out.join(f), dir.join(f)).unwrap();
        }
    }
    for f in GOLDEN_FILES {
        let actual = fs::read_to_string(out.join(f)).map_err(|e| format!("{f}: {e}"))?;
        let golden = fs::read_to_string(dir.join(f)).map_err(|e| format!("golden {f}: {e}"))?;
        same_up_to_float_noise(&actual, &golden).map_err(|e| format!("{f}: {e}"))?;
    }
    Ok(())
}

/// Every regular file under `dir`, relative path → bytes, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                out.push((p.strip_prefix(base).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out
}
