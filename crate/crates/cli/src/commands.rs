use std::fs;
use std::path::{Path, PathBuf};

use brainspace_core::attention::{BaseSource, RopePolicy};
use brainspace_core::brain::NetworkId;
use brainspace_core::io::{self, PositionalScheme};
use brainspace_core::metrics::feature_vector;
use brainspace_core::pipeline::{self, BrainInput, VertexLabels};
use brainspace_core::space::{correlate, ScoreMode, SpaceReport, StandardizationScope};
use brainspace_core::{
    AdjacencyMatrix, DenseMatrix, Error, HeadFeatures, NormalizationConstants, Result, SpaceConfig, SpaceModel,
};
use rayon::prelude::*;

use crate::{BaseKind, BuildBrainArgs, BuildModelArgs, Cli, Command, FitArgs, ReportArgs, ScopeArg, SpaceCommand, SpaceInputs};

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    if g.k_min < 2 || g.k_min > g.k_max {
        return Err(Error::InvalidInput(format!(
            "--k-min {} / --k-max {} must satisfy 2 <= k-min <= k-max",
            g.k_min, g.k_max
        )));
    }
    if !(g.threshold > 0.0 && g.threshold <= 1.0) {
        return Err(Error::InvalidInput(format!("--threshold {} outside (0, 1]", g.threshold)));
    }
    let constants = NormalizationConstants::new(g.epsilon, g.delta)?;
    fs::create_dir_all(&g.out).map_err(|e| io_error(&g.out, e))?;
    match &cli.command {
        Command::BuildBrain(a) => build_brain(cli, constants, a),
        Command::BuildModel(a) => build_model(cli, constants, a),
        Command::Space(SpaceCommand::Fit(a)) => space_fit(cli, a),
        Command::Space(SpaceCommand::Project(a)) => space_project(cli, a),
        Command::Match(a) => match_heads(cli, a),
        Command::Score(a) => score(cli, a),
        Command::Report(a) => report(cli, a),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// File-name-safe form of a model id.
fn file_stem(model_id: &str) -> String {
    model_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_matrix(path: &Path) -> Result<(DenseMatrix, Option<Vec<String>>)> {
    if path.is_dir() {
        let m = io::read_bsm(path)?;
        Ok((m.matrix, m.labels))
    } else {
        let (m, labels) = io::read_matrix_csv(path)?;
        Ok((m, Some(labels)))
    }
}

/// Connectivity matrix with its diagonal cleared; must be symmetric.
fn read_fc(path: &Path) -> Result<(AdjacencyMatrix, Option<Vec<String>>)> {
    let (mut m, labels) = read_matrix(path)?;
    if m.rows() != m.cols() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: "connectivity matrix is not square".into(),
        });
    }
    for i in 0..m.rows() {
        m.set(i, i, 0.0);
    }
    let a = AdjacencyMatrix::new(m, false, false).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok((a, labels))
}

fn subject_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn build_brain(cli: &Cli, c: NormalizationConstants, a: &BuildBrainArgs) -> Result<()> {
    let g = &cli.global;
    let (roi, network) = io::read_vertex_labels(&a.labels)?;
    let labels = VertexLabels { roi, network };

    let (input, roi_labels) = if !a.timeseries.is_empty() {
        let mut series = Vec::with_capacity(a.timeseries.len());
        let mut names: Option<Vec<String>> = None;
        for p in &a.timeseries {
            let (ts, l) = io::read_timeseries_csv(p, &subject_id(p))?;
            match &names {
                Some(first) if *first != l => {
                    return Err(Error::Format {
                        path: p.clone(),
                        reason: "ROI labels differ from the first subject".into(),
                    })
                }
                _ => names = Some(l),
            }
            series.push(ts);
        }
        (BrainInput::TimeSeries(series), names)
    } else if !a.subject_fc.is_empty() {
        let mut mats = Vec::with_capacity(a.subject_fc.len());
        let mut names = None;
        for p in &a.subject_fc {
            let (m, l) = read_fc(p)?;
            names = names.or(l);
            mats.push(m);
        }
        (BrainInput::SubjectFc(mats), names)
    } else {
        let p = a.from_fc.as_ref().expect("clap enforces one input source");
        let (m, l) = read_fc(p)?;
        (BrainInput::GroupFc(m), l)
    };

    let built = pipeline::build_brain_networks(input, &labels, c, !g.skip_brain_minmax)?;
    for w in &built.warnings {
        log::warn!("{w}");
    }
    let build = built.value;
    if let Some(l) = &roi_labels {
        if l.len() != build.group.n() {
            return Err(Error::InvalidInput(format!(
                "{} ROI labels for {} ROIs",
                l.len(),
                build.group.n()
            )));
        }
    }
    let brain_dir = g.out.join("brain");
    io::write_adjacency(&brain_dir.join("group_fc"), &build.group, roi_labels.as_deref())?;
    io::write_brain_networks(&brain_dir, &build.networks, c, !g.skip_brain_minmax, roi_labels.as_deref())?;
    let features = pipeline::brain_features(&build.networks, g.seed)?;
    let feat_path = g.out.join("brain_features.csv");
    io::write_brain_features(&feat_path, &features)?;
    for net in &build.networks {
        println!("{} {} ROIs", net.network, net.roi_indices.len());
    }
    println!("wrote {}", feat_path.display());
    Ok(())
}

fn build_model(cli: &Cli, c: NormalizationConstants, a: &BuildModelArgs) -> Result<()> {
    let g = &cli.global;
    let bundle = io::read_bundle(&a.bundle)?;
    let man = &bundle.manifest;
    let rope = match (&a.rope_base, man.positional_scheme) {
        (Some(path), PositionalScheme::Rope) => {
            let source = match a.rope_base_source {
                Some(BaseKind::Language) => BaseSource::LanguageBase,
                Some(BaseKind::Vision) => BaseSource::VisionBase,
                None => match man.modality {
                    io::Modality::Language => BaseSource::LanguageBase,
                    io::Modality::Vision => BaseSource::VisionBase,
                },
            };
            let base = io::read_bsm(path)?.matrix;
            Some(RopePolicy::new(source, base).map_err(|e| Error::Format {
                path: path.clone(),
                reason: e.to_string(),
            })?)
        }
        (None, PositionalScheme::Rope) => {
            return Err(Error::InvalidInput(format!(
                "{} uses rotary positions; pass --rope-base",
                man.model_id
            )));
        }
        (Some(_), _) => {
            log::warn!("{} is not a rotary model; --rope-base ignored", man.model_id);
            None
        }
        (None, _) => None,
    };

    let stem = file_stem(&man.model_id);
    let features: Vec<HeadFeatures> = if a.save_graphs {
        let graphs = pipeline::model_graphs(&bundle, rope.as_ref(), c)?;
        let dir = g.out.join(format!("{stem}.graphs"));
        for hg in &graphs {
            let sub = dir.join(format!("layer{}.head{}", hg.head_ref.layer, hg.head_ref.head));
            io::write_graph_pair(&sub, &hg.graph, None)?;
        }
        graphs
            .par_iter()
            .map(|hg| {
                Ok(HeadFeatures {
                    head_ref: hg.head_ref.clone(),
                    features: feature_vector(&hg.graph, g.seed)?,
                })
            })
            .collect::<Result<_>>()?
    } else {
        pipeline::model_features(&bundle, rope.as_ref(), c, g.seed)?
    };
    let path = g.out.join(format!("{stem}.features.csv"));
    io::write_head_features(&path, &features)?;
    println!("{}: {} heads -> {}", man.model_id, features.len(), path.display());
    Ok(())
}

fn read_heads(paths: &[PathBuf]) -> Result<Vec<HeadFeatures>> {
    let mut heads = Vec::new();
    for p in paths {
        heads.extend(io::read_head_features(p)?);
    }
    Ok(heads)
}

fn write_reports(out: &Path, report: &SpaceReport) -> Result<()> {
    io::write_report_csv(&out.join("report.csv"), report)?;
    io::write_json(&out.join("report.json"), report)?;
    for e in &report.excluded {
        log::warn!(
            "excluded {} layer {} head {}: {}",
            e.head_ref.model_id,
            e.head_ref.layer,
            e.head_ref.head,
            e.reason
        );
    }
    Ok(())
}

fn space_fit(cli: &Cli, a: &FitArgs) -> Result<()> {
    let g = &cli.global;
    let brains = io::read_brain_features(&a.brain)?;
    let heads = read_heads(&a.heads)?;
    let cfg = SpaceConfig {
        seed: g.seed,
        k_range: g.k_min..=g.k_max,
        match_threshold: g.threshold,
        scope: match a.scope {
            ScopeArg::Pooled => StandardizationScope::Pooled,
            ScopeArg::PerFamily => StandardizationScope::PerFamily,
        },
        score_mode: if a.uncentered { ScoreMode::Uncentered } else { ScoreMode::Centered },
    };
    let fitted = SpaceModel::fit(&brains, &heads, &cfg)?;
    let model = fitted.model;
    io::save_space(&g.out.join("space.json"), &model)?;
    let report = model.report(&heads, g.threshold)?;
    write_reports(&g.out, &report)?;
    println!(
        "k = {}; PC1 {:.2}%, PC2 {:.2}% of variance; {} heads, {} excluded",
        model.chosen_k,
        100.0 * model.explained_variance_ratio[0],
        100.0 * model.explained_variance_ratio[1],
        heads.len(),
        fitted.excluded.len()
    );
    Ok(())
}

fn load_report(cli: &Cli, a: &SpaceInputs) -> Result<SpaceReport> {
    let model = io::load_space(&a.space)?;
    let heads = read_heads(&a.heads)?;
    model.report(&heads, cli.global.threshold)
}

fn space_project(cli: &Cli, a: &SpaceInputs) -> Result<()> {
    let report = load_report(cli, a)?;
    write_reports(&cli.global.out, &report)?;
    for m in &report.models {
        println!("{}: {} heads, score {}", m.model_id, m.heads.len(), io::fmt_f64(m.score));
    }
    Ok(())
}

fn match_heads(cli: &Cli, a: &SpaceInputs) -> Result<()> {
    let report = load_report(cli, a)?;
    let mut out = String::from("model_id,layer,head,network,similarity\n");
    for m in &report.models {
        for h in &m.heads {
            let best = h.similarity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&m.model_id),
                h.layer,
                h.head,
                h.matched.map_or("none", NetworkId::code),
                io::fmt_f64(best)
            ));
        }
        let matched = m.heads.len() - m.match_histogram[7];
        println!(
            "{}: {}/{} heads matched ({:.1}%) at {}",
            m.model_id,
            matched,
            m.heads.len(),
            100.0 * matched as f64 / m.heads.len() as f64,
            report.match_threshold
        );
    }
    write_text(&cli.global.out.join("matches.csv"), &out)
}

fn score(cli: &Cli, a: &SpaceInputs) -> Result<()> {
    let report = load_report(cli, a)?;
    let mut out = String::from("model_id,heads,score\n");
    for m in &report.models {
        out.push_str(&format!("{},{},{}\n", csv_field(&m.model_id), m.heads.len(), io::fmt_f64(m.score)));
        println!("{} {}", m.model_id, io::fmt_f64(m.score));
    }
    write_text(&cli.global.out.join("scores.csv"), &out)
}

fn percent(count: usize, total: usize) -> String {
    format!("{:.1}%", 100.0 * count as f64 / total as f64)
}

fn report(cli: &Cli, a: &ReportArgs) -> Result<()> {
    let out = &cli.global.out;
    let report: SpaceReport = io::read_json(&a.report)?;
    if report.models.iter().any(|m| m.cluster_histogram.len() != report.chosen_k) {
        return Err(Error::Format {
            path: a.report.clone(),
            reason: "cluster histogram length differs from chosen_k".into(),
        });
    }

    let mut clusters = String::from("model_id,cluster,count,percent\n");
    let mut matches = String::from("model_id,network,count,percent\n");
    for m in &report.models {
        let total = m.heads.len();
        for (c, &count) in m.cluster_histogram.iter().enumerate() {
            let row = format!("C{} {}", c + 1, percent(count, total));
            clusters.push_str(&format!("{},C{},{count},{}\n", csv_field(&m.model_id), c + 1, percent(count, total)));
            println!("{} {row}", m.model_id);
        }
        for (i, &count) in m.match_histogram.iter().enumerate() {
            let name = NetworkId::ALL.get(i).map_or("none", |n| n.code());
            matches.push_str(&format!("{},{name},{count},{}\n", csv_field(&m.model_id), percent(count, total)));
        }
    }
    write_text(&out.join("clusters.csv"), &clusters)?;
    write_text(&out.join("network_matches.csv"), &matches)?;
    write_text(&out.join("scatter.svg"), &crate::svg::scatter(&report))?;

    if let Some(acc_path) = &a.accuracy {
        let accuracy = io::read_accuracy_csv(acc_path)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (model_id, acc) in &accuracy {
            match report.models.iter().find(|m| &m.model_id == model_id) {
                Some(m) => {
                    xs.push(m.score);
                    ys.push(*acc);
                }
                None => log::warn!("accuracy given for unknown model {model_id}"),
            }
        }
        let corr = correlate(&xs, &ys)?;
        let line = format!("r = {}, p = {}, n = {}", io::fmt_f64(corr.r), io::fmt_f64(corr.p), corr.n);
        println!("{line}");
        write_text(
            &out.join("correlation.csv"),
            &format!("r,p,n\n{},{},{}\n", io::fmt_f64(corr.r), io::fmt_f64(corr.p), corr.n),
        )?;
    }
    Ok(())
}
