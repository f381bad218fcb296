//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p brainspace-cli --test acceptance`.

mod common;

use std::path::Path;
use std::time::Instant;

use brainspace_core::attention::{build_attention_graph, BaseSource, HeadRef, HeadWeights, PositionalEmbedding, RopePolicy};
use brainspace_core::brain::{group_fc, NetworkId};
use brainspace_core::graph::{masked_softmax, minmax_normalize, to_distance};
use brainspace_core::io::{read_bundle, to_json_string, write_bundle};
use brainspace_core::metrics::{
    all_pairs_shortest, avg_clustering, avg_shortest_path, detect_communities, global_efficiency, modularity,
    Partition,
};
use brainspace_core::pipeline::{brain_features, build_brain_networks, model_features, BrainInput, VertexLabels};
use brainspace_core::reference;
use brainspace_core::space::{fit_kmeans, fit_pca, pearson_p_value, SpaceReport};
use brainspace_core::synthetic::{language_base, synthetic_brain, synthetic_models};
use brainspace_core::{AdjacencyMatrix, DenseMatrix, DistanceMatrix, GraphPair, NormalizationConstants, SpaceConfig, SpaceModel};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_undirected(rng: &mut ChaCha8Rng, n: usize, density: f64) -> AdjacencyMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let w = rng.random_range(0.001..0.999);
                rows[i][j] = w;
                rows[j][i] = w;
            }
        }
    }
    AdjacencyMatrix::undirected(&rows).unwrap()
}

fn floyd_warshall(d: &DistanceMatrix) -> Vec<f64> {
    let n = d.n();
    let mut m: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                0.0
            } else {
                d.cost(i, j)
            }
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i * n + k] + m[k * n + j];
                if via < m[i * n + j] {
                    m[i * n + j] = via;
                }
            }
        }
    }
    m
}

/// `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
fn modularity_oracle(a: &AdjacencyMatrix, labels: &[usize]) -> f64 {
    let n = a.n();
    let k: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a.weight(i, j) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Maximal modularity over every set partition (restricted growth strings).
fn brute_force_max_q(a: &AdjacencyMatrix) -> f64 {
    let n = a.n();
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, a: &AdjacencyMatrix, best: &mut f64) {
        if i == labels.len() {
            *best = best.max(modularity_oracle(a, labels));
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, a, best);
        }
    }
    if n == 0 {
        return 0.0;
    }
    rec(1, 0, &mut labels, a, &mut best);
    best
}

fn pair(conn: &[&[f64]], dist: &[&[f64]]) -> GraphPair {
    let conn = AdjacencyMatrix::undirected(conn).unwrap();
    let n = dist.len();
    let costs = dist.iter().flat_map(|r| r.iter().copied()).collect();
    GraphPair::new(conn, DistanceMatrix::new(n, costs).unwrap()).unwrap()
}

fn metric_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut graphs = 0;
    for t in 0..60 {
        let n = 2 + t % 31;
        let density = [0.08, 0.2, 0.5, 0.9][t % 4];
        let g = to_distance(&random_undirected(&mut rng, n, density)).unwrap();
        let sp = all_pairs_shortest(&g);
        let fw = floyd_warshall(&g.dist);
        for (k, (&x, &y)) in sp.as_slice().iter().zip(&fw).enumerate() {
            let ok = (x.is_infinite() && y.is_infinite()) || (x - y).abs() <= 1e-12;
            ensure(ok, || format!("graph {t} (n = {n}) pair {k}: Dijkstra {x} vs Floyd–Warshall {y}"))?;
        }
        graphs += 1;
    }

    // pinned instance set: 24 seeded random graphs with 3..=7 nodes plus
    // four structured graphs
    let mut pinned: Vec<AdjacencyMatrix> = Vec::new();
    let mut qrng = ChaCha8Rng::seed_from_u64(7);
    for t in 0..24 {
        let n = 3 + t % 5;
        pinned.push(random_undirected(&mut qrng, n, 0.65));
    }
    pinned.push(
        AdjacencyMatrix::undirected(&[
            [0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        ])
        .unwrap(),
    );
    pinned.push(
        AdjacencyMatrix::undirected(&[[0.0, 1.0, 1.0, 1.0], [1.0, 0.0, 1.0, 1.0], [1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 1.0, 0.0]])
            .unwrap(),
    );
    let path: Vec<Vec<f64>> = (0..7usize)
        .map(|i| (0..7).map(|j| if i.abs_diff(j) == 1 { 0.5 } else { 0.0 }).collect())
        .collect();
    pinned.push(AdjacencyMatrix::undirected(&path).unwrap());
    let star: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|j| if i != j && (i == 0 || j == 0) { 0.7 } else { 0.0 }).collect())
        .collect();
    pinned.push(AdjacencyMatrix::undirected(&star).unwrap());

    let mut worst = 0.0f64;
    for (t, a) in pinned.iter().enumerate() {
        if a.weights().as_slice().iter().all(|&w| w == 0.0) {
            continue;
        }
        let g = to_distance(a).unwrap();
        let p = detect_communities(&g, 42).unwrap();
        let q_det = modularity_oracle(a, p.assignment());
        let q_lib = modularity(&g, &p).unwrap();
        let q_max = brute_force_max_q(a);
        ensure((q_det - q_lib).abs() <= 1e-12, || format!("instance {t}: library Q {q_lib} vs oracle {q_det}"))?;
        ensure((q_det - q_max).abs() <= 1e-9, || format!("instance {t} (n = {}): detected Q {q_det} < brute-force {q_max}", a.n()))?;
        worst = worst.max((q_det - q_max).abs());
    }

    let c = avg_clustering(&pair(
        &[&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.125], &[1.0, 0.125, 0.0]],
        &[&[0.0, 0.5, 0.5], &[0.5, 0.0, 0.5], &[0.5, 0.5, 0.0]],
    ))
    .unwrap();
    ensure((c - 0.5).abs() <= 1e-9, || format!("triangle C = {c}, expected 0.5"))?;

    let two_tri = to_distance(&pinned[24]).unwrap();
    let q = modularity(&two_tri, &Partition::from_labels(&[0, 0, 0, 1, 1, 1])).unwrap();
    ensure((q - 0.5).abs() <= 1e-9, || format!("two-triangle Q = {q}, expected 0.5"))?;

    let inf = f64::INFINITY;
    let path3 = pair(
        &[&[0.0, 0.8, 0.0], &[0.8, 0.0, 0.7], &[0.0, 0.7, 0.0]],
        &[&[0.0, 0.2, inf], &[0.2, 0.0, 0.3], &[inf, 0.3, 0.0]],
    );
    let l = avg_shortest_path(&path3).unwrap();
    ensure((l - 1.0 / 3.0).abs() <= 1e-9, || format!("path L = {l}, expected 1/3"))?;
    let e = global_efficiency(&path3).unwrap();
    let e_expected = (5.0 + 10.0 / 3.0 + 2.0) / 3.0;
    ensure((e - e_expected).abs() <= 1e-9, || format!("path E = {e}, expected {e_expected}"))?;

    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{graphs} APSP graphs, {} pinned Q instances (max gap {worst:.1e}), worked examples; {secs:.2} s",
        pinned.len()
    ))
}

fn normalization_contracts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut rows = 0;
    let mut worst = 0.0f64;
    while rows < 1000 {
        let n = 10;
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j && rng.random::<f64>() < 0.6 {
                    *v = rng.random_range(0.0..5.0);
                }
            }
        }
        m[0] = vec![0.0; n];
        let a = AdjacencyMatrix::directed(&m).unwrap();
        let s = masked_softmax(&a).unwrap();
        for i in 0..n {
            let row = s.row(i);
            let sum: f64 = row.iter().sum();
            if m[i].iter().all(|&v| v == 0.0) {
                ensure(row.iter().all(|&v| v == 0.0), || format!("all-zero row became {row:?}"))?;
            } else {
                worst = worst.max((sum - 1.0).abs());
                ensure((sum - 1.0).abs() <= 1e-12, || format!("row sums to {sum}"))?;
                for (x, y) in m[i].iter().zip(row) {
                    ensure((*x == 0.0) == (*y == 0.0), || "softmax changed the sparsity pattern".into())?;
                }
            }
            rows += 1;
        }
    }

    let c = NormalizationConstants::default();
    for t in 0..200 {
        let a = random_undirected(&mut rng, 3 + t % 20, 0.5);
        if a.weights().as_slice().iter().all(|&v| v == 0.0) {
            continue;
        }
        let mm = minmax_normalize(&a, c).unwrap();
        let nz: Vec<f64> = mm.weights().as_slice().iter().copied().filter(|&v| v != 0.0).collect();
        let lo = nz.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = nz.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ensure(lo >= 1e-5 - 1e-12 && hi <= 1.0 - 1e-5 + 1e-12, || format!("outputs span [{lo}, {hi}]"))?;
        if nz.len() > 2 {
            ensure((lo - 1e-5).abs() <= 1e-12 && (hi - (1.0 - 1e-5)).abs() <= 1e-12, || {
                format!("extremes {lo}, {hi} miss the bounds")
            })?;
        }
    }

    let flat = AdjacencyMatrix::undirected(&[[0.0, 0.3, 0.3], [0.3, 0.0, 0.3], [0.3, 0.3, 0.0]]).unwrap();
    let mid = (1e-5 + 1.0 - 1e-5) / 2.0;
    let mm = minmax_normalize(&flat, c).unwrap();
    ensure((mm.weight(0, 1) - mid).abs() <= 1e-12, || format!("degenerate range gave {}", mm.weight(0, 1)))?;
    Ok(format!("{rows} softmax rows (max |Σ−1| = {worst:.1e}), 200 min-max graphs, degenerate and zero-row cases"))
}

fn micro_oracles() -> Outcome {
    let one = |v: f64| DenseMatrix::new(1, 1, vec![v]).unwrap();
    let head = HeadWeights::new(
        HeadRef { model_id: "hand".into(), layer: 0, head: 0 },
        one(1.0),
        one(1.0),
        None,
        1,
        1,
    )
    .unwrap();
    let p = PositionalEmbedding::new(DenseMatrix::new(2, 1, vec![1.0, 2.0]).unwrap()).unwrap();
    let a = build_attention_graph(&p, &head).unwrap();
    let row0 = [a.weight(0, 0), a.weight(0, 1)];
    let e1 = 1f64.exp();
    let e2 = 2f64.exp();
    let oracle = [e1 / (e1 + e2), e2 / (e1 + e2)];
    for (x, y) in row0.iter().zip([0.26894, 0.73106]) {
        ensure((x - y).abs() <= 1e-5, || format!("row 0 = {row0:?}"))?;
    }
    for (x, y) in row0.iter().zip(oracle) {
        ensure((x - y).abs() <= 1e-15, || format!("row 0 = {row0:?}, exp oracle {oracle:?}"))?;
    }

    let s1 = AdjacencyMatrix::undirected(&[[0.0, 0.8], [0.8, 0.0]]).unwrap();
    let s2 = AdjacencyMatrix::undirected(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
    let g = group_fc(&[s1, s2]).unwrap().value;
    let v = g.weight(0, 1);
    ensure((v - 0.5).abs() <= 1e-12, || format!("Fisher group value {v}"))?;
    Ok(format!("row 0 = [{:.5}, {:.5}], Fisher group = {v}", row0[0], row0[1]))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Builds the whole in-memory pipeline and returns the serialized space and
/// report.
fn core_run(tmp: &Path) -> (SpaceModel, SpaceReport, String) {
    let c = NormalizationConstants::default();
    let b = synthetic_brain(7, 3, 6, 120);
    let labels = VertexLabels { roi: b.vertex_roi, network: b.vertex_network };
    let built = build_brain_networks(BrainInput::TimeSeries(b.series), &labels, c, true).unwrap();
    let brains = brain_features(&built.value.networks, SEED).unwrap();
    let rope = RopePolicy::new(BaseSource::LanguageBase, language_base(SEED, 6)).unwrap();
    let mut heads = Vec::new();
    for m in synthetic_models(SEED) {
        let dir = tmp.join(&m.model_id);
        write_bundle(&dir, &m.model_id, m.scheme, m.modality, m.pos_embed.as_ref(), &m.heads, m.shared_rel_bias).unwrap();
        let bundle = read_bundle(&dir).unwrap();
        heads.extend(model_features(&bundle, Some(&rope), c, SEED).unwrap());
    }
    let fit = SpaceModel::fit(&brains, &heads, &SpaceConfig::default()).unwrap();
    let report = fit.model.report(&heads, fit.model.match_threshold).unwrap();
    let bytes = to_json_string(&fit.model).unwrap() + &to_json_string(&report).unwrap();
    (fit.model, report, bytes)
}

fn space_recovery() -> Outcome {
    // planted dominant axis
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let raw = [1.0, 2.0, 3.0, 1.0, 0.5, 2.0, 1.0];
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: [f64; 7] = raw.map(|x| x / norm);
    let sigma = 0.02;
    let vectors: Vec<[f64; 7]> = (0..20_000)
        .map(|_| {
            let a = normal(&mut rng);
            std::array::from_fn(|i| 0.1 + a * u[i] + sigma * normal(&mut rng))
        })
        .collect();
    let pca = fit_pca(&vectors).unwrap();
    let dot: f64 = pca.axes[0].iter().zip(&u).map(|(x, y)| x * y).sum();
    let angle = dot.clamp(-1.0, 1.0).acos();
    let constructed = (1.0 + sigma * sigma) / (1.0 + 7.0 * sigma * sigma);
    let ratio = pca.explained_variance_ratio[0];
    ensure(angle < 1e-3, || format!("PC1 off by {angle:.2e} rad"))?;
    ensure((ratio - constructed).abs() < 0.01, || format!("ratio {ratio} vs constructed {constructed}"))?;

    // four planted blobs in a plane of the 7-dimensional space
    let e1 = [0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0];
    let e2 = [0.0, 0.0, 0.0, 0.0, 0.6, 0.8, 0.0];
    let centers = [(-1.0, -0.6), (-1.0, 0.6), (1.0, -0.6), (1.0, 0.6)];
    let mut blob_vectors = Vec::new();
    let mut truth = Vec::new();
    for (b, (x, y)) in centers.iter().enumerate() {
        for _ in 0..40 {
            let v: [f64; 7] = std::array::from_fn(|i| x * e1[i] + y * e2[i] + 0.05 * normal(&mut rng));
            blob_vectors.push(v);
            truth.push(b);
        }
    }
    let pca = fit_pca(&blob_vectors).unwrap();
    let coords: Vec<[f64; 2]> = blob_vectors
        .iter()
        .map(|v| {
            let p = pca.project(v);
            [p[0], p[1]]
        })
        .collect();
    let sel = fit_kmeans(&coords, 2..=8, SEED).unwrap();
    ensure(sel.best.k == 4, || format!("silhouette chose k = {} ({:?})", sel.best.k, sel.silhouettes))?;
    let mut map = [usize::MAX; 4];
    for (&t, &l) in truth.iter().zip(&sel.best.labels) {
        if map[t] == usize::MAX {
            map[t] = l;
        }
        ensure(map[t] == l, || "blob split across clusters".into())?;
    }
    let mut seen = map.to_vec();
    seen.sort_unstable();
    seen.dedup();
    ensure(seen.len() == 4, || "two blobs merged".into())?;

    // determinism across runs and pool sizes
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (run, threads) in [1, 8, 1, 8].into_iter().enumerate() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let dir = tmp.path().join(format!("run{run}"));
        outputs.push(pool.install(|| core_run(&dir)).2);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "serialized space differs between runs".into())?;
    Ok(format!(
        "PC1 angle {angle:.1e} rad, ratio {ratio:.4} vs {constructed:.4}; k = 4 exact; {} identical bytes over 1/8 threads",
        outputs[0].len()
    ))
}

fn reference_and_end_to_end() -> Outcome {
    let p = pearson_p_value(reference::VISION_ACCURACY_R, reference::VISION_MODELS).unwrap();
    ensure((p - reference::VISION_ACCURACY_P).abs() < 5e-4, || format!("p({}) = {p}", reference::VISION_ACCURACY_R))?;
    let sum = reference::PC1_VARIANCE_RATIO + reference::PC2_VARIANCE_RATIO;
    ensure((sum - reference::PC12_VARIANCE_RATIO).abs() < 1e-4, || format!("PC1 + PC2 = {sum}"))?;

    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let (model, report, _) = core_run(tmp.path());
    let secs = start.elapsed().as_secs_f64();

    model.validate().map_err(|e| e.to_string())?;
    let evr = &model.explained_variance_ratio;
    ensure(evr.windows(2).all(|w| w[0] >= w[1]) && evr.iter().sum::<f64>() <= 1.0 + 1e-12, || format!("{evr:?}"))?;
    ensure(model.pca_axes[0].iter().sum::<f64>() >= 0.0, || "PC1 points away from the all-ones direction".into())?;
    ensure(report.models.len() == 3 && report.excluded.is_empty(), || "expected three complete models".into())?;
    for m in &report.models {
        ensure(m.heads.len() == 4, || format!("{}: {} heads", m.model_id, m.heads.len()))?;
        ensure(m.cluster_histogram.iter().sum::<usize>() == 4, || "cluster histogram".into())?;
        ensure(m.match_histogram.iter().sum::<usize>() == 4, || "match histogram".into())?;
        let pc1_sum: f64 = m.heads.iter().map(|h| h.pc1).sum();
        ensure((pc1_sum - m.score).abs() <= 1e-12 * (1.0 + m.score.abs()), || format!("score {} vs Σ PC1 {pc1_sum}", m.score))?;
        for h in &m.heads {
            ensure(h.similarity.iter().all(|s| (-1.0..=1.0).contains(s)), || "similarity outside [-1, 1]".into())?;
            ensure((1..=model.chosen_k).contains(&h.cluster), || format!("cluster {}", h.cluster))?;
            ensure(model.cluster_of(&[h.pc1, h.pc2]) + 1 == h.cluster, || "cluster is not the nearest centroid".into())?;
            let best = h.similarity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            match h.matched {
                Some(n) => ensure(h.similarity[n.index()] == best && best >= model.match_threshold, || "bad match".into())?,
                None => ensure(best < model.match_threshold, || "missed match".into())?,
            }
        }
    }
    ensure(NetworkId::ALL.len() == 7, || "network count".into())?;
    ensure(secs < 120.0, || format!("end-to-end took {secs:.1} s"))?;
    Ok(format!(
        "reference constants consistent (p(r = {}, n = {}) = {p:.4}); synthetic end-to-end report green in {secs:.2} s; \
         full-scale numbers (PC1 {:.2}%, k = {}, scores {:?}) need the original corpus",
        reference::VISION_ACCURACY_R,
        reference::VISION_MODELS,
        100.0 * reference::PC1_VARIANCE_RATIO,
        reference::CHOSEN_K,
        reference::SCORE_RANGE
    ))
}

fn cli_contract() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let fx = write_fixture(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_pipeline(&fx, &a, &[])?;
    compare_goldens(&a)?;
    run_pipeline(&fx, &b, &["--threads", "1"])?;
    ensure(snapshot(&a) == snapshot(&b), || "rerun is not byte-identical".into())?;

    let code = |args: &[&str]| brainspace(args).status.code();
    let missing = tmp.path().join("missing.csv");
    let table = [
        ("--help", code(&["--help"]), 0),
        ("unknown flag", code(&["report", "--nope"]), 2),
        (
            "missing label file",
            code(&["build-brain", "--labels", s(&missing), "--timeseries", s(&fx.timeseries[0]), "--out", s(&b)]),
            2,
        ),
        (
            "project without space.json",
            code(&["space", "project", "--space", s(&missing), "--heads", s(&missing), "--out", s(&b)]),
            2,
        ),
        (
            "numeric failure",
            code(&[
                "space",
                "fit",
                "--brain",
                s(&a.join("brain_features.csv")),
                "--heads",
                s(&a.join("toy_rope.features.csv")),
                "--k-max",
                "3",
                "--out",
                s(&b),
            ]),
            3,
        ),
    ];
    for (what, got, want) in table {
        ensure(got == Some(want), || format!("{what}: exit {got:?}, expected {want}"))?;
    }
    Ok(format!("{} golden files match; rerun byte-identical; exit codes 0/2/3 as documented", GOLDEN_FILES.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("metric oracle suite", metric_oracles),
        ("normalization contracts", normalization_contracts),
        ("attention and Fisher micro-oracles", micro_oracles),
        ("space recovery and determinism", space_recovery),
        ("reference numbers and synthetic end-to-end", reference_and_end_to_end),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
