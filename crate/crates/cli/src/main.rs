//! `brainspace`: build brain and attention graphs, fit the similarity space,
//! and report where models land in it.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "brainspace", version, about = "Compare attention-head topology with functional brain networks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for every randomized stage
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Upper margin of the min-max scaling (weights end at most at 1 - epsilon)
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub epsilon: f64,

    /// Lower margin of the min-max scaling
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub delta: f64,

    /// Cosine similarity a head needs to match a network
    #[arg(long, global = true, default_value_t = 0.8)]
    pub threshold: f64,

    /// Smallest number of clusters tried
    #[arg(long, global = true, default_value_t = 2)]
    pub k_min: usize,

    /// Largest number of clusters tried
    #[arg(long, global = true, default_value_t = 8)]
    pub k_max: usize,

    /// Skip min-max scaling of brain network graphs
    #[arg(long, global = true)]
    pub skip_brain_minmax: bool,

    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the seven brain network graphs and their feature vectors
    BuildBrain(BuildBrainArgs),
    /// Build per-head attention graphs and feature vectors from a model bundle
    BuildModel(BuildModelArgs),
    /// Fit the similarity space or project models into a saved one
    #[command(subcommand)]
    Space(SpaceCommand),
    /// Match each head to its most similar network
    Match(SpaceInputs),
    /// Brain-likeness score per model
    Score(SpaceInputs),
    /// Cluster and match tables, PC scatter plot and accuracy correlation
    Report(ReportArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["timeseries", "subject_fc", "from_fc"])))]
pub struct BuildBrainArgs {
    /// ROI time-series CSV, one file per subject
    #[arg(long, num_args = 1..)]
    pub timeseries: Vec<PathBuf>,

    /// Per-subject connectivity matrix (BSM-1 directory or CSV), one per subject
    #[arg(long, num_args = 1..)]
    pub subject_fc: Vec<PathBuf>,

    /// Precomputed group connectivity matrix (BSM-1 directory or CSV)
    #[arg(long)]
    pub from_fc: Option<PathBuf>,

    /// Vertex label CSV: ROI index and network per vertex
    #[arg(long)]
    pub labels: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaseKind {
    Language,
    Vision,
}

#[derive(Debug, Args)]
pub struct BuildModelArgs {
    /// BSE-1 bundle directory
    #[arg(long)]
    pub bundle: PathBuf,

    /// Base positional embedding (BSM-1) used for rotary models
    #[arg(long)]
    pub rope_base: Option<PathBuf>,

    /// Which base the embedding is; defaults to the model's modality
    #[arg(long, value_enum)]
    pub rope_base_source: Option<BaseKind>,

    /// Also write every head's graph pair
    #[arg(long)]
    pub save_graphs: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Pooled,
    PerFamily,
}

#[derive(Debug, Subcommand)]
pub enum SpaceCommand {
    /// Fit a new space and report the fitted corpus
    Fit(FitArgs),
    /// Position models in an existing space
    Project(SpaceInputs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Brain feature CSV from build-brain
    #[arg(long)]
    pub brain: PathBuf,

    /// Head feature CSVs from build-model
    #[arg(long, num_args = 1.., required = true)]
    pub heads: Vec<PathBuf>,

    /// Population the metric standardization is fitted on
    #[arg(long, value_enum, default_value = "pooled")]
    pub scope: ScopeArg,

    /// Score heads without centering on the PCA mean
    #[arg(long)]
    pub uncentered: bool,
}

#[derive(Debug, Args)]
pub struct SpaceInputs {
    /// Saved space (space.json)
    #[arg(long)]
    pub space: PathBuf,

    /// Head feature CSVs from build-model
    #[arg(long, num_args = 1.., required = true)]
    pub heads: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON report written by `space fit` or `space project`
    #[arg(long)]
    pub report: PathBuf,

    /// CSV with `model_id,accuracy` columns
    #[arg(long)]
    pub accuracy: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BRAINSPACE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERIC })
        }
    }
}
