//! `fspgen`: build FSP tuning shards, render zero-shot tasks, score logits.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error.

mod cmd;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsp_core::sampler::Objective;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl From<fsp_core::Error> for Failure {
    fn from(e: fsp_core::Error) -> Self {
        match e {
            fsp_core::Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "fspgen", version, about = "First-sentence-prediction dataset builder and zero-shot toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build tuning/validation shards and a stats file from raw corpora.
    Generate(GenerateArgs),
    /// Render a labeled dataset into zero-shot model inputs for a task.
    #[command(alias = "render-task")]
    Render(RenderArgs),
    /// Score a logits file with constrained prediction.
    Eval(EvalArgs),
    /// Print rendered samples from a shard, or summarize a stats file.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Fsp,
    Lsp,
    Nss,
    Rsp,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Fsp => Objective::Fsp,
            ObjectiveArg::Lsp => Objective::Lsp,
            ObjectiveArg::Nss => Objective::Nss,
            ObjectiveArg::Rsp => Objective::Rsp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Alphabet,
    Numeric,
    Constant,
    Custom,
}

#[derive(Args, Clone)]
pub struct SchemeOpts {
    /// Index indicator scheme.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Comma-separated symbols for `--scheme custom`.
    #[arg(long)]
    pub symbols: Option<String>,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Article corpus (JSON lines with `id`, `paragraphs`). Repeatable.
    #[arg(long = "articles")]
    pub articles: Vec<PathBuf>,
    /// Flat corpus (JSON lines with `category`, `text`). Repeatable.
    #[arg(long = "flat")]
    pub flat: Vec<PathBuf>,
    /// Output directory for shards and stats.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    #[arg(long)]
    pub n_model: Option<usize>,
    #[arg(long)]
    pub n_max_label: Option<usize>,
    #[arg(long)]
    pub hard_negatives: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub shard_size: Option<usize>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// Articles kept per input corpus.
    #[arg(long)]
    pub quota: Option<usize>,
    /// Tolerated share of malformed input records before giving up.
    #[arg(long)]
    pub max_error_rate: Option<f64>,
    #[command(flatten)]
    pub scheme: SchemeOpts,
}

#[derive(Args)]
pub struct RenderArgs {
    /// Task file (`class_names` plus `template` or `verbalizers`).
    #[arg(long)]
    pub task: PathBuf,
    /// JSON lines with `text` and `label`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_model: Option<usize>,
    #[command(flatten)]
    pub scheme: SchemeOpts,
}

#[derive(Args)]
pub struct EvalArgs {
    /// JSON lines with `sample_id`, `logits`, `gold_label`.
    #[arg(long)]
    pub logits: PathBuf,
    /// Number of task classes; only the first `n-l` logits are considered.
    #[arg(long = "n-l")]
    pub n_l: usize,
    #[arg(long, default_value = "task")]
    pub task: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct InspectArgs {
    /// A shard file or a `stats.json`.
    pub path: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub limit: usize,
    #[command(flatten)]
    pub scheme: SchemeOpts,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd::generate(a),
        Command::Render(a) => cmd::render(a),
        Command::Eval(a) => cmd::eval(a),
        Command::Inspect(a) => cmd::inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
