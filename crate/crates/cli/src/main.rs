//! `rationale`: generate corpora, train document and rationale models,
//! extract rationales, and run the cross-validated experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rationale", version, about = "Explainable predictive coding experiments")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Global seed for every random stage.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for scoring and evaluation (0 = all cores, 1 = sequential).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic annotated corpus as JSONL.
    GenCorpus(GenCorpusArgs),
    /// Descriptive corpus statistics as JSON.
    Stats(StatsArgs),
    /// Train the document and/or rationale model.
    Train(TrainArgs),
    /// Identify responsive documents and extract their top-K rationales.
    Extract(ExtractArgs),
    /// Snippet-classification experiment: fold-averaged PR curves.
    EvalSnippets(EvalSnippetsArgs),
    /// Rationale-identification experiment: recall@K table.
    EvalRationales(EvalRationalesArgs),
    /// Window counts over the annotated responsive population.
    SnippetStats(SnippetStatsArgs),
    /// Word-savings arithmetic for reviewing only the top-K snippets.
    ReportSavings(ReportSavingsArgs),
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n_docs: Option<usize>,
    #[arg(long)]
    pub responsive_rate: Option<f64>,
    #[arg(long)]
    pub doc_mean: Option<f64>,
    #[arg(long)]
    pub doc_std: Option<f64>,
    #[arg(long)]
    pub rationale_mean: Option<f64>,
    #[arg(long)]
    pub rationale_std: Option<f64>,
    #[arg(long)]
    pub background_vocab: Option<usize>,
    #[arg(long)]
    pub topic_vocab: Option<usize>,
    #[arg(long)]
    pub topic_mix: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorpusArg {
    /// JSONL corpus.
    #[arg(long)]
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Shortest rationale kept (words, inclusive).
    #[arg(long)]
    pub min_words: Option<usize>,
    /// Rationales must be shorter than this (words).
    #[arg(long)]
    pub max_words: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    /// Report the share of rationales shorter than this many words.
    #[arg(long, default_value_t = 250)]
    pub threshold: usize,
    /// Apply the rationale length filter before computing statistics.
    #[arg(long)]
    pub filter: bool,
    #[command(flatten)]
    pub filter_args: FilterArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichModels {
    Document,
    Rationale,
    Both,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    /// Directory receiving vocab.json and the model JSON files.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = WhichModels::Both)]
    pub models: WhichModels,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub filter_args: FilterArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Document,
    Rationale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatchArg {
    Overlap,
    Containment,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    /// Directory written by `train`.
    #[arg(long)]
    pub models: PathBuf,
    /// Rationale results, one JSON object per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Human-readable report with snippet excerpts.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Document-model probability needed to count as responsive.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Refine selected windows into smaller ones (document-model method).
    #[arg(long)]
    pub refine: bool,
    #[arg(long, value_enum)]
    pub match_mode: Option<MatchArg>,
}

#[derive(Debug, Args)]
pub struct EvalCommon {
    #[command(flatten)]
    pub corpus: CorpusArg,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[command(flatten)]
    pub filter_args: FilterArgs,
}

#[derive(Debug, Args)]
pub struct EvalSnippetsArgs {
    #[command(flatten)]
    pub common: EvalCommon,
    /// Directory receiving pr_curves.json and one CSV per method.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalRationalesArgs {
    #[command(flatten)]
    pub common: EvalCommon,
    /// Recall@K table as JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the aligned text table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Window sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long, value_enum)]
    pub match_mode: Option<MatchArg>,
}

#[derive(Debug, Args)]
pub struct SnippetStatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub filter_args: FilterArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportSavingsArgs {
    #[arg(long)]
    pub avg_doc_words: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    /// Number of responsive documents.
    #[arg(long)]
    pub docs: u64,
    #[arg(long)]
    pub recall: Option<f64>,
    /// Explicit lower bound of words reviewed per document.
    #[arg(long, requires = "coverage_max")]
    pub coverage_min: Option<u64>,
    /// Explicit upper bound of words reviewed per document.
    #[arg(long, requires = "coverage_min")]
    pub coverage_max: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
