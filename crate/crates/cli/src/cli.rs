//! Argument definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use storynet::corpus::{LabelMode, RatingScheme};
use storynet::emotions::NullMode;

use crate::commands;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::Ctx;

#[derive(Debug, Parser)]
#[command(name = "storynet", version, about = "Cognitive-network and emotion features for creative short stories")]
pub struct Cli {
    /// TOML config, or a manifest.json whose last run config is reused.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for per-story and per-fold work.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write a normalized copy plus word counts.
    Ingest(IngestArgs),
    /// Build networks and emotion profiles, write raw and scaled features.
    Featurize(FeaturizeArgs),
    /// Mann–Whitney comparison of two feature matrices.
    Compare(CompareArgs),
    /// Fit a classifier on the full data set.
    Train(LearnArgs),
    /// Stratified k-fold cross-validation report.
    Evaluate(LearnArgs),
    /// SHAP importances and beeswarm exports for a boosted model.
    Explain(ExplainArgs),
    /// Rate every story with LLM judges.
    Rate(RateArgs),
    /// Generate stories with an LLM, one conversation per participant.
    Generate(GenerateArgs),
    /// Rating histograms and optional cross-corpus correlations.
    Distributions(DistributionsArgs),
    /// Stitch all reports in the output directory into one document.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Featurize(_) => "featurize",
            Command::Compare(_) => "compare",
            Command::Train(_) => "train",
            Command::Evaluate(_) => "evaluate",
            Command::Explain(_) => "explain",
            Command::Rate(_) => "rate",
            Command::Generate(_) => "generate",
            Command::Distributions(_) => "distributions",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory of `<story_id>.conllu` parses.
    #[arg(long)]
    pub conllu: PathBuf,
    /// Emotion lexicon TSV (`word<TAB>category<TAB>flag`).
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub antonyms: Option<PathBuf>,
    #[arg(long)]
    pub max_dist: Option<usize>,
    #[arg(long)]
    pub null_model: Option<NullMode>,
    #[arg(long)]
    pub null_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Apply stored min-max parameters instead of fitting on this corpus.
    #[arg(long)]
    pub scaling_params: Option<PathBuf>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// First feature matrix (with --b), or a single matrix split by author (with --corpus).
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Corpora for the story-length comparison when --a/--b are used.
    #[arg(long)]
    pub corpus_a: Option<PathBuf>,
    #[arg(long)]
    pub corpus_b: Option<PathBuf>,
    #[arg(long, default_value = "human")]
    pub label_a: String,
    #[arg(long, default_value = "llm")]
    pub label_b: String,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub scheme: Option<RatingScheme>,
    #[arg(long)]
    pub label_mode: Option<LabelMode>,
    /// gbt, decision_tree or random_forest.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model_name: Option<String>,
    #[arg(long)]
    pub judges: Option<usize>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub participants: Option<usize>,
    /// CSV of `word1,word2,word3` rows; defaults to the seven task prompts.
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model_name: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct DistributionsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub scheme: Option<RatingScheme>,
    /// Second rating of the same stories, for correlations.
    #[arg(long)]
    pub against: Option<PathBuf>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "Reproduction report")]
    pub title: String,
}

/// Resolve the config, run the command inside a sized thread pool, and
/// append the run to the manifest.
pub fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    let started = crate::now();
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut ctx = Ctx::new(&cli.out, config, cli.jobs)?;
    if let Some(p) = &cli.config {
        ctx.record_input(p)?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::input("--jobs must be at least 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(CliError::internal)?;
    let name = cli.command.name();
    pool.install(|| match &cli.command {
        Command::Ingest(a) => commands::ingest::run(&mut ctx, a),
        Command::Featurize(a) => commands::featurize::run(&mut ctx, a),
        Command::Compare(a) => commands::compare::run(&mut ctx, a),
        Command::Train(a) => commands::learn::train(&mut ctx, a),
        Command::Evaluate(a) => commands::learn::evaluate(&mut ctx, a),
        Command::Explain(a) => commands::explain::run(&mut ctx, a),
        Command::Rate(a) => commands::llm::rate(&mut ctx, a),
        Command::Generate(a) => commands::llm::generate(&mut ctx, a),
        Command::Distributions(a) => commands::distributions::run(&mut ctx, a),
        Command::Report(a) => commands::report::run(&mut ctx, a),
    })?;
    ctx.finish(name, argv, started)
}
