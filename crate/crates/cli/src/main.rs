//! `fiqs`: score the information quality of a state-partitioned FAQ corpus.

mod config;
mod manifest;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fiqs_core::Scope;

use crate::config::RunConfig;
use crate::pipeline::{CliError, Pipeline};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScopeArg {
    Q,
    A,
    Qa,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::Q => Scope::Q,
            ScopeArg::A => Scope::A,
            ScopeArg::Qa => Scope::QA,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fiqs",
    version,
    about = "FAQ information quality scoring over a state-partitioned corpus",
    after_help = "Exit codes: 0 success, 1 validation error, 2 data error.\n\
                  FIQS_THREADS caps the worker thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Corpus JSON (flat array or state map)
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for report files
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Text scope for readability, topics, and sentiment
    #[arg(long, global = true, value_enum)]
    scope: Option<ScopeArg>,

    /// Random seed for topic modeling
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Sigma multiplier for leader/laggard cutoffs (1 or 2)
    #[arg(long = "k-sigma", global = true)]
    k_sigma: Option<u8>,

    /// Generated-answer predictions JSON enabling the developer index
    #[arg(long, global = true)]
    predictions: Option<PathBuf>,

    /// External question-embedding sidecar JSON for specificity
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load, clean, and deduplicate; emit the canonical corpus
    Ingest,
    /// Per-state Q&A counts and length statistics
    Stats,
    /// The five readability indices per state
    Readability,
    /// Extractive summaries scored with the relevance metric suite
    Summarize,
    /// Topic model, topic quality scores, and per-state topic scores
    Topics,
    /// Lexicon sentiment with state aggregation
    Sentiment,
    /// Generic-versus-specific question counts
    Specificity,
    /// Composite indices and leader/laggard labels
    Score,
    /// Everything: all tables plus heatmap and scatter data
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Stats => "stats",
            Command::Readability => "readability",
            Command::Summarize => "summarize",
            Command::Topics => "topics",
            Command::Sentiment => "sentiment",
            Command::Specificity => "specificity",
            Command::Score => "score",
            Command::Report => "report",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(input) = &cli.input {
        config.input = Some(input.clone());
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(scope) = cli.scope {
        config.scope = scope.into();
    }
    if let Some(seed) = cli.seed {
        config.topics.seed = seed;
    }
    if let Some(k) = cli.k_sigma {
        config.k_sigma = k;
    }
    if let Some(predictions) = &cli.predictions {
        config.predictions = Some(predictions.clone());
    }
    if let Some(embeddings) = &cli.embeddings {
        config.embeddings = Some(embeddings.clone());
    }
    config.validate()?;
    Ok(config)
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("FIQS_THREADS") {
        match raw.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring FIQS_THREADS={raw}"),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = resolve_config(cli).map_err(CliError::Validation)?;
    let mut pipeline = Pipeline::load(config)?;
    match cli.command {
        Command::Ingest => pipeline.run_ingest()?,
        Command::Stats => pipeline.run_stats()?,
        Command::Readability => pipeline.run_readability(&[pipeline.config.scope])?,
        Command::Summarize => {
            let target = pipeline.config.summary.target;
            pipeline.run_summarize(&[target])?
        }
        Command::Topics => pipeline.run_topics(true)?,
        Command::Sentiment => pipeline.run_sentiment(&[pipeline.config.scope])?,
        Command::Specificity => pipeline.run_specificity()?,
        Command::Score => pipeline.run_score()?,
        Command::Report => pipeline.run_report()?,
    }
    manifest::write_manifest(cli.command.name(), &pipeline.config, &pipeline.outputs)?;
    Ok(())
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                // unknown subcommands and bad flags are validation failures
                ExitCode::from(1)
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(error)) => {
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
    }
}
