//! `codecite`: find, extract and analyse literature references in source
//! code comments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codecite::EntityType;

#[derive(Debug, Parser)]
#[command(
    name = "codecite",
    version,
    about = "Detect literature references in source code comments"
)]
pub struct Cli {
    /// Pipeline configuration (TOML, or JSON by extension). Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for extraction, tagging and detection.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Seed for every random draw [default: 42].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List repositories and apply the activity filter.
    Scan(ScanArgs),
    /// Extract, normalize and deduplicate comments into JSONL.
    Extract(ExtractArgs),
    /// Train a tagger on annotated comments.
    Train(TrainArgs),
    /// Tag comments with entity spans.
    Tag(TagArgs),
    /// Detect references and write detections.jsonl.
    Detect(DetectArgs),
    /// Cross-validate every criterion on annotated comments.
    Evaluate(EvaluateArgs),
    /// Vary the largest allowed gap and report detection quality.
    Sweep(SweepArgs),
    /// Compute sample sizes or draw keyword-group samples.
    Sample(SampleArgs),
    /// Aggregate detections into tables.
    Report(ReportArgs),
    /// Count comments that mention a title.
    Search(SearchArgs),
    /// Inter-annotator agreement from a dual-annotation CSV.
    Kappa(KappaArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus directory holding one subdirectory per repository (repeatable).
    #[arg(long, value_name = "DIR")]
    pub corpus: Vec<PathBuf>,
    /// Keep repositories that fail the activity filter.
    #[arg(long)]
    pub all_repos: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Write the JSON summary here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Skip files larger than this many bytes.
    #[arg(long)]
    pub max_file_size: Option<u64>,
    /// Output JSONL; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Annotated comments (JSONL).
    #[arg(long)]
    pub gold: PathBuf,
    /// Where to write the model.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Directory with venues.txt, months.txt and publishers.txt.
    #[arg(long, value_name = "DIR")]
    pub lexicons: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comments JSONL from `extract`.
    #[arg(long = "in", short)]
    pub input: PathBuf,
    /// Output JSONL; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    /// Largest allowed distance in characters between neighbouring spans.
    #[arg(long, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub max_gap: Option<i64>,
    /// Required entity types, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "TYPES")]
    pub require: Vec<EntityType>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comments JSONL from `extract`.
    #[arg(long = "in", short)]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    /// Also write every record as BibTeX to <out-dir>/references.bib.
    #[arg(long)]
    pub bibtex: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Annotated comments (JSONL).
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub max_gap: Option<i64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Dual-annotation CSV (item,rater_a,rater_b) to check agreement first.
    #[arg(long, value_name = "CSV")]
    pub kappa: Option<PathBuf>,
    /// Also write metrics.csv, entities.csv and baseline.json here.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// Tag with this model; otherwise use out-of-fold predictions.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub from: usize,
    #[arg(long, default_value_t = 10)]
    pub to: usize,
    #[arg(long, value_delimiter = ',', value_name = "TYPES")]
    pub require: Vec<EntityType>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Print the sample size for a population of this size.
    #[arg(long, conflicts_with = "input")]
    pub population: Option<u64>,
    /// Comments JSONL to group and sample.
    #[arg(long = "in", short, requires = "keyword")]
    pub input: Option<PathBuf>,
    /// Keyword to group by (repeatable).
    #[arg(long)]
    pub keyword: Vec<String>,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Margin of error in percentage points.
    #[arg(long, default_value_t = 5.0)]
    pub interval: f64,
    /// Write <keyword>_a.jsonl and <keyword>_b.jsonl samples here.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// detections.jsonl from `detect`.
    #[arg(long = "in", short)]
    pub input: PathBuf,
    /// csv, md or json.
    #[arg(long, default_value = "md")]
    pub format: codecite::report::ReportFormat,
    /// Smallest count listed in the title and venue tables.
    #[arg(long, default_value_t = 20)]
    pub min_count: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Comments JSONL from `extract`.
    #[arg(long = "in", short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub query: String,
    #[arg(long, default_value = "md")]
    pub format: codecite::report::ReportFormat,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    /// CSV with columns item,rater_a,rater_b.
    #[arg(long = "in", short)]
    pub input: PathBuf,
}

/// Invalid input that the argument parser could not catch.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<config::ConfigError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
