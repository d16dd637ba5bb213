use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subcat::rerank::RerankMode;
use subcat_cli::{run_pipeline, run_synth, CliError, Overrides, PipelineConfig, Stage};

#[derive(Parser)]
#[command(name = "subcat", version, about = "Acquire verb subcategorization lexicons from corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tag and lemmatize the corpus.
    Tag(Common),
    /// Parse tagged sentences into ranked analyses.
    Parse(Common),
    /// Extract patternsets for each predicate instance.
    Extract(Common),
    /// Classify patternsets against the class inventory.
    Classify(Common),
    /// Build the filtered lexicon.
    Lexicon(Common),
    /// Score the lexicon against gold entries and parses against gold brackets.
    Evaluate(Common),
    /// Rerank parses with lexical subcategorization frequencies.
    Rerank(Common),
    /// Generate a synthetic corpus with gold labels.
    Synth(Common),
    /// Run several stages in order.
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated stages, or `all`.
        #[arg(long, default_value = "all")]
        stages: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Rerank scoring: raw or smoothed.
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn load(&self) -> Result<PipelineConfig, CliError> {
        let mode = self
            .mode
            .as_deref()
            .map(str::parse::<RerankMode>)
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let overrides = Overrides {
            threshold: self.threshold,
            k: self.k,
            seed: self.seed,
            workers: self.workers,
            mode,
        };
        PipelineConfig::load(&self.config, &overrides)
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    let (common, stages) = match cmd {
        Command::Synth(c) => return run_synth(&c.load()?),
        Command::Run { common, stages } => (common, Stage::parse_list(&stages)?),
        Command::Tag(c) => (c, vec![Stage::Tag]),
        Command::Parse(c) => (c, vec![Stage::Parse]),
        Command::Extract(c) => (c, vec![Stage::Extract]),
        Command::Classify(c) => (c, vec![Stage::Classify]),
        Command::Lexicon(c) => (c, vec![Stage::Lexicon]),
        Command::Evaluate(c) => (c, vec![Stage::Evaluate]),
        Command::Rerank(c) => (c, vec![Stage::Rerank]),
    };
    run_pipeline(&common.load()?, &stages)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
