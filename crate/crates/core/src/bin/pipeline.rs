//! Batch pipeline CLI: ingest, generate, evaluate, report.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use synterview::commands::{
    cmd_evaluate, cmd_generate, cmd_ingest, cmd_report, parse_axes, Axis, CmdFailure, MockKind,
    EXIT_CONFIG,
};
use synterview::config::RunConfig;
use synterview::eval::Metric;

#[derive(Parser)]
#[command(
    name = "pipeline",
    version,
    about = "Generate and evaluate privacy-preserving synthetic interview summaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the corpus and write distribution reports.
    Ingest(RunArgs),
    /// Run two-step generation over the train split.
    Generate(RunArgs),
    /// Run evaluation axes over an existing generation run.
    Evaluate(RunArgs),
    /// Print a consolidated view of existing artifacts.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Offline chat transport for generate: echo, template, or garbage.
    #[arg(long, value_parser = MockKind::from_str)]
    mock: Option<MockKind>,
    /// Comma-separated evaluation axes; default utility,fidelity,privacy.
    #[arg(long)]
    axes: Option<String>,
    /// Distance metric override for privacy reports: l2 or cosine.
    #[arg(long, value_parser = Metric::from_str)]
    metric: Option<Metric>,
    /// Print generated text to stdout (kept off by default).
    #[arg(long)]
    show_text: bool,
}

fn run(command: Command) -> Result<(), CmdFailure> {
    let args = match &command {
        Command::Ingest(a) | Command::Generate(a) | Command::Evaluate(a) | Command::Report(a) => a,
    };
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(metric) = args.metric {
        cfg.evaluation.metric = metric;
    }
    match &command {
        Command::Ingest(_) => cmd_ingest(&cfg),
        Command::Generate(args) => cmd_generate(&cfg, args.mock, args.show_text),
        Command::Evaluate(args) => {
            let axes = match &args.axes {
                Some(raw) => parse_axes(raw).map_err(|e| CmdFailure::new(EXIT_CONFIG, e))?,
                None => Axis::ALL.to_vec(),
            };
            cmd_evaluate(&cfg, &axes)
        }
        Command::Report(_) => cmd_report(&cfg),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli.command) {
        eprintln!("error: {failure}");
        std::process::exit(failure.exit_code);
    }
}
