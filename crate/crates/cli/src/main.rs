use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tct_cli::config::{Overrides, RunConfig};
use tct_cli::demo::{write_demo, DemoKind};
use tct_cli::{run_analyze, run_compute, CliError};

#[derive(Parser)]
#[command(name = "tct", version, about = "Compute text characteristics and relate them to model outcomes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (overrides the config).
    #[arg(long)]
    workers: Option<usize>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        RunConfig::load(
            &self.config,
            &Overrides {
                workers: self.workers,
                seed: self.seed,
                out_dir: self.out.clone(),
            },
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute characteristics for every fragment of a dataset into a CSV.
    Compute(RunArgs),
    /// Join characteristics with outcomes and write the report bundle.
    Analyze(RunArgs),
    /// Write a synthetic dataset, outcome file and config to a directory.
    Demo {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "length-concreteness")]
        kind: DemoKind,
        #[arg(long, default_value_t = 5000)]
        records: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(args) => {
            let summary = run_compute(&args.load()?)?;
            if !summary.skipped.is_empty() {
                log::warn!("{} records skipped", summary.skipped.len());
            }
        }
        Command::Analyze(args) => {
            let result = run_analyze(&args.load()?)?;
            print!("{}", result.summary);
            println!("report written to {}", result.report_dir.display());
        }
        Command::Demo { out, kind, records, seed } => write_demo(kind, &out, seed, records)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
