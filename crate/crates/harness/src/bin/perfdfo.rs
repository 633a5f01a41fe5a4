use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use perfdfo::{presets, run_diag, run_experiment, DiagConfig, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "perfdfo", version, about = "Derivative-free performative optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment document.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Estimate estimator moments from a diagnostics document.
    Diag {
        #[arg(long)]
        config: PathBuf,
        /// CSV path (overrides `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in experiment documents.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Dump { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("perfdfo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { config, out, workers } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = run_experiment(&cfg, out.as_deref(), workers)?;
            for a in &summary.algorithms {
                println!(
                    "{:<20} epochs={:<8} completed={} diverged={}",
                    a.label,
                    a.epochs,
                    a.completed(),
                    a.diverged()
                );
            }
            println!("manifest: {}", summary.manifest.display());
        }
        Command::Diag { config, out } => {
            let cfg = DiagConfig::load(&config)?;
            let (path, rows) = run_diag(&cfg, out.as_deref())?;
            for r in &rows {
                println!(
                    "check {} {:<13} delta={} cov_trace={:.6e} mean={:?}",
                    r.check, r.estimator, r.delta, r.report.cov_trace, r.report.mean
                );
            }
            println!("moments: {}", path.display());
        }
        Command::Presets { action: PresetAction::List } => {
            for name in presets::EXPERIMENTS.iter().chain(presets::DIAGNOSTICS.iter()) {
                println!("{name:<14} {}", presets::describe(name).unwrap_or(""));
            }
        }
        Command::Presets { action: PresetAction::Dump { name } } => {
            if let Some(cfg) = presets::experiment(&name) {
                println!("{}", cfg.to_json());
            } else if let Some(cfg) = presets::diagnostic(&name) {
                println!("{}", cfg.to_json());
            } else {
                return Err(HarnessError::config(format!("unknown preset `{name}`")));
            }
        }
    }
    Ok(())
}
