use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levy_reorder_cli::{run, CliError, Command, ExperimentConfig, Settings};

#[derive(Parser)]
#[command(name = "levy-reorder", version, about = "Couple Brownian and Lévy paths by reordering increments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Flat TOML file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Write one coupled pair of paths
    Couple,
    /// Root mean squared maximal distance and endpoint error
    Msmd,
    /// RMS distance as a function of k
    SweepK,
    /// RMS distance of two-level couplings
    TwoLevel,
    /// Distance histogram and example paths at fixed k
    Showcase,
    /// Best k and distance for shrinking annulus models
    LimitRegime,
    /// Multilevel variance and cost tables for both couplings
    MlmcBench,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Couple => Command::Couple,
            Sub::Msmd => Command::Msmd,
            Sub::SweepK => Command::SweepK,
            Sub::TwoLevel => Command::TwoLevel,
            Sub::Showcase => Command::Showcase,
            Sub::LimitRegime => Command::LimitRegime,
            Sub::MlmcBench => Command::MlmcBench,
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let cfg = ExperimentConfig::resolve(cli.command.into(), cli.settings.over(file))?;
    let (files, summary) = run(&cfg)?;
    for line in summary {
        println!("{line}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
