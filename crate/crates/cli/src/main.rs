//! `nashlq` experiment driver.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nashlq::GameError;

/// Exit status when a check finds a counterexample or misses its tolerance.
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INVALID_CONFIG: u8 = 2;
pub const EXIT_NOT_POSITIVE_DEFINITE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "nashlq", version, about = "Gradient-play experiments for scalar-gain LQ games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run projected gradient play and write the stage history.
    Learn,
    /// Rerun the two-round 5-player benchmark and compare with the reference table.
    ReproducePaper,
    /// Sample the action box for violations of the Rosen condition.
    CheckRosen {
        /// Sweep a random matrix ensemble instead of a single game.
        #[arg(long)]
        ensemble: bool,
    },
    /// Generate random symmetric SDD matrices with a verification report.
    GenMatrix,
    /// Compare Monte Carlo cost estimates with the closed form at one profile.
    Simulate,
}

/// Options shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    /// TOML experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "NASHLQ_SEED", value_name = "U64")]
    pub seed: Option<u64>,
    /// exact | model-free
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub stages: Option<usize>,
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub step_size: Option<f64>,
    /// Early-exit threshold on the max-norm of the exact gradient.
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub grad_tol: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub batch: Option<usize>,
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// paper | scalar | diagonal | two-player
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Initial (or evaluated) profile, comma separated.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub k0: Option<Vec<f64>>,
    /// csv | json-lines
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Rosen samples per game.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Matrix dimension for gen-matrix.
    #[arg(long, global = true, value_name = "N")]
    pub n: Option<usize>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<GameError>() {
        return match e {
            GameError::NotPositiveDefinite { .. } => EXIT_NOT_POSITIVE_DEFINITE,
            _ => EXIT_INVALID_CONFIG,
        };
    }
    EXIT_IO
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::ExperimentConfig::load(cli.overrides.config.as_deref())
        .and_then(|mut cfg| cfg.apply(&cli.overrides).map(|_| cfg))
        .map_err(anyhow::Error::from)
        .and_then(|cfg| match cli.command {
            Command::Learn => commands::learn(&cfg),
            Command::ReproducePaper => commands::reproduce_paper(&cfg),
            Command::CheckRosen { ensemble } => commands::check_rosen(&cfg, ensemble),
            Command::GenMatrix => commands::gen_matrix(&cfg),
            Command::Simulate => commands::simulate(&cfg),
        });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
