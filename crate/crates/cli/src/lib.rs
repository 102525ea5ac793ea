//! Command-line driver: spectra, heat traces, coefficient fits, predictions
//! and self-checks for surfaces of revolution with conic tips.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use conic_heat::AngleConvention;

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "conic-heat", version, about = "Heat-trace asymptotics of surfaces with conic tips")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: the config's `out`, else ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Spectrum cache directory.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads for the solver.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reading of the tip slope as an angle: sin or tan.
    #[arg(long, global = true)]
    pub convention: Option<AngleConvention>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenvalues below lambda_max, as CSV.
    Spectrum,
    /// Heat trace on the time grid with truncation bounds.
    HeatTrace,
    /// Fit the short-time expansion and compare with the predictions.
    Fit,
    /// Closed-form coefficient predictions.
    Predict,
    /// Analytic self-checks.
    Verify,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let ctx = commands::Context {
        out: commands::resolve_out(cli.out.as_deref(), config.as_ref()),
        cache: cli.cache.clone().or_else(|| config.as_ref().and_then(|c| c.cache.clone())),
        convention: cli
            .convention
            .or_else(|| config.as_ref().map(|c| c.convention))
            .unwrap_or_default(),
        config,
    };
    match cli.command {
        Command::Spectrum => commands::cmd_spectrum(&ctx),
        Command::HeatTrace => commands::cmd_heat_trace(&ctx),
        Command::Fit => commands::cmd_fit(&ctx),
        Command::Predict => commands::cmd_predict(&ctx),
        Command::Verify => commands::cmd_verify(&ctx),
    }
}
