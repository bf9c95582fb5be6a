//! Command-line front end. Exit codes: 0 success, 2 configuration error,
//! 3 infeasible physics, 4 numerical failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigError, OutputFormat, RunConfig, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "soc-accel", version, about = "Spin-orbit-coupled trapped-atom accelerometer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Monte-Carlo seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads for sweeps and sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Normal-mode frequencies and oscillator length.
    Modes,
    /// Trap-relative paths of both interferometer arms.
    Trajectory,
    /// Ramsey and echo response curves with zeros and peaks.
    Response,
    /// Thermal Monte-Carlo average against the analytic suppression.
    Thermal,
    /// Sensitivity budget, trap optimum and atom-number sweep.
    Sensitivity,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Run(crate::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crate::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Run(E::Parameter(_) | E::Sequence(_) | E::Coverage { .. }) => 2,
            CliError::Run(E::InfeasibleGeometry { .. }) => 3,
            CliError::Run(_) | CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("soc-accel: {e}");
            e.exit_code()
        }
    }
}
