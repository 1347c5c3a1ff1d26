//! Command-line pipelines over the `hamrecon` library.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use hamrecon::{Error, Result};

pub use config::{Cli, RunConfig};
pub use experiments::{experiments, Experiment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. }
        | Error::ThermalOverflow { .. }
        | Error::NotNormalized { .. }
        | Error::ChiOverflow(_)
        | Error::Domain(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Resolves, validates and runs one command; returns the written artifact paths.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let registry = experiments();
    let experiment = registry.get(&cli.command)?;
    let config = RunConfig::from_cli(cli, experiment.default_length());
    config.validate_common()?;
    experiment.validate(&config)?;
    let start = Instant::now();
    let artifacts = experiment.run(&config)?;
    output::write_artifacts(&config.out, &artifacts, &config, start.elapsed())
}
