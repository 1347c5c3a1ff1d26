use std::path::PathBuf;

use clap::{ArgAction, Parser};
use hamrecon::bw::{self, FitOptions};
use hamrecon::chain::{MAX_LENGTH, MIN_LENGTH};
use hamrecon::{Error, Result};
use serde::Serialize;

pub const DEFAULT_THETA0: f64 = 0.45;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Reconstruct SU(4) chain couplings from ground-state data.
#[derive(Debug, Clone, Parser)]
#[command(name = "hamrecon", version)]
pub struct Cli {
    /// One of: ground, entropy-profile, xvbs-entropy, fluct-scan, qcm, bw-fit
    pub command: String,

    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
    pub theta_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.85)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 0.02)]
    pub theta_step: f64,
    #[arg(long, default_value_t = 0.05)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 25)]
    pub beta_points: usize,
    /// Restrict entropy outputs to a single bond.
    #[arg(long)]
    pub cut: Option<usize>,
    /// Leading block size for bw-fit.
    #[arg(long, default_value_t = 3)]
    pub subsystem: usize,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "hamrecon-out")]
    pub out: PathBuf,
    #[arg(long, default_value = "integer")]
    pub weight_convention: String,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub joint_beta: bool,
    /// Read the chain state from a file written by `ground` instead of
    /// recomputing it.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

/// Fully resolved run parameters; echoed into every manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub length: usize,
    pub theta0: f64,
    pub theta_grid: GridSpec,
    pub beta_range: (f64, f64),
    pub beta_points: usize,
    pub cut: Option<usize>,
    pub subsystem: usize,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub weight_convention: String,
    pub joint_beta: bool,
    pub state: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.min + self.step * i as f64).collect()
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl RunConfig {
    pub fn from_cli(cli: Cli, default_length: usize) -> Self {
        Self {
            command: cli.command,
            length: cli.length.unwrap_or(default_length),
            theta0: cli.theta0.unwrap_or(DEFAULT_THETA0),
            theta_grid: GridSpec { min: cli.theta_min, max: cli.theta_max, step: cli.theta_step },
            beta_range: (cli.beta_min, cli.beta_max),
            beta_points: cli.beta_points,
            cut: cli.cut,
            subsystem: cli.subsystem,
            tol: cli.tol,
            seed: cli.seed,
            out: cli.out,
            weight_convention: cli.weight_convention,
            joint_beta: cli.joint_beta,
            state: cli.state,
        }
    }

    pub fn check_length(&self, min: usize, max: usize) -> Result<()> {
        if (min..=max).contains(&self.length) {
            Ok(())
        } else {
            Err(Error::LengthOutOfRange { length: self.length, min, max })
        }
    }

    /// Length range of the exact-diagonalization pipelines.
    pub fn check_chain_length(&self) -> Result<()> {
        self.check_length(MIN_LENGTH, MAX_LENGTH)
    }

    /// Checks shared by every command.
    pub fn validate_common(&self) -> Result<()> {
        if !self.theta0.is_finite() {
            return Err(invalid("theta0 must be finite"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        let g = self.theta_grid;
        if !(g.min.is_finite() && g.max.is_finite() && g.min <= g.max && g.step > 0.0) {
            return Err(invalid(format!("bad theta grid {}..{} step {}", g.min, g.max, g.step)));
        }
        if g.points() > 100_000 {
            return Err(invalid("theta grid has more than 100000 points"));
        }
        let (b0, b1) = self.beta_range;
        if !(b0 > 0.0 && b1.is_finite() && b0 <= b1 && self.beta_points > 0) {
            return Err(invalid(format!("bad beta grid {b0}..{b1} x {}", self.beta_points)));
        }
        bw::weight_conventions().get(&self.weight_convention)?;
        Ok(())
    }

    pub fn check_cut(&self) -> Result<()> {
        match self.cut {
            Some(c) if c == 0 || c >= self.length => Err(Error::CutOutOfRange { cut: c, max: self.length - 1 }),
            _ => Ok(()),
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        let g = self.theta_grid;
        FitOptions {
            theta_range: (g.min, g.min + g.step * (g.points() - 1) as f64),
            theta_points: g.points(),
            beta_range: self.beta_range,
            beta_points: self.beta_points,
            joint: self.joint_beta,
            ..Default::default()
        }
    }
}
