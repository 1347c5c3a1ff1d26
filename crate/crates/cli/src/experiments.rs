use std::fs::File;
use std::io::BufReader;

use hamrecon::bw::{self, MAX_BLOCK, MIN_BLOCK};
use hamrecon::chain::{self, assemble_hamiltonian, BondSum, OperatorKind};
use hamrecon::lanczos::{self, GroundStateResult, LanczosConfig};
use hamrecon::qcm::{self, correlation_matrix, reconstruct_theta};
use hamrecon::registry::Registry;
use hamrecon::xvbs::{self, build_xvbs_mps, default_boundary};
use hamrecon::{Error, Result};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{Artifact, Cell, CsvTable};

/// One command-line pipeline.
pub trait Experiment: Send + Sync {
    fn summary(&self) -> &'static str;
    fn default_length(&self) -> usize;
    fn validate(&self, cfg: &RunConfig) -> Result<()>;
    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>>;
}

pub fn experiments() -> Registry<dyn Experiment> {
    let mut reg: Registry<dyn Experiment> = Registry::new("command");
    reg.register("ground", Box::new(Ground));
    reg.register("entropy-profile", Box::new(EntropyProfile));
    reg.register("xvbs-entropy", Box::new(XvbsEntropy));
    reg.register("fluct-scan", Box::new(FluctScan));
    reg.register("qcm", Box::new(Qcm));
    reg.register("bw-fit", Box::new(BwFit));
    reg
}

const RITZ_VALUES: usize = 4;
/// Largest length assembled as an explicit sparse matrix.
const MAX_ASSEMBLED: usize = 7;
const ENTROPY_PROFILE_MAX_LENGTH: usize = 8;

fn solve(cfg: &RunConfig) -> Result<GroundStateResult> {
    let lc = LanczosConfig { tol: cfg.tol, k: RITZ_VALUES, seed: cfg.seed, ..Default::default() };
    if cfg.length <= MAX_ASSEMBLED {
        lanczos::ground_state(&assemble_hamiltonian(cfg.length, cfg.theta0)?, &lc)
    } else {
        lanczos::ground_state(&BondSum::new(OperatorKind::Hamiltonian { theta: cfg.theta0 }, cfg.length)?, &lc)
    }
}

/// The ground state of `H(θ₀)`, loaded from `--state` when given.
fn chain_state(cfg: &RunConfig) -> Result<Vec<f64>> {
    match &cfg.state {
        Some(path) => {
            let (length, theta, psi) = chain::read_state(BufReader::new(File::open(path)?))?;
            if length != cfg.length || theta != cfg.theta0 {
                return Err(Error::InvalidParameter(format!(
                    "state file holds L = {length}, θ = {theta}; run asks for L = {}, θ = {}",
                    cfg.length, cfg.theta0
                )));
            }
            Ok(psi)
        }
        None => Ok(solve(cfg)?.vector),
    }
}

pub struct Ground;

#[derive(Serialize)]
struct GroundSummary {
    length: usize,
    theta0: f64,
    hilbert_dim: usize,
    energy: f64,
    residual: f64,
    matvecs: usize,
    ritz_values: Vec<f64>,
    gap_above_ground_multiplet: Option<f64>,
}

impl Experiment for Ground {
    fn summary(&self) -> &'static str {
        "ground state energy and state file"
    }

    fn default_length(&self) -> usize {
        6
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_chain_length()
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let gs = solve(cfg)?;
        let mut state = Vec::new();
        chain::write_state(&mut state, cfg.length, cfg.theta0, &gs.vector)?;
        let summary = GroundSummary {
            length: cfg.length,
            theta0: cfg.theta0,
            hilbert_dim: gs.vector.len(),
            energy: gs.energy,
            residual: gs.residual,
            matvecs: gs.matvecs,
            ritz_values: gs.degeneracy_report.ritz_values.clone(),
            gap_above_ground_multiplet: gs.degeneracy_report.gap_above_multiplet(1e-8),
        };
        Ok(vec![Artifact::new("ground.bin", state), Artifact::json("ground.json", &summary)])
    }
}

fn cuts(cfg: &RunConfig) -> Vec<usize> {
    match cfg.cut {
        Some(c) => vec![c],
        None => (1..cfg.length).collect(),
    }
}

pub struct EntropyProfile;

impl Experiment for EntropyProfile {
    fn summary(&self) -> &'static str {
        "entanglement entropy of the exact ground state at every cut"
    }

    fn default_length(&self) -> usize {
        6
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_length(chain::MIN_LENGTH, ENTROPY_PROFILE_MAX_LENGTH)?;
        cfg.check_cut()
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let psi = chain_state(cfg)?;
        let mut table = CsvTable::new(&["cut", "entropy"]);
        for cut in cuts(cfg) {
            let s = chain::von_neumann(&chain::cut_spectrum(&psi, cut)?);
            table.row(vec![cut.into(), s.into()]);
        }
        Ok(vec![table.into_artifact("entropy_profile.csv")])
    }
}

pub struct XvbsEntropy;

#[derive(Serialize)]
struct XvbsSummary {
    length: usize,
    max_abs_diff_exact: f64,
    max_abs_diff_symmetrized: f64,
    exact_agrees: bool,
    symmetrized_agrees: bool,
    tolerance: f64,
}

const XVBS_AGREEMENT: f64 = 1e-10;
const XVBS_MAX_LENGTH: usize = 79;

impl Experiment for XvbsEntropy {
    fn summary(&self) -> &'static str {
        "closed-form versus transfer-matrix entropy of the exact MPS"
    }

    fn default_length(&self) -> usize {
        15
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_length(3, XVBS_MAX_LENGTH)?;
        if cfg.length % 2 == 0 {
            return Err(Error::EvenOrShortLength(cfg.length));
        }
        cfg.check_cut()
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let mps = build_xvbs_mps(cfg.length, default_boundary())?;
        let formulas = xvbs::entropy_formulas();
        let (exact, symmetrized) = (formulas.get("exact")?, formulas.get("symmetrized")?);
        let mut table = CsvTable::new(&[
            "cut",
            "transfer_matrix",
            "exact_formula",
            "symmetrized_formula",
            "exact_abs_diff",
            "symmetrized_abs_diff",
        ]);
        let (mut max_exact, mut max_symmetrized) = (0.0f64, 0.0f64);
        for cut in cuts(cfg) {
            let tm = mps.schmidt_spectrum(cut)?.entropy();
            let e = exact.entropy_at_cut(cfg.length, cut)?;
            let p = symmetrized.entropy_at_cut(cfg.length, cut)?;
            max_exact = max_exact.max((e - tm).abs());
            max_symmetrized = max_symmetrized.max((p - tm).abs());
            table.row(vec![cut.into(), tm.into(), e.into(), p.into(), (e - tm).abs().into(), (p - tm).abs().into()]);
        }
        let summary = XvbsSummary {
            length: cfg.length,
            max_abs_diff_exact: max_exact,
            max_abs_diff_symmetrized: max_symmetrized,
            exact_agrees: max_exact <= XVBS_AGREEMENT,
            symmetrized_agrees: max_symmetrized <= XVBS_AGREEMENT,
            tolerance: XVBS_AGREEMENT,
        };
        Ok(vec![table.into_artifact("xvbs_entropy.csv"), Artifact::json("xvbs_entropy.json", &summary)])
    }
}

pub struct FluctScan;

#[derive(Serialize)]
struct FluctSummary {
    length: usize,
    theta0: f64,
    argmin_theta: f64,
    min_variance: f64,
    variance_at_theta0: f64,
    min_second_difference: f64,
    convex: bool,
    /// False when the covariance matrix leaves θ undetermined, in which case
    /// the curve is flat and `argmin_theta` carries no information.
    identifiable: bool,
}

impl Experiment for FluctScan {
    fn summary(&self) -> &'static str {
        "variance of H(θ) in the ground state of H(θ₀) along a θ grid"
    }

    fn default_length(&self) -> usize {
        6
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_chain_length()
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let psi = chain_state(cfg)?;
        let m = correlation_matrix(&psi)?;
        let curve = qcm::fluctuation_curve(&m, &cfg.theta_grid.values());
        let mut table = CsvTable::new(&["theta", "variance"]);
        for (t, v) in curve.thetas.iter().zip(&curve.variances) {
            table.row(vec![(*t).into(), (*v).into()]);
        }
        let k = curve.argmin();
        let min_second_difference = curve.second_differences().into_iter().fold(f64::INFINITY, f64::min);
        let summary = FluctSummary {
            length: cfg.length,
            theta0: cfg.theta0,
            argmin_theta: curve.thetas[k],
            min_variance: curve.variances[k],
            variance_at_theta0: m.variance_at(cfg.theta0),
            min_second_difference: if min_second_difference.is_finite() { min_second_difference } else { 0.0 },
            convex: min_second_difference >= -1e-9,
            identifiable: !reconstruct_theta(&m).ambiguous,
        };
        Ok(vec![table.into_artifact("fluct_scan.csv"), Artifact::json("fluct_scan.json", &summary)])
    }
}

pub struct Qcm;

#[derive(Serialize)]
struct QcmSummary {
    length: usize,
    theta0: f64,
    theta_hat: f64,
    abs_error: f64,
    weight_vector: [f64; 2],
    residual: f64,
    gap: f64,
    ambiguous: bool,
    correlation_matrix: [[f64; 2]; 2],
    means: [f64; 2],
}

impl Experiment for Qcm {
    fn summary(&self) -> &'static str {
        "θ from the null vector of the ground-state covariance matrix"
    }

    fn default_length(&self) -> usize {
        6
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_chain_length()
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let psi = chain_state(cfg)?;
        let m = correlation_matrix(&psi)?;
        let est = reconstruct_theta(&m);
        let e = &m.entries;
        let summary = QcmSummary {
            length: cfg.length,
            theta0: cfg.theta0,
            theta_hat: est.theta_hat,
            abs_error: (est.theta_hat - cfg.theta0).abs(),
            weight_vector: [est.weight_vector[0], est.weight_vector[1]],
            residual: est.residual,
            gap: est.gap,
            ambiguous: est.ambiguous,
            correlation_matrix: [[e[(0, 0)], e[(0, 1)]], [e[(1, 0)], e[(1, 1)]]],
            means: [m.means[0], m.means[1]],
        };
        Ok(vec![Artifact::json("qcm.json", &summary)])
    }
}

pub struct BwFit;

#[derive(Serialize)]
struct BwSummary {
    length: usize,
    theta0: f64,
    subsystem: usize,
    weight_convention: String,
    joint_beta: bool,
    theta_hat: f64,
    beta_hat: f64,
    sin_abs_error: f64,
    min_relative_entropy: f64,
    coarse_minimum: f64,
    boundary_flag: bool,
    converged: bool,
    profile_gradient_sign_changes: usize,
}

impl Experiment for BwFit {
    fn summary(&self) -> &'static str {
        "Bisognano–Wichmann fit of the leading-block density matrix"
    }

    fn default_length(&self) -> usize {
        7
    }

    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        cfg.check_chain_length()?;
        if !(MIN_BLOCK..=MAX_BLOCK).contains(&cfg.subsystem) || cfg.subsystem >= cfg.length {
            return Err(Error::BlockOutOfRange {
                sites: cfg.subsystem,
                min: MIN_BLOCK,
                max: MAX_BLOCK.min(cfg.length - 1),
            });
        }
        Ok(())
    }

    fn run(&self, cfg: &RunConfig) -> Result<Vec<Artifact>> {
        let psi = chain_state(cfg)?;
        let rho = chain::reduced_density_matrix(&psi, cfg.subsystem)?;
        let conventions = bw::weight_conventions();
        let conv = conventions.get(&cfg.weight_convention)?;
        let opts = cfg.fit_options();
        let fit = bw::fit(&rho, conv, &opts)?;

        let mut surface = CsvTable::new(&["theta", "beta", "relative_entropy"]);
        for s in &fit.scan_surface {
            surface.row(vec![s.theta.into(), s.beta.into(), s.relative_entropy.into()]);
        }
        let thetas = opts.theta_grid();
        let profile_values = bw::theta_profile(&rho, conv, fit.beta_hat, &thetas)?;
        let mut profile = CsvTable::new(&["theta", "relative_entropy"]);
        for (t, v) in thetas.iter().zip(&profile_values) {
            profile.row(vec![Cell::Float(*t), Cell::Float(*v)]);
        }
        let summary = BwSummary {
            length: cfg.length,
            theta0: cfg.theta0,
            subsystem: cfg.subsystem,
            weight_convention: cfg.weight_convention.clone(),
            joint_beta: cfg.joint_beta,
            theta_hat: fit.theta_hat,
            beta_hat: fit.beta_hat,
            sin_abs_error: (fit.theta_hat.sin() - cfg.theta0.sin()).abs(),
            min_relative_entropy: fit.min_relative_entropy,
            coarse_minimum: fit.coarse_minimum,
            boundary_flag: fit.boundary_flag,
            converged: fit.converged,
            profile_gradient_sign_changes: bw::gradient_sign_changes(&profile_values),
        };
        Ok(vec![
            surface.into_artifact("bw_fit_surface.csv"),
            profile.into_artifact("bw_fit_profile.csv"),
            Artifact::json("bw_fit.json", &summary),
        ])
    }
}
