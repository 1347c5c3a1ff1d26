//! Lattice Bisognano–Wichmann ansatz for the reduced density matrix of a
//! leading block, and the relative-entropy fit of `(θ, β)`.
//!
//! `H_A(θ) = Σ_i x_i H_i(θ)` over the bonds inside the block, with weights
//! growing away from the entangling cut at the block's right edge, and
//! `σ = exp(−β H_A) / Z`.

use nalgebra::DMatrix;

use crate::chain::{von_neumann, DensityMatrix, ENTROPY_CUTOFF};
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::registry::Registry;
use crate::su4::{self, bond_weights, LOCAL_DIM};

pub const MIN_BLOCK: usize = 2;
pub const MAX_BLOCK: usize = 5;
/// Relative entropies below `-NEGATIVE_FLOOR` are reported as violations.
pub const NEGATIVE_FLOOR: f64 = 1e-10;

/// Distance weighting of the bonds inside the block.
pub trait WeightConvention: Send + Sync {
    /// Weight of bond `(i, i+1)`, `1 ≤ i < block_length`; bond `block_length − 1`
    /// touches the cut.
    fn weight(&self, bond: usize, block_length: usize) -> f64;
}

/// Cut-adjacent bond 1, then 2, 3, …
pub struct IntegerWeights;

impl WeightConvention for IntegerWeights {
    fn weight(&self, bond: usize, block_length: usize) -> f64 {
        (block_length - bond) as f64
    }
}

/// Cut-adjacent bond ½, then 3/2, 5/2, …
pub struct HalfIntegerWeights;

impl WeightConvention for HalfIntegerWeights {
    fn weight(&self, bond: usize, block_length: usize) -> f64 {
        (block_length - bond) as f64 - 0.5
    }
}

pub fn weight_conventions() -> Registry<dyn WeightConvention> {
    let mut reg: Registry<dyn WeightConvention> = Registry::new("weight convention");
    reg.register("integer", Box::new(IntegerWeights));
    reg.register("half-integer", Box::new(HalfIntegerWeights));
    reg
}

fn check_block(block_length: usize) -> Result<()> {
    if (MIN_BLOCK..=MAX_BLOCK).contains(&block_length) {
        Ok(())
    } else {
        Err(Error::BlockOutOfRange { sites: block_length, min: MIN_BLOCK, max: MAX_BLOCK })
    }
}

fn block_dim(block_length: usize) -> usize {
    LOCAL_DIM.pow(block_length as u32)
}

/// Embeds the bond matrix on sites `(bond, bond+1)` of a block.
fn embed_bond(bond_matrix: &DMatrix<f64>, bond: usize, block_length: usize) -> DMatrix<f64> {
    let left = DMatrix::<f64>::identity(block_dim(bond - 1), block_dim(bond - 1));
    let right_sites = block_length - bond - 1;
    let right = DMatrix::<f64>::identity(block_dim(right_sites), block_dim(right_sites));
    left.kronecker(bond_matrix).kronecker(&right)
}

/// Weighted sum of a bond operator over the block.
fn weighted_sum(bond_matrix: &DMatrix<f64>, block_length: usize, conv: &dyn WeightConvention) -> DMatrix<f64> {
    let d = block_dim(block_length);
    (1..block_length).fold(DMatrix::zeros(d, d), |acc, bond| {
        acc + embed_bond(bond_matrix, bond, block_length) * conv.weight(bond, block_length)
    })
}

/// `Σ_i x_i H_i(θ)` on the `6^ℓ`-dimensional block space.
pub fn bw_hamiltonian(block_length: usize, theta: f64, conv: &dyn WeightConvention) -> Result<DMatrix<f64>> {
    check_block(block_length)?;
    Ok(weighted_sum(&su4::build_bond_hamiltonian(theta).matrix, block_length, conv))
}

/// The parameters of one BW thermal state.
#[derive(Debug, Clone, PartialEq)]
pub struct BwAnsatz {
    pub block_length: usize,
    pub theta: f64,
    pub beta: f64,
    pub weights: Vec<f64>,
    /// `c = −ln Z`, so that `σ = exp(−βH_A + c)` has unit trace.
    pub normalization: f64,
}

/// `ln Σ_k exp(−β E_k)` evaluated with the minimum shifted out.
fn log_partition(energies: &[f64], beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
    }
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = energies.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    let log_z = -beta * e0 + sum.ln();
    if log_z.is_finite() {
        Ok(log_z)
    } else {
        Err(Error::ThermalOverflow { beta })
    }
}

/// `σ = exp(−β H_A) / Z` and its ansatz parameters.
pub fn bw_state(
    block_length: usize,
    theta: f64,
    beta: f64,
    conv: &dyn WeightConvention,
) -> Result<(DensityMatrix, BwAnsatz)> {
    let h = bw_hamiltonian(block_length, theta, conv)?;
    let eig = h.symmetric_eigen();
    let energies: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let log_z = log_partition(&energies, beta)?;
    let d = energies.len();
    let probs: Vec<f64> = energies.iter().map(|e| (-beta * e - log_z).exp()).collect();
    let mut sigma = DMatrix::zeros(d, d);
    for (k, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        sigma.ger(*p, &v, &v, 1.0);
    }
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    let ansatz = BwAnsatz {
        block_length,
        theta,
        beta,
        weights: (1..block_length).map(|b| conv.weight(b, block_length)).collect(),
        normalization: -log_z,
    };
    Ok((DensityMatrix::new(sigma, 1..=block_length), ansatz))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEntropy {
    /// `max(raw, −NEGATIVE_FLOOR)`.
    pub value: f64,
    pub raw: f64,
    /// Set when `raw < −NEGATIVE_FLOOR`, which only roundoff or an invalid
    /// density matrix can cause.
    pub floor_violation: bool,
}

impl RelativeEntropy {
    fn new(raw: f64) -> Self {
        Self { value: raw.max(-NEGATIVE_FLOOR), raw, floor_violation: raw < -NEGATIVE_FLOOR }
    }
}

/// Precomputed pieces of `S(ρ‖σ(θ, β)) = −S(ρ) + β Tr[ρ H_A(θ)] + ln Z(θ, β)`.
///
/// `H_A(θ) = cos θ · K₁ + (sin θ / 4) · K₂` with `K₁, K₂` the weighted sums of
/// `C₂` and `C₂²`, so `Tr[ρ H_A]` is linear in two fixed traces and only
/// the spectrum of `H_A(θ)` depends on θ nonlinearly.
pub struct BwObjective {
    block_length: usize,
    entropy: f64,
    exchange_sum: DMatrix<f64>,
    squared_sum: DMatrix<f64>,
    traces: (f64, f64),
}

impl BwObjective {
    pub fn new(rho: &DensityMatrix, conv: &dyn WeightConvention) -> Result<Self> {
        let block_length = rho.sites();
        check_block(block_length)?;
        let dim = block_dim(block_length);
        if rho.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: rho.dim });
        }
        let exchange_sum = weighted_sum(&su4::build_exchange().matrix, block_length, conv);
        let squared_sum = weighted_sum(&su4::build_squared_exchange().matrix, block_length, conv);
        let trace_with = |m: &DMatrix<f64>| rho.matrix.component_mul(m).sum();
        let traces = (trace_with(&exchange_sum), trace_with(&squared_sum));
        Ok(Self { block_length, entropy: von_neumann(&rho.eigenvalues()), exchange_sum, squared_sum, traces })
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// Spectrum of `H_A(θ)`.
    pub fn energies(&self, theta: f64) -> Vec<f64> {
        let (c, s) = bond_weights(theta);
        let h = &self.exchange_sum * c + &self.squared_sum * s;
        h.symmetric_eigenvalues().iter().copied().collect()
    }

    /// `Tr[ρ H_A(θ)]`.
    pub fn mean_energy(&self, theta: f64) -> f64 {
        let (c, s) = bond_weights(theta);
        c * self.traces.0 + s * self.traces.1
    }

    pub fn evaluate_with(&self, energies: &[f64], theta: f64, beta: f64) -> Result<RelativeEntropy> {
        let log_z = log_partition(energies, beta)?;
        Ok(RelativeEntropy::new(-self.entropy + beta * self.mean_energy(theta) + log_z))
    }

    pub fn evaluate(&self, theta: f64, beta: f64) -> Result<RelativeEntropy> {
        self.evaluate_with(&self.energies(theta), theta, beta)
    }
}

/// `S(ρ‖σ^BW(θ, β))` in the stable form `−S(ρ) + β Tr[ρH_A] + ln Z`.
pub fn relative_entropy(
    rho: &DensityMatrix,
    theta: f64,
    beta: f64,
    conv: &dyn WeightConvention,
) -> Result<RelativeEntropy> {
    BwObjective::new(rho, conv)?.evaluate(theta, beta)
}

/// `Tr[ρ ln ρ − ρ ln σ]` from the two matrix logarithms; only usable when
/// both spectra are well above the cutoff.
pub fn relative_entropy_direct(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch { expected: sigma.dim, actual: rho.dim });
    }
    let log_of = |m: &DMatrix<f64>| {
        let eig = m.clone().symmetric_eigen();
        let n = m.nrows();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..n {
            let v = eig.eigenvectors.column(k);
            out.ger(eig.eigenvalues[k].max(ENTROPY_CUTOFF).ln(), &v, &v, 1.0);
        }
        out
    };
    let diff = log_of(&rho.matrix) - log_of(&sigma.matrix);
    Ok((&rho.matrix * diff).trace())
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub theta_range: (f64, f64),
    pub theta_points: usize,
    pub beta_range: (f64, f64),
    pub beta_points: usize,
    /// Refine `(θ, β)` together; otherwise θ alone at each grid β.
    pub joint: bool,
    pub diameter_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            theta_range: (0.05, 0.85),
            theta_points: 41,
            beta_range: (0.05, 20.0),
            beta_points: 25,
            joint: true,
            diameter_tol: 1e-6,
        }
    }
}

impl FitOptions {
    pub fn theta_grid(&self) -> Vec<f64> {
        linspace(self.theta_range, self.theta_points)
    }

    /// Log-spaced β samples.
    pub fn beta_grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.beta_range.0.ln(), self.beta_range.1.ln());
        linspace((lo, hi), self.beta_points).into_iter().map(f64::exp).collect()
    }

    fn validate(&self) -> Result<()> {
        let (t0, t1) = self.theta_range;
        let (b0, b1) = self.beta_range;
        if !(t0.is_finite() && t1.is_finite() && t0 <= t1) || self.theta_points == 0 {
            return Err(Error::InvalidParameter(format!("bad theta range {t0}..{t1} x {}", self.theta_points)));
        }
        if !(b0 > 0.0 && b1.is_finite() && b0 <= b1) || self.beta_points == 0 {
            return Err(Error::InvalidParameter(format!("bad beta range {b0}..{b1} x {}", self.beta_points)));
        }
        Ok(())
    }
}

pub fn linspace((lo, hi): (f64, f64), points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub theta: f64,
    pub beta: f64,
    pub relative_entropy: f64,
}

#[derive(Debug, Clone)]
pub struct BwFitResult {
    pub theta_hat: f64,
    pub beta_hat: f64,
    pub min_relative_entropy: f64,
    /// Best value on the coarse grid, before refinement.
    pub coarse_minimum: f64,
    pub scan_surface: Vec<ScanSample>,
    /// The minimum sits on (or beyond) an edge of the search ranges.
    pub boundary_flag: bool,
    pub converged: bool,
}

/// Coarse `(θ, β)` grid scan followed by simplex refinement in `(θ, ln β)`.
pub fn fit(rho: &DensityMatrix, conv: &dyn WeightConvention, opts: &FitOptions) -> Result<BwFitResult> {
    opts.validate()?;
    let objective = BwObjective::new(rho, conv)?;
    let thetas = opts.theta_grid();
    let betas = opts.beta_grid();

    let mut scan_surface = Vec::with_capacity(thetas.len() * betas.len());
    for &theta in &thetas {
        let energies = objective.energies(theta);
        for &beta in &betas {
            let s = objective.evaluate_with(&energies, theta, beta)?;
            scan_surface.push(ScanSample { theta, beta, relative_entropy: s.value });
        }
    }
    let best = *scan_surface
        .iter()
        .min_by(|a, b| a.relative_entropy.total_cmp(&b.relative_entropy))
        .expect("nonempty grid");

    let theta_step = if thetas.len() > 1 { thetas[1] - thetas[0] } else { 0.05 };
    let log_beta_step = if betas.len() > 1 { (betas[1] / betas[0]).ln() } else { 0.25 };
    let nm = NelderMeadOptions { diameter_tol: opts.diameter_tol, ..Default::default() };
    let eval = |theta: f64, log_beta: f64| {
        objective.evaluate(theta, log_beta.exp()).map(|s| s.value).unwrap_or(f64::INFINITY)
    };

    let (theta_hat, beta_hat, refined, converged) = if opts.joint {
        let m = nelder_mead(
            |x| eval(x[0], x[1]),
            &[best.theta, best.beta.ln()],
            &[theta_step, log_beta_step],
            &nm,
        );
        (m.x[0], m.x[1].exp(), m.value, m.converged)
    } else {
        let mut winner: Option<(f64, f64, f64, bool)> = None;
        for &beta in &betas {
            let start = scan_surface
                .iter()
                .filter(|s| s.beta == beta)
                .min_by(|a, b| a.relative_entropy.total_cmp(&b.relative_entropy))
                .expect("grid row")
                .theta;
            let m = nelder_mead(|x| eval(x[0], beta.ln()), &[start], &[theta_step], &nm);
            if winner.is_none_or(|w| m.value < w.2) {
                winner = Some((m.x[0], beta, m.value, m.converged));
            }
        }
        winner.expect("nonempty beta grid")
    };

    // Keep the grid optimum if refinement wandered somewhere worse.
    let (theta_hat, beta_hat, min_value) = if refined <= best.relative_entropy {
        (theta_hat, beta_hat, refined)
    } else {
        (best.theta, best.beta, best.relative_entropy)
    };
    let (t0, t1) = opts.theta_range;
    let (b0, b1) = opts.beta_range;
    let on_edge = |x: f64, lo: f64, hi: f64, step: f64| x <= lo + 0.5 * step || x >= hi - 0.5 * step;
    let boundary_flag = on_edge(theta_hat, t0, t1, theta_step.abs().max(1e-12))
        || on_edge(beta_hat.ln(), b0.ln(), b1.ln(), log_beta_step.abs().max(1e-12));

    Ok(BwFitResult {
        theta_hat,
        beta_hat,
        min_relative_entropy: min_value,
        coarse_minimum: best.relative_entropy,
        scan_surface,
        boundary_flag,
        converged,
    })
}

/// `S(ρ‖σ(θ, β))` along a θ grid at fixed β.
pub fn theta_profile(
    rho: &DensityMatrix,
    conv: &dyn WeightConvention,
    beta: f64,
    thetas: &[f64],
) -> Result<Vec<f64>> {
    let objective = BwObjective::new(rho, conv)?;
    thetas.iter().map(|&t| objective.evaluate(t, beta).map(|s| s.value)).collect()
}

/// Number of sign changes in the discrete gradient of `values`.
pub fn gradient_sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != 0.0).map(f64::signum).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
