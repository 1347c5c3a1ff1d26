//! Correlation-matrix reconstruction of θ from a single eigenstate.
//!
//! The operator pool is `O = (Σ_i C₂(i), Σ_i C₂²(i))` and the ansatz is
//! `H(w) = w·O` with `w(θ) = (cos θ, sin θ / 4)`. For an eigenstate of
//! `H(w)`, the covariance matrix of `O` annihilates `w`.

use nalgebra::{Matrix2, Vector2};

use crate::chain::{self, BondSum, OperatorKind};
use crate::error::{Error, Result};
use crate::lanczos::{dot, norm, LinearOperator};
use crate::su4::bond_weights;

/// Allowed deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-8;
/// `gap / residual` below this flags the estimate as ambiguous.
pub const AMBIGUITY_RATIO: f64 = 10.0;
/// A gap below `VANISHING_GAP · (1 + |⟨O⟩|²)` means M is zero to working
/// precision and carries no information about θ.
pub const VANISHING_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMeta {
    pub length: usize,
    /// Angle of the Hamiltonian that generated the state, when known.
    pub theta0: Option<f64>,
}

/// Symmetrized covariance `½⟨{O_m, O_n}⟩ − ⟨O_m⟩⟨O_n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix2 {
    pub entries: Matrix2<f64>,
    /// `(⟨O₁⟩, ⟨O₂⟩)`.
    pub means: Vector2<f64>,
    pub state_meta: StateMeta,
}

impl CorrelationMatrix2 {
    pub fn from_entries(entries: Matrix2<f64>, length: usize) -> Self {
        Self { entries, means: Vector2::zeros(), state_meta: StateMeta { length, theta0: None } }
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.state_meta.theta0 = Some(theta0);
        self
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let ev = self.entries.symmetric_eigenvalues();
        (ev[0].min(ev[1]), ev[0].max(ev[1]))
    }

    /// `wᵀ M w`, the variance of `w·O`.
    pub fn quadratic_form(&self, w: Vector2<f64>) -> f64 {
        w.dot(&(self.entries * w))
    }

    /// Variance of `H(θ)` in the state.
    pub fn variance_at(&self, theta: f64) -> f64 {
        let (c, s) = bond_weights(theta);
        self.quadratic_form(Vector2::new(c, s))
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.entries.amax()
    }
}

/// Covariance matrix of the two bond-sum operators in a unit-norm chain state.
pub fn correlation_matrix(psi: &[f64]) -> Result<CorrelationMatrix2> {
    let length = chain::length_of(psi.len())?;
    let n = norm(psi);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm: n });
    }
    let ops = [
        BondSum::new(OperatorKind::ExchangeSum, length)?,
        BondSum::new(OperatorKind::SquaredExchangeSum, length)?,
    ];
    let mut means = Vector2::zeros();
    // Centered images u_m = (O_m − ⟨O_m⟩) ψ make M an explicit Gram matrix.
    let centered: Vec<Vec<f64>> = ops
        .iter()
        .enumerate()
        .map(|(m, op)| {
            let mut v = op.apply(psi);
            let mean = dot(psi, &v);
            means[m] = mean;
            v.iter_mut().zip(psi).for_each(|(x, p)| *x -= mean * p);
            v
        })
        .collect();
    let off = dot(&centered[0], &centered[1]);
    let entries = Matrix2::new(dot(&centered[0], &centered[0]), off, off, dot(&centered[1], &centered[1]));
    Ok(CorrelationMatrix2 { entries, means, state_meta: StateMeta { length, theta0: None } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub theta_hat: f64,
    /// Unit null-vector estimate, sign-fixed so `w₁ ≥ 0`.
    pub weight_vector: Vector2<f64>,
    /// Smallest eigenvalue of M.
    pub residual: f64,
    /// Largest eigenvalue of M.
    pub gap: f64,
    pub ambiguous: bool,
}

/// `θ̂ = atan2(4 w₂, w₁)` from the eigenvector of the smaller eigenvalue.
pub fn reconstruct_theta(m: &CorrelationMatrix2) -> ThetaEstimate {
    let eig = m.entries.symmetric_eigen();
    let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let mut w: Vector2<f64> = eig.eigenvectors.column(lo).into_owned();
    w /= w.norm();
    if w[0] < 0.0 || (w[0] == 0.0 && w[1] < 0.0) {
        w = -w;
    }
    let residual = eig.eigenvalues[lo];
    let gap = eig.eigenvalues[hi];
    ThetaEstimate {
        theta_hat: (4.0 * w[1]).atan2(w[0]),
        weight_vector: w,
        residual,
        gap,
        ambiguous: gap < AMBIGUITY_RATIO * residual.abs() || gap <= VANISHING_GAP * (1.0 + m.means.norm_squared()),
    }
}

/// `Var_ψ[H(θ)]` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationCurve {
    pub thetas: Vec<f64>,
    pub variances: Vec<f64>,
}

impl FluctuationCurve {
    pub fn argmin(&self) -> usize {
        (0..self.variances.len())
            .min_by(|&a, &b| self.variances[a].total_cmp(&self.variances[b]))
            .expect("nonempty curve")
    }

    pub fn second_differences(&self) -> Vec<f64> {
        self.variances.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
    }
}

/// Variance of `H(θ)` for every grid angle from one covariance evaluation.
pub fn fluctuation_scan(psi: &[f64], theta_grid: &[f64]) -> Result<FluctuationCurve> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidParameter("theta grid is empty".into()));
    }
    let m = correlation_matrix(psi)?;
    Ok(fluctuation_curve(&m, theta_grid))
}

pub fn fluctuation_curve(m: &CorrelationMatrix2, theta_grid: &[f64]) -> FluctuationCurve {
    FluctuationCurve {
        thetas: theta_grid.to_vec(),
        variances: theta_grid.iter().map(|&t| m.variance_at(t)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{assemble_hamiltonian, ground_state, hilbert_dim};
    use crate::oracle;
    use crate::su4;
    use nalgebra::DMatrix;

    fn normalized(v: Vec<f64>) -> Vec<f64> {
        let n = norm(&v);
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn matches_dense_oracle_at_four_sites() {
        let c2 = oracle::chain_matrix(&su4::build_exchange().matrix, 4);
        let c2sq = oracle::chain_matrix(&su4::build_squared_exchange().matrix, 4);
        let psi = normalized((0..hilbert_dim(4)).map(|i| ((i * 7 + 3) as f64 * 0.013).sin()).collect());
        let v = nalgebra::DVector::from_vec(psi.clone());
        let ops: [&DMatrix<f64>; 2] = [&c2, &c2sq];
        let m = correlation_matrix(&psi).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let prod = ops[a] * ops[b] + ops[b] * ops[a];
                let expected = 0.5 * v.dot(&(prod * &v)) - v.dot(&(ops[a] * &v)) * v.dot(&(ops[b] * &v));
                assert!((m.entries[(a, b)] - expected).abs() <= 1e-10 * expected.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_unnormalized_state() {
        let psi = vec![0.5; 36];
        assert!(matches!(correlation_matrix(&psi), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn diagonal_inputs() {
        let m = CorrelationMatrix2::from_entries(Matrix2::new(0.0, 0.0, 0.0, 2.0), 4);
        let est = reconstruct_theta(&m);
        assert_eq!(est.theta_hat, 0.0);
        assert!(!est.ambiguous);
        let m = CorrelationMatrix2::from_entries(Matrix2::new(3.0, 0.0, 0.0, 0.0), 4);
        let est = reconstruct_theta(&m);
        assert!((est.theta_hat - std::f64::consts::FRAC_PI_2).abs() <= 1e-15);
    }

    #[test]
    fn near_degenerate_matrix_is_ambiguous() {
        let m = CorrelationMatrix2::from_entries(Matrix2::new(1.0, 0.0, 0.0, 1.05), 4);
        assert!(reconstruct_theta(&m).ambiguous);
        let m = CorrelationMatrix2::from_entries(Matrix2::new(1e-27, 0.0, 0.0, 5e-26), 4);
        assert!(reconstruct_theta(&m).ambiguous);
    }

    #[test]
    fn eigenstate_recovers_theta() {
        let theta0 = 0.3;
        let gs = ground_state(&assemble_hamiltonian(6, theta0).unwrap(), 1e-10, 4).unwrap();
        let m = correlation_matrix(&gs.vector).unwrap().with_theta0(theta0);
        assert!(m.entries[(0, 0)] >= 0.0 && m.entries[(1, 1)] >= 0.0);
        let (c, s) = su4::bond_weights(theta0);
        let mw = m.entries * Vector2::new(c, s);
        assert!(mw.amax() <= 1e-8);
        let est = reconstruct_theta(&m);
        assert!((est.theta_hat - theta0).abs() <= 1e-6);
        assert!(est.residual <= 1e-8 * m.norm_max());
        assert!(est.residual <= est.gap);
    }

    #[test]
    fn quadratic_form_matches_direct_variance() {
        let gs = ground_state(&assemble_hamiltonian(4, 0.45).unwrap(), 1e-10, 3).unwrap();
        // A generic state, so the variances are not all zero.
        let psi = normalized(gs.vector.iter().enumerate().map(|(i, x)| x + 0.01 * (i as f64).cos()).collect());
        let m = correlation_matrix(&psi).unwrap();
        for theta in [0.1, 0.37, 0.9, 1.4, -0.6] {
            let h = assemble_hamiltonian(4, theta).unwrap();
            let (_, direct) = chain::mean_and_variance(&h, &psi);
            assert!((m.variance_at(theta) - direct).abs() <= 1e-10 * direct.max(1.0), "θ = {theta}");
        }
    }

    #[test]
    fn scale_of_generating_hamiltonian_is_irrelevant() {
        let theta0 = 0.45;
        let bond = su4::build_bond_hamiltonian(theta0).matrix;
        let a = ground_state(&BondSum::from_matrix(&bond, 5), 1e-11, 3).unwrap();
        let b = ground_state(&BondSum::from_matrix(&(bond * 3.7), 5), 1e-11, 3).unwrap();
        let ta = reconstruct_theta(&correlation_matrix(&a.vector).unwrap()).theta_hat;
        let tb = reconstruct_theta(&correlation_matrix(&b.vector).unwrap()).theta_hat;
        assert!((ta - theta0).abs() <= 1e-6 && (ta - tb).abs() <= 1e-6);
    }

    #[test]
    fn fluctuation_scan_minimum_and_convexity() {
        let theta0 = 0.45;
        let gs = ground_state(&assemble_hamiltonian(5, theta0).unwrap(), 1e-10, 3).unwrap();
        let grid: Vec<f64> = (0..41).map(|i| 0.05 + 0.02 * i as f64).collect();
        let curve = fluctuation_scan(&gs.vector, &grid).unwrap();
        assert!(curve.second_differences().iter().all(|&d| d >= -1e-9));
        assert!((curve.thetas[curve.argmin()] - theta0).abs() <= 0.02 + 1e-12);
        let at_theta0 = fluctuation_scan(&gs.vector, &[theta0]).unwrap().variances[0];
        assert!(at_theta0 <= 1e-9);
        assert!(fluctuation_scan(&gs.vector, &[]).is_err());
    }
}
