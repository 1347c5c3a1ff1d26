//! Thick-restart Lanczos with full reorthogonalization for the lowest
//! eigenpair of a real symmetric operator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A real symmetric linear map applied to dense vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y` (overwriting it).
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Debug, Clone)]
pub struct LanczosConfig {
    /// Required residual `‖Hψ − Eψ‖₂`.
    pub tol: f64,
    /// Number of lowest Ritz values to report (≥ 2).
    pub k: usize,
    /// Krylov basis size before a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self { tol: 1e-10, k: 4, max_basis: 64, max_restarts: 500, seed: 0x5eed }
    }
}

/// Lowest Ritz values of the final projected problem and the gaps between
/// consecutive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub ritz_values: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl DegeneracyReport {
    fn new(ritz_values: Vec<f64>) -> Self {
        let gaps = ritz_values.windows(2).map(|w| w[1] - w[0]).collect();
        Self { ritz_values, gaps }
    }

    /// Gap from the ground value to the first Ritz value separated from it
    /// by more than `tol`, if any.
    pub fn gap_above_multiplet(&self, tol: f64) -> Option<f64> {
        let e0 = *self.ritz_values.first()?;
        self.ritz_values.iter().map(|e| e - e0).find(|g| *g > tol)
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub degeneracy_report: DegeneracyReport,
    pub matvecs: usize,
}

fn random_unit_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Orthogonalizes `w` against `basis` twice, returning the accumulated
/// projection coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            axpy(-h, v, w);
            *c += h;
        }
    }
    coeffs
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (v, c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut out);
    }
    out
}

/// Lowest eigenpair of `op`.
///
/// The projected matrix `T = VᵀHV` is filled column by column from the
/// orthogonalization coefficients, so restarted Ritz vectors and fresh Krylov
/// vectors are handled uniformly.
pub fn ground_state<O: LinearOperator + ?Sized>(op: &O, cfg: &LanczosConfig) -> Result<GroundStateResult> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", cfg.tol)));
    }
    if cfg.k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {}", cfg.k)));
    }
    let dim = op.dim();
    let max_basis = cfg.max_basis.max(cfg.k + 2).min(dim);
    let keep = (cfg.k + 2).min(max_basis.saturating_sub(2)).max(1);

    let mut basis: Vec<Vec<f64>> = vec![random_unit_vector(dim, cfg.seed)];
    let mut t = DMatrix::<f64>::zeros(0, 0);
    // Basis vectors below this index already have their T column.
    let mut applied = 0usize;
    let mut matvecs = 0usize;
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for _restart in 0..=cfg.max_restarts {
        let mut coupling = 0.0;
        let mut exhausted = false;
        while applied < basis.len() {
            op.apply_into(&basis[applied], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&basis, &mut w);
            let n = basis.len();
            let mut grown = DMatrix::zeros(n, n);
            grown.view_mut((0, 0), (t.nrows(), t.ncols())).copy_from(&t);
            for (i, &h) in coeffs.iter().enumerate() {
                grown[(i, applied)] = h;
                grown[(applied, i)] = h;
            }
            t = grown;
            applied += 1;

            coupling = norm(&w);
            let scale = t.diagonal().amax().max(1.0);
            if coupling <= 1e-13 * scale {
                exhausted = true;
                break;
            }
            if basis.len() == max_basis {
                break;
            }
            basis.push(w.iter().map(|x| x / coupling).collect());
        }

        let m = applied;
        let eig = t.view((0, 0), (m, m)).into_owned().symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let ground = order[0];
        let estimate = if exhausted { 0.0 } else { coupling * eig.eigenvectors[(m - 1, ground)].abs() };

        if estimate <= 0.5 * cfg.tol || exhausted {
            let mut vector = combine(&basis[..m], eig.eigenvectors.column(ground).iter().copied());
            let nv = norm(&vector);
            vector.iter_mut().for_each(|x| *x /= nv);
            op.apply_into(&vector, &mut w);
            matvecs += 1;
            let energy = dot(&vector, &w);
            axpy(-energy, &vector, &mut w);
            let residual = norm(&w);
            last_residual = residual;
            if residual <= cfg.tol {
                let ritz = order.iter().take(cfg.k).map(|&i| eig.eigenvalues[i]).collect();
                return Ok(GroundStateResult {
                    energy,
                    vector,
                    residual,
                    degeneracy_report: DegeneracyReport::new(ritz),
                    matvecs,
                });
            }
            if exhausted {
                break;
            }
        }

        // Thick restart: keep the lowest Ritz vectors plus the pending
        // residual direction.
        let kept = keep.min(m);
        let mut next: Vec<Vec<f64>> = order[..kept]
            .iter()
            .map(|&i| combine(&basis[..m], eig.eigenvectors.column(i).iter().copied()))
            .collect();
        let mut tk = DMatrix::zeros(kept, kept);
        for (j, &i) in order[..kept].iter().enumerate() {
            tk[(j, j)] = eig.eigenvalues[i];
        }
        let mut fresh: Vec<f64> = w.iter().map(|x| x / coupling).collect();
        orthogonalize(&next, &mut fresh);
        let nf = norm(&fresh);
        fresh.iter_mut().for_each(|x| *x /= nf);
        next.push(fresh);
        basis = next;
        t = tk;
        applied = kept;
    }

    Err(Error::NoConvergence {
        iterations: matvecs,
        residual: last_residual,
        tol: cfg.tol,
        basis: max_basis,
    })
}
