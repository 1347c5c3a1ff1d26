//! Dense brute-force references used only by tests. Nothing here depends on
//! the sparse, matrix-free or transfer-matrix code paths.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// `Σ_i 1 ⊗ … ⊗ B_{i,i+1} ⊗ … ⊗ 1` by explicit Kronecker products.
pub fn chain_matrix(bond: &DMatrix<f64>, length: usize) -> DMatrix<f64> {
    let d = (bond.nrows() as f64).sqrt().round() as usize;
    let dim = d.pow(length as u32);
    let mut total = DMatrix::zeros(dim, dim);
    for i in 0..length - 1 {
        let left = DMatrix::<f64>::identity(d.pow(i as u32), d.pow(i as u32));
        let right_sites = length - i - 2;
        let right = DMatrix::<f64>::identity(d.pow(right_sites as u32), d.pow(right_sites as u32));
        total += left.kronecker(bond).kronecker(&right);
    }
    total
}

/// Ascending eigenvalues and matching eigenvectors (as columns).
pub fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Partial trace of the full `|ψ⟩⟨ψ|` over the trailing `dim_b` factor,
/// summing matrix elements one by one.
pub fn partial_trace_full(psi: &[f64], dim_a: usize, dim_b: usize) -> DMatrix<f64> {
    let full = DMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j]);
    DMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| full[(i * dim_b + k, j * dim_b + k)]).sum())
}

/// Matrix logarithm / function of a symmetric PSD matrix via eigenvalues.
pub fn apply_spectral(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        out += v * v.transpose() * f(eig.eigenvalues[k]);
    }
    out
}
