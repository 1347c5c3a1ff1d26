//! Dense references shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;

pub fn chain_matrix(bond: &DMatrix<f64>, length: usize) -> DMatrix<f64> {
    let d = 6usize;
    let dim = d.pow(length as u32);
    let mut total = DMatrix::zeros(dim, dim);
    for i in 0..length - 1 {
        let left = DMatrix::<f64>::identity(d.pow(i as u32), d.pow(i as u32));
        let r = d.pow((length - i - 2) as u32);
        total += left.kronecker(bond).kronecker(&DMatrix::<f64>::identity(r, r));
    }
    total
}

/// `Tr_B |ψ⟩⟨ψ|` by explicit index summation.
pub fn trace_out_right(psi: &[f64], dim_a: usize) -> DMatrix<f64> {
    let dim_b = psi.len() / dim_a;
    DMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| psi[i * dim_b + k] * psi[j * dim_b + k]).sum())
}

/// `Tr_A |ψ⟩⟨ψ|` by explicit index summation.
pub fn trace_out_left(psi: &[f64], dim_a: usize) -> DMatrix<f64> {
    let dim_b = psi.len() / dim_a;
    DMatrix::from_fn(dim_b, dim_b, |i, j| (0..dim_a).map(|k| psi[k * dim_b + i] * psi[k * dim_b + j]).sum())
}

pub fn entropy_of(m: &DMatrix<f64>) -> f64 {
    -m.clone().symmetric_eigenvalues().iter().filter(|&&p| p > 1e-14).map(|p| p * p.ln()).sum::<f64>()
}

pub fn ground_energy(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

pub fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
