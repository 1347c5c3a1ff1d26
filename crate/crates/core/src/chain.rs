//! Open SU(4) chain: Hamiltonian assembly, matrix-free bond sums, ground
//! states, reduced density matrices and entanglement entropies.
//!
//! Chain states are real vectors of length `6^L` with site 1 as the slowest
//! index.

use std::io::{Read, Write};
use std::ops::RangeInclusive;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lanczos::{self, GroundStateResult, LanczosConfig, LinearOperator};
use crate::su4::{self, BOND_DIM, LOCAL_DIM};

pub const MIN_LENGTH: usize = 2;
pub const MAX_LENGTH: usize = 9;
/// Largest block whose density matrix is formed densely.
pub const MAX_DENSE_BLOCK: usize = 5;
/// Eigenvalues at or below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

pub fn hilbert_dim(sites: usize) -> usize {
    LOCAL_DIM.pow(sites as u32)
}

fn check_length(length: usize) -> Result<()> {
    if (MIN_LENGTH..=MAX_LENGTH).contains(&length) {
        Ok(())
    } else {
        Err(Error::LengthOutOfRange { length, min: MIN_LENGTH, max: MAX_LENGTH })
    }
}

/// Recovers `L` from a state length `6^L`.
pub fn length_of(dim: usize) -> Result<usize> {
    let mut sites = 0;
    let mut d = 1usize;
    while d < dim {
        d *= LOCAL_DIM;
        sites += 1;
    }
    if d == dim && sites >= 1 {
        Ok(sites)
    } else {
        Err(Error::DimensionMismatch { expected: d, actual: dim })
    }
}

/// Row-wise nonzeros of a 36×36 bond matrix.
#[derive(Debug, Clone)]
pub struct BondStencil {
    rows: Vec<Vec<(usize, f64)>>,
}

impl BondStencil {
    pub fn new(matrix: &DMatrix<f64>) -> Self {
        assert_eq!(matrix.shape(), (BOND_DIM, BOND_DIM));
        let rows = (0..BOND_DIM)
            .map(|r| (0..BOND_DIM).filter(|&c| matrix[(r, c)] != 0.0).map(|c| (c, matrix[(r, c)])).collect())
            .collect();
        Self { rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// `H(θ) = Σ_i H_i(θ)` on an open chain, stored row-compressed.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub length: usize,
    pub theta: f64,
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row `r` as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().map(|&c| c as usize).zip(self.values[span].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| {
            self.row(r).all(|(c, v)| self.row(c).any(|(cc, vv)| cc == r && vv == v))
        })
    }
}

impl LinearOperator for SparseHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *yr = self.cols[span.clone()]
                .iter()
                .zip(&self.values[span])
                .map(|(&c, v)| v * x[c as usize])
                .sum();
        }
    }
}

/// Assembles the open-chain Hamiltonian by identity-padding each bond term.
pub fn assemble_hamiltonian(length: usize, theta: f64) -> Result<SparseHamiltonian> {
    check_length(length)?;
    let stencil = BondStencil::new(&su4::build_bond_hamiltonian(theta).matrix);
    let dim = hilbert_dim(length);
    let strides: Vec<usize> = (0..length - 1).map(|b| hilbert_dim(length - b - 2)).collect();

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    row_ptr.push(0);
    for s in 0..dim {
        scratch.clear();
        for &inner in &strides {
            let pair = (s / inner) % BOND_DIM;
            let base = s - pair * inner;
            for &(c, v) in &stencil.rows[pair] {
                scratch.push((base + c * inner, v));
            }
        }
        scratch.sort_unstable_by_key(|e| e.0);
        let mut i = 0;
        while i < scratch.len() {
            let col = scratch[i].0;
            let mut v = 0.0;
            while i < scratch.len() && scratch[i].0 == col {
                v += scratch[i].1;
                i += 1;
            }
            if v != 0.0 {
                cols.push(col as u32);
                values.push(v);
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHamiltonian { length, theta, dim, row_ptr, cols, values })
}

/// Which bond-sum operator to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    ExchangeSum,
    SquaredExchangeSum,
    Hamiltonian { theta: f64 },
}

impl OperatorKind {
    fn bond_matrix(self) -> DMatrix<f64> {
        match self {
            OperatorKind::ExchangeSum => su4::build_exchange().matrix,
            OperatorKind::SquaredExchangeSum => su4::build_squared_exchange().matrix,
            OperatorKind::Hamiltonian { theta } => su4::build_bond_hamiltonian(theta).matrix,
        }
    }
}

/// `Σ_i O_i` for a translation-invariant bond operator, applied bond by bond
/// without forming the chain matrix.
#[derive(Debug, Clone)]
pub struct BondSum {
    length: usize,
    stencil: BondStencil,
}

impl BondSum {
    pub fn new(kind: OperatorKind, length: usize) -> Result<Self> {
        if length < MIN_LENGTH {
            return Err(Error::LengthOutOfRange { length, min: MIN_LENGTH, max: MAX_LENGTH });
        }
        Ok(Self { length, stencil: BondStencil::new(&kind.bond_matrix()) })
    }

    pub fn from_matrix(matrix: &DMatrix<f64>, length: usize) -> Self {
        Self { length, stencil: BondStencil::new(matrix) }
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

impl LinearOperator for BondSum {
    fn dim(&self) -> usize {
        hilbert_dim(self.length)
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let dim = self.dim();
        let mut local = [0.0f64; BOND_DIM];
        for bond in 0..self.length - 1 {
            let inner = hilbert_dim(self.length - bond - 2);
            let block = inner * BOND_DIM;
            for outer in (0..dim).step_by(block) {
                for low in 0..inner {
                    let base = outer + low;
                    for (p, slot) in local.iter_mut().enumerate() {
                        *slot = x[base + p * inner];
                    }
                    for (r, row) in self.stencil.rows.iter().enumerate() {
                        let acc: f64 = row.iter().map(|&(c, v)| v * local[c]).sum();
                        y[base + r * inner] += acc;
                    }
                }
            }
        }
    }
}

/// `O·ψ` for a bond-sum operator; `ψ` must have length `6^L`.
pub fn apply_operator_sum(kind: OperatorKind, psi: &[f64]) -> Result<Vec<f64>> {
    let length = length_of(psi.len())?;
    Ok(BondSum::new(kind, length)?.apply(psi))
}

/// Lowest eigenpair of `H` with `k` reported Ritz values.
pub fn ground_state<O: LinearOperator + ?Sized>(h: &O, tol: f64, k: usize) -> Result<GroundStateResult> {
    lanczos::ground_state(h, &LanczosConfig { tol, k, ..Default::default() })
}

/// `⟨ψ|A|ψ⟩` and `⟨ψ|A²|ψ⟩ − ⟨ψ|A|ψ⟩²` for a real symmetric `A` and unit `ψ`.
/// The variance is evaluated as `‖(A − ⟨A⟩)ψ‖²`.
pub fn mean_and_variance<O: LinearOperator + ?Sized>(op: &O, psi: &[f64]) -> (f64, f64) {
    let a_psi = op.apply(psi);
    let mean = lanczos::dot(psi, &a_psi);
    let var = a_psi.iter().zip(psi).map(|(a, p)| (a - mean * p).powi(2)).sum();
    (mean, var)
}

/// Reduced density matrix of a contiguous block of sites.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
    /// Sites described, 1-based inclusive.
    pub block: RangeInclusive<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<f64>, block: RangeInclusive<usize>) -> Self {
        Self { dim: matrix.nrows(), matrix, block }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn sites(&self) -> usize {
        self.block.end() + 1 - self.block.start()
    }
}

fn split_dims(psi: &[f64], cut: usize) -> Result<(usize, usize, usize)> {
    let length = length_of(psi.len())?;
    if cut == 0 || cut >= length {
        return Err(Error::CutOutOfRange { cut, max: length.saturating_sub(1) });
    }
    Ok((length, hilbert_dim(cut), hilbert_dim(length - cut)))
}

fn check_block(sites: usize) -> Result<()> {
    if sites > MAX_DENSE_BLOCK {
        Err(Error::BlockOutOfRange { sites, min: 1, max: MAX_DENSE_BLOCK })
    } else {
        Ok(())
    }
}

/// `ρ_A = Tr_B |ψ⟩⟨ψ|` with A the leading `ell` sites.
pub fn reduced_density_matrix(psi: &[f64], ell: usize) -> Result<DensityMatrix> {
    let (_, da, db) = split_dims(psi, ell)?;
    check_block(ell)?;
    let m = DMatrix::from_row_slice(da, db, psi);
    Ok(DensityMatrix::new(&m * m.transpose(), 1..=ell))
}

/// `ρ_B = Tr_A |ψ⟩⟨ψ|` with A the leading `cut` sites and B the rest.
pub fn reduced_density_matrix_trailing(psi: &[f64], cut: usize) -> Result<DensityMatrix> {
    let (length, da, db) = split_dims(psi, cut)?;
    check_block(length - cut)?;
    let m = DMatrix::from_row_slice(da, db, psi);
    Ok(DensityMatrix::new(m.transpose() * &m, cut + 1..=length))
}

/// Schmidt weights (descending) across the bond after site `cut`, computed
/// from the smaller of the two Gram matrices.
pub fn cut_spectrum(psi: &[f64], cut: usize) -> Result<Vec<f64>> {
    let (_, da, db) = split_dims(psi, cut)?;
    let m = DMatrix::from_row_slice(da, db, psi);
    let gram = if da <= db { &m * m.transpose() } else { m.transpose() * &m };
    let mut ev: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `−Σ p ln p` over weights above [`ENTROPY_CUTOFF`].
pub fn von_neumann(weights: &[f64]) -> f64 {
    -weights.iter().filter(|&&p| p > ENTROPY_CUTOFF).map(|&p| p * p.ln()).sum::<f64>()
}

pub fn entanglement_entropy(rho: &DensityMatrix) -> f64 {
    von_neumann(&rho.eigenvalues())
}

/// Entropy at every cut `1..L` of a chain state.
pub fn entropy_profile(psi: &[f64]) -> Result<Vec<f64>> {
    let length = length_of(psi.len())?;
    (1..length).map(|cut| cut_spectrum(psi, cut).map(|s| von_neumann(&s))).collect()
}

/// Writes `L` (u64), `θ` (f64) and the amplitudes, all little-endian.
pub fn write_state<W: Write>(mut w: W, length: usize, theta: f64, psi: &[f64]) -> Result<()> {
    if psi.len() != hilbert_dim(length) {
        return Err(Error::DimensionMismatch { expected: hilbert_dim(length), actual: psi.len() });
    }
    w.write_all(&(length as u64).to_le_bytes())?;
    w.write_all(&theta.to_le_bytes())?;
    for x in psi {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a state written by [`write_state`], returning `(L, θ, ψ)`.
pub fn read_state<R: Read>(mut r: R) -> Result<(usize, f64, Vec<f64>)> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let length = u64::from_le_bytes(buf) as usize;
    check_length(length)?;
    r.read_exact(&mut buf)?;
    let theta = f64::from_le_bytes(buf);
    let dim = hilbert_dim(length);
    let mut bytes = vec![0u8; dim * 8];
    r.read_exact(&mut bytes)?;
    let psi = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((length, theta, psi))
}
