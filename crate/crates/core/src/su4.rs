//! SU(4) generators on the six-dimensional antisymmetric representation and
//! the SU(4)-invariant nearest-neighbour bond operators built from them.
//!
//! Each site carries two fermions in four flavors. Basis kets are
//! `c†α c†β |0⟩` with `α < β`, ordered lexicographically:
//! `(1,2) (1,3) (1,4) (2,3) (2,4) (3,4)`. Every matrix in the crate uses this
//! ordering, and two-site matrices use site `i` as the slow index.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Number of fermion flavors.
pub const FLAVORS: usize = 4;
/// Dimension of the on-site representation.
pub const LOCAL_DIM: usize = 6;
/// Dimension of a two-site bond space.
pub const BOND_DIM: usize = LOCAL_DIM * LOCAL_DIM;

/// A flavor index in `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flavor(u8);

impl Flavor {
    pub fn new(index: usize) -> Result<Self> {
        if (1..=FLAVORS).contains(&index) {
            Ok(Self(index as u8))
        } else {
            Err(Error::FlavorOutOfRange(index))
        }
    }

    pub fn all() -> impl Iterator<Item = Flavor> {
        (1..=FLAVORS as u8).map(Flavor)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn mode(self) -> u8 {
        self.0 - 1
    }
}

/// Fock space of four fermionic modes on one site, states stored as bitmasks.
///
/// Occupation kets are `(c†1)^n1 (c†2)^n2 (c†3)^n3 (c†4)^n4 |0⟩`; a creation or
/// annihilation operator on mode `m` picks up `(-1)^(occupied modes below m)`.
pub mod fock {
    pub type Mask = u8;

    fn parity_below(state: Mask, mode: u8) -> f64 {
        if (state & ((1 << mode) - 1)).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn create(mode: u8, state: Mask) -> Option<(f64, Mask)> {
        let bit = 1 << mode;
        if state & bit != 0 {
            return None;
        }
        Some((parity_below(state, mode), state | bit))
    }

    pub fn annihilate(mode: u8, state: Mask) -> Option<(f64, Mask)> {
        let bit = 1 << mode;
        if state & bit == 0 {
            return None;
        }
        Some((parity_below(state, mode), state & !bit))
    }

    /// Applies `c†(modes[0]) c†(modes[1]) ...` to `state` (rightmost first).
    pub fn create_string(modes: &[u8], state: Mask) -> Option<(f64, Mask)> {
        modes.iter().rev().try_fold((1.0, state), |(sign, s), &m| {
            create(m, s).map(|(sg, next)| (sign * sg, next))
        })
    }
}

/// The six on-site basis labels as flavor pairs `(α, β)`, `α < β`.
pub fn build_basis() -> [(usize, usize); LOCAL_DIM] {
    [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
}

fn basis_masks() -> [fock::Mask; LOCAL_DIM] {
    build_basis().map(|(a, b)| (1u8 << (a - 1)) | (1u8 << (b - 1)))
}

/// Index of a two-fermion occupation mask in the pair basis.
pub fn basis_index(mask: fock::Mask) -> Option<usize> {
    basis_masks().iter().position(|&m| m == mask)
}

/// Coefficient and basis index of `c†μ c†ν |0⟩` on one site, or `None` when
/// `μ = ν`. The coefficient is `+1` for `μ < ν` and `-1` otherwise, derived
/// from the anticommutation rules rather than tabulated.
pub fn pair_creation(mu: Flavor, nu: Flavor) -> Option<(f64, usize)> {
    let (sign, mask) = fock::create_string(&[mu.mode(), nu.mode()], 0)?;
    // The ket c†α c†β|0⟩ with α < β has coefficient +1 on its own mask.
    let (ref_sign, _) = fock::create_string(&[mu.min(nu).mode(), mu.max(nu).mode()], 0)?;
    Some((sign * ref_sign, basis_index(mask)?))
}

/// One SU(4) generator `S^μ_ν = c†μ c_ν − δ_μν/2` on the 6-dim representation.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGenerator {
    pub mu: Flavor,
    pub nu: Flavor,
    pub matrix: DMatrix<f64>,
}

pub fn build_generator(mu: usize, nu: usize) -> Result<LocalGenerator> {
    let mu = Flavor::new(mu)?;
    let nu = Flavor::new(nu)?;
    let masks = basis_masks();
    // Sign of each basis ket relative to the bare occupation ket.
    let ket_sign: Vec<f64> = build_basis()
        .iter()
        .map(|&(a, b)| fock::create_string(&[(a - 1) as u8, (b - 1) as u8], 0).unwrap().0)
        .collect();

    let mut matrix = DMatrix::zeros(LOCAL_DIM, LOCAL_DIM);
    for (col, &mask) in masks.iter().enumerate() {
        let image = fock::annihilate(nu.mode(), mask)
            .and_then(|(s1, m1)| fock::create(mu.mode(), m1).map(|(s2, m2)| (s1 * s2, m2)));
        if let Some((sign, out)) = image {
            let row = basis_index(out).expect("bilinear preserves particle number");
            matrix[(row, col)] += sign * ket_sign[col] * ket_sign[row];
        }
    }
    if mu == nu {
        for i in 0..LOCAL_DIM {
            matrix[(i, i)] -= 0.5;
        }
    }
    Ok(LocalGenerator { mu, nu, matrix })
}

/// All 16 generators indexed `[(μ-1)*4 + (ν-1)]`.
pub fn all_generators() -> Vec<LocalGenerator> {
    let mut out = Vec::with_capacity(FLAVORS * FLAVORS);
    for mu in 1..=FLAVORS {
        for nu in 1..=FLAVORS {
            out.push(build_generator(mu, nu).expect("indices in range"));
        }
    }
    out
}

/// Two-site generators `S^μ_ν ⊗ 1 + 1 ⊗ S^μ_ν` for all 16 flavor pairs.
pub fn global_bond_generators() -> Vec<DMatrix<f64>> {
    let id = DMatrix::<f64>::identity(LOCAL_DIM, LOCAL_DIM);
    all_generators()
        .iter()
        .map(|g| g.matrix.kronecker(&id) + id.kronecker(&g.matrix))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondKind {
    Exchange,
    SquaredExchange,
    Hamiltonian { theta: f64 },
}

/// A 36×36 real symmetric operator on two adjacent sites.
#[derive(Debug, Clone, PartialEq)]
pub struct BondOperator {
    pub kind: BondKind,
    pub matrix: DMatrix<f64>,
}

/// `C₂ = Σ_{μν} S^μ_ν ⊗ S^ν_μ`.
pub fn build_exchange() -> BondOperator {
    let gens = all_generators();
    let mut matrix = DMatrix::zeros(BOND_DIM, BOND_DIM);
    for mu in 0..FLAVORS {
        for nu in 0..FLAVORS {
            let left = &gens[mu * FLAVORS + nu].matrix;
            let right = &gens[nu * FLAVORS + mu].matrix;
            matrix += left.kronecker(right);
        }
    }
    BondOperator { kind: BondKind::Exchange, matrix }
}

/// `C₂²`, formed as the square of the exchange matrix.
pub fn build_squared_exchange() -> BondOperator {
    let c2 = build_exchange().matrix;
    BondOperator { kind: BondKind::SquaredExchange, matrix: &c2 * &c2 }
}

/// `H_i(θ) = cos θ · C₂ + (sin θ / 4) · C₂²`.
pub fn build_bond_hamiltonian(theta: f64) -> BondOperator {
    let c2 = build_exchange().matrix;
    let c2sq = &c2 * &c2;
    let (c, s) = bond_weights(theta);
    BondOperator { kind: BondKind::Hamiltonian { theta }, matrix: c2 * c + c2sq * s }
}

/// Coupling vector `(cos θ, sin θ / 4)` multiplying `(C₂, C₂²)`.
pub fn bond_weights(theta: f64) -> (f64, f64) {
    (theta.cos(), theta.sin() / 4.0)
}

/// The angle at which `H_i(θ)` is a shifted projector onto the 20-dim bond irrep.
pub fn projector_angle() -> f64 {
    (2.0f64 / 3.0).atan()
}

/// Distinct eigenvalues (ascending) with multiplicities, grouping values
/// closer than `tol`.
pub fn eigenvalue_groups(matrix: &DMatrix<f64>, tol: f64) -> Vec<(f64, usize)> {
    let mut evals: Vec<f64> = matrix.clone().symmetric_eigenvalues().iter().copied().collect();
    evals.sort_by(|a, b| a.total_cmp(b));
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for e in evals {
        match groups.last_mut() {
            Some((first, n, sum)) if (e - *first).abs() <= tol => {
                *n += 1;
                *sum += e;
            }
            _ => groups.push((e, 1, e)),
        }
    }
    groups.into_iter().map(|(_, n, sum)| (sum / n as f64, n)).collect()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
