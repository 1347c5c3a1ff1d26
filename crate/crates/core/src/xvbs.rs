//! Exact XVBS ground state at the projector angle as a bond-dimension-4
//! matrix product state, its Schmidt spectra and the closed-form entropy.
//!
//! Sites alternate between two tensors. An odd site creates `c†μ c†ν` and
//! passes `μ` in from the left and `ν` out to the right. An even site creates
//! `c†μ c†ν` contracted with `ε_{l μ ν r}` between its bonds `l` and `r`.
//! The amplitude of a configuration is `Σ_ab B_ab (A₁ A₂ ⋯ A_L)_ab`.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::chain::{self, von_neumann};
use crate::error::{Error, Result};
use crate::lanczos::LinearOperator;
use crate::registry::Registry;
use crate::su4::{pair_creation, Flavor, LOCAL_DIM};

pub const BOND: usize = 4;

/// Matrices `A[p]` (left × right bond) for each physical index `p`.
pub type SiteTensor = [Matrix4<Complex64>; LOCAL_DIM];

/// Sign of the permutation `idx` of `0..idx.len()`, or 0 if indices repeat.
pub fn levi_civita(idx: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            match idx[i].cmp(&idx[j]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

fn flavor(i: usize) -> Flavor {
    Flavor::new(i + 1).expect("bond index in range")
}

/// Tensor for sites that open a three-site singlet: `c†l c†r`.
pub fn odd_site_tensor() -> SiteTensor {
    let mut t = [Matrix4::zeros(); LOCAL_DIM];
    for l in 0..BOND {
        for r in 0..BOND {
            if let Some((coef, p)) = pair_creation(flavor(l), flavor(r)) {
                t[p][(l, r)] += Complex64::from(coef);
            }
        }
    }
    t
}

/// Tensor for sites inside a singlet: `Σ_{μν} ε_{l μ ν r} c†μ c†ν`.
pub fn even_site_tensor() -> SiteTensor {
    let mut t = [Matrix4::zeros(); LOCAL_DIM];
    for l in 0..BOND {
        for r in 0..BOND {
            for mu in 0..BOND {
                for nu in 0..BOND {
                    let eps = levi_civita(&[l, mu, nu, r]);
                    if eps == 0 {
                        continue;
                    }
                    if let Some((coef, p)) = pair_creation(flavor(mu), flavor(nu)) {
                        t[p][(l, r)] += Complex64::from(coef * eps as f64);
                    }
                }
            }
        }
    }
    t
}

/// Boundary with `B₁₁ = 1` and all other entries zero.
pub fn default_boundary() -> Matrix4<Complex64> {
    let mut b = Matrix4::zeros();
    b[(0, 0)] = Complex64::from(1.0);
    b
}

/// Unnormalized XVBS matrix product state on an odd number of sites.
#[derive(Debug, Clone)]
pub struct MpsState {
    pub site_tensors: Vec<SiteTensor>,
    pub boundary: Matrix4<Complex64>,
    pub length: usize,
}

pub fn build_xvbs_mps(length: usize, boundary: Matrix4<Complex64>) -> Result<MpsState> {
    if length < 3 || length % 2 == 0 {
        return Err(Error::EvenOrShortLength(length));
    }
    if boundary.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::ZeroBoundary);
    }
    let (odd, even) = (odd_site_tensor(), even_site_tensor());
    let site_tensors = (1..=length).map(|site| if site % 2 == 1 { odd } else { even }).collect();
    Ok(MpsState { site_tensors, boundary, length })
}

fn adjoint(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    m.adjoint()
}

/// 16×16 matrix from 4×4 blocks indexed `[(a, a')]`.
fn assemble_blocks(blocks: &[[Matrix4<Complex64>; BOND]; BOND]) -> DMatrix<Complex64> {
    DMatrix::from_fn(BOND * BOND, BOND * BOND, |i, j| blocks[i / BOND][j / BOND][(i % BOND, j % BOND)])
}

fn unit_blocks() -> [[Matrix4<Complex64>; BOND]; BOND] {
    let mut blocks = [[Matrix4::zeros(); BOND]; BOND];
    for (a, row) in blocks.iter_mut().enumerate() {
        for (a2, blk) in row.iter_mut().enumerate() {
            blk[(a, a2)] = Complex64::from(1.0);
        }
    }
    blocks
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let herm = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = herm.symmetric_eigen();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * Complex64::from(lam);
    }
    out
}

/// Schmidt weights across one bond of an [`MpsState`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    /// Descending, nonnegative, summing to one; values below the entropy
    /// cutoff are dropped.
    pub values: Vec<f64>,
    pub cut: usize,
    /// `(weight, count)` groups of equal values.
    pub multiplicities: Vec<(f64, usize)>,
}

impl SchmidtSpectrum {
    pub fn entropy(&self) -> f64 {
        von_neumann(&self.values)
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }
}

fn group_values(values: &[f64], rel_tol: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match groups.last_mut() {
            Some((g, n)) if (v - *g).abs() <= rel_tol * g.abs().max(v.abs()) => *n += 1,
            _ => groups.push((v, 1)),
        }
    }
    groups
}

impl MpsState {
    /// Gram blocks `⟨L_{a·}|L_{a'·}⟩` of the left `cut` sites.
    fn left_environment(&self, cut: usize) -> [[Matrix4<Complex64>; BOND]; BOND] {
        let mut blocks = unit_blocks();
        for tensor in &self.site_tensors[..cut] {
            for row in blocks.iter_mut() {
                for blk in row.iter_mut() {
                    *blk = tensor.iter().map(|a| adjoint(a) * *blk * a).sum();
                }
            }
        }
        blocks
    }

    /// Gram blocks `⟨R_{·b}|R_{·b'}⟩` of the sites after `cut`.
    fn right_environment(&self, cut: usize) -> [[Matrix4<Complex64>; BOND]; BOND] {
        let mut blocks = unit_blocks();
        for tensor in self.site_tensors[cut..].iter().rev() {
            for row in blocks.iter_mut() {
                for blk in row.iter_mut() {
                    *blk = tensor.iter().map(|a| a.conjugate() * *blk * a.transpose()).sum();
                }
            }
        }
        blocks
    }

    /// Squared norm, contracted through the transfer matrices.
    pub fn norm_sqr(&self) -> f64 {
        let left = self.left_environment(self.length);
        let mut total = Complex64::from(0.0);
        for a in 0..BOND {
            for a2 in 0..BOND {
                for b in 0..BOND {
                    for b2 in 0..BOND {
                        total += self.boundary[(a, b)].conj() * self.boundary[(a2, b2)] * left[a][a2][(b, b2)];
                    }
                }
            }
        }
        total.re
    }

    pub fn schmidt_spectrum(&self, cut: usize) -> Result<SchmidtSpectrum> {
        if cut == 0 || cut >= self.length {
            return Err(Error::CutOutOfRange { cut, max: self.length - 1 });
        }
        let gram = assemble_blocks(&self.left_environment(cut));
        let right = self.right_environment(cut);
        let b = &self.boundary;
        let n = BOND * BOND;
        // F[(a,x),(a',x')] = Σ_{bb'} conj(B_ab) B_a'b' K_{bb'}[x,x']; X = Fᵀ.
        let mut f = DMatrix::<Complex64>::zeros(n, n);
        for a in 0..BOND {
            for a2 in 0..BOND {
                for bb in 0..BOND {
                    for bb2 in 0..BOND {
                        let w = b[(a, bb)].conj() * b[(a2, bb2)];
                        if w.norm() == 0.0 {
                            continue;
                        }
                        for x in 0..BOND {
                            for x2 in 0..BOND {
                                f[(a * BOND + x, a2 * BOND + x2)] += w * right[bb][bb2][(x, x2)];
                            }
                        }
                    }
                }
            }
        }
        let root = hermitian_sqrt(&gram);
        let s = &root * f.transpose() * &root;
        let s = (&s + s.adjoint()) * Complex64::from(0.5);
        let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        let total: f64 = ev.iter().filter(|v| **v > 0.0).sum();
        ev.iter_mut().for_each(|v| *v /= total);
        ev.retain(|&v| v > chain::ENTROPY_CUTOFF);
        ev.sort_by(|a, b| b.total_cmp(a));
        let multiplicities = group_values(&ev, 1e-9);
        Ok(SchmidtSpectrum { values: ev, cut, multiplicities })
    }

    /// Entropy at every bond `1..length`.
    pub fn entropy_profile(&self) -> Result<Vec<f64>> {
        (1..self.length).map(|c| self.schmidt_spectrum(c).map(|s| s.entropy())).collect()
    }

    /// Full amplitude vector of length `6^L` (site 1 slowest), unnormalized.
    pub fn to_dense(&self) -> Vec<Complex64> {
        fn descend(
            tensors: &[SiteTensor],
            prefix: Matrix4<Complex64>,
            boundary: &Matrix4<Complex64>,
            out: &mut Vec<Complex64>,
        ) {
            match tensors.split_first() {
                None => out.push(prefix.component_mul(boundary).sum()),
                Some((site, rest)) => {
                    for a in site.iter() {
                        descend(rest, prefix * a, boundary, out);
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(chain::hilbert_dim(self.length));
        descend(&self.site_tensors, Matrix4::identity(), &self.boundary, &mut out);
        out
    }

    /// Unit-norm real amplitudes; fails if the state is not real up to a
    /// global phase.
    pub fn to_dense_real(&self) -> Result<Vec<f64>> {
        let dense = self.to_dense();
        let pivot = dense.iter().copied().fold(Complex64::from(0.0), |m, z| if z.norm() > m.norm() { z } else { m });
        let phase = pivot.conj() / pivot.norm();
        let rotated: Vec<Complex64> = dense.iter().map(|z| z * phase).collect();
        let norm = rotated.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let imag = rotated.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-12 * norm {
            return Err(Error::InvalidParameter("MPS amplitudes are not real up to a phase".into()));
        }
        Ok(rotated.iter().map(|z| z.re / norm).collect())
    }
}

/// `(⟨H⟩, ⟨H²⟩ − ⟨H⟩²)` of an unnormalized complex state under a real
/// symmetric operator.
pub fn energy_and_variance<O: LinearOperator + ?Sized>(op: &O, psi: &[Complex64]) -> (f64, f64) {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let (hre, him) = (op.apply(&re), op.apply(&im));
    let dot = crate::lanczos::dot;
    let energy = (dot(&re, &hre) + dot(&im, &him)) / norm_sqr;
    let spread = |v: &[f64], hv: &[f64]| hv.iter().zip(v).map(|(h, x)| (h - energy * x).powi(2)).sum::<f64>();
    (energy, (spread(&re, &hre) + spread(&im, &him)) / norm_sqr)
}

/// `χ₀ = 1`, `χ_{n+1} = 3(3χ_n − 2)`; `χ₁ = 3`.
pub fn chi(n: usize) -> Result<u128> {
    (0..n).try_fold(1u128, |c, _| c.checked_mul(3).and_then(|x| x.checked_sub(2)).and_then(|x| x.checked_mul(3)))
        .ok_or(Error::ChiOverflow(n))
}

fn chi_pair(half_length: usize, n: usize) -> Result<(i128, i128)> {
    if n > half_length {
        return Err(Error::Domain(format!("n = {n} exceeds N = {half_length}")));
    }
    let as_i128 = |k: usize| chi(k).and_then(|c| i128::try_from(c).map_err(|_| Error::ChiOverflow(k)));
    Ok((as_i128(n)?, as_i128(half_length - n)?))
}

/// `4χχ' − 3χ − 3χ' + 2`, the common denominator of the closed forms.
fn lambda3(x: i128, y: i128) -> Result<i128> {
    x.checked_mul(y)
        .and_then(|xy| xy.checked_mul(4))
        .map(|v| v - 3 * x - 3 * y + 2)
        .ok_or_else(|| Error::Domain("λ₃ overflows i128".into()))
}

fn ratio(num: i128, den: i128) -> f64 {
    num as f64 / den as f64
}

/// Three-weight closed form for a chain of `2N+1` sites in its symmetrized
/// shape: `(λ₁/2λ₃) Log(λ₁/2λ₃) − (λ₂/2λ₃) Log(λ₂/6λ₃)` with
/// `λ₁ = χ_n + χ_{N−n} − 2χ_nχ_{N−n}`, `λ₂ = 4 − 5χ_n − 5χ_{N−n} + 6χ_nχ_{N−n}`,
/// `λ₃ = 4χ_nχ_{N−n} − 3χ_n − 3χ_{N−n} + 2`.
///
/// `λ₁ ≤ 0` throughout, so the first logarithm is read as the real part of the
/// principal complex logarithm. The result uses the average of the exact
/// weights at bonds `2n+1` and `2(N−n)+1` and so differs from
/// [`exact_cut_entropy`] at order `9^{-min(n, N−n)}`.
pub fn closed_form_entropy(half_length: usize, n: usize) -> Result<f64> {
    let (x, y) = chi_pair(half_length, n)?;
    let l3 = lambda3(x, y)?;
    if l3 == 0 {
        return Err(Error::Domain(format!("λ₃ = 0 at N = {half_length}, n = {n}")));
    }
    let l1 = x + y - 2 * x * y;
    let l2 = 4 - 5 * x - 5 * y + 6 * x * y;
    let a = ratio(l1, 2 * l3);
    let b = ratio(l2, 2 * l3);
    let b_arg = ratio(l2, 6 * l3);
    if b_arg < 0.0 {
        return Err(Error::Domain(format!("λ₂/6λ₃ = {b_arg} < 0")));
    }
    let xlogx = |v: f64| if v == 0.0 { 0.0 } else { v * v.abs().ln() };
    let second = if b == 0.0 { 0.0 } else { b * b_arg.ln() };
    Ok(xlogx(a) - second)
}

/// Weight of the singly-degenerate Schmidt level at bond `cut` of the
/// default-boundary XVBS chain; the other three levels share `1 − p`.
pub fn exact_singlet_weight(length: usize, cut: usize) -> Result<f64> {
    if length < 3 || length % 2 == 0 {
        return Err(Error::EvenOrShortLength(length));
    }
    if cut == 0 || cut >= length {
        return Err(Error::CutOutOfRange { cut, max: length - 1 });
    }
    let half = (length - 1) / 2;
    let n = cut / 2;
    let (x, y) = chi_pair(half, n)?;
    let num = if cut % 2 == 1 { y * (x - 1) } else { x * (y - 1) };
    Ok(ratio(num, lambda3(x, y)?))
}

/// Closed-form entropy at bond `cut`, resolved by the parity of the site to
/// the left of the cut.
pub fn exact_cut_entropy(length: usize, cut: usize) -> Result<f64> {
    let p = exact_singlet_weight(length, cut)?;
    let q = (1.0 - p) / 3.0;
    Ok(von_neumann(&[p, q, q, q]))
}

/// A closed-form entanglement entropy for the default-boundary XVBS chain.
pub trait EntropyFormula: Send + Sync {
    fn entropy_at_cut(&self, length: usize, cut: usize) -> Result<f64>;
}

/// [`closed_form_entropy`] with bond `c` mapped to `n = ⌊c/2⌋`.
pub struct SymmetrizedFormula;

impl EntropyFormula for SymmetrizedFormula {
    fn entropy_at_cut(&self, length: usize, cut: usize) -> Result<f64> {
        if length < 3 || length % 2 == 0 {
            return Err(Error::EvenOrShortLength(length));
        }
        if cut == 0 || cut >= length {
            return Err(Error::CutOutOfRange { cut, max: length - 1 });
        }
        closed_form_entropy((length - 1) / 2, cut / 2)
    }
}

pub struct ExactFormula;

impl EntropyFormula for ExactFormula {
    fn entropy_at_cut(&self, length: usize, cut: usize) -> Result<f64> {
        exact_cut_entropy(length, cut)
    }
}

pub fn entropy_formulas() -> Registry<dyn EntropyFormula> {
    let mut reg: Registry<dyn EntropyFormula> = Registry::new("entropy formula");
    reg.register("exact", Box::new(ExactFormula));
    reg.register("symmetrized", Box::new(SymmetrizedFormula));
    reg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationStatus {
    Agrees,
    Discrepant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyComparison {
    pub cut: usize,
    pub closed_form: f64,
    pub transfer_matrix: f64,
    pub abs_difference: f64,
    pub status: VerificationStatus,
}

/// Compares a closed form against transfer-matrix entropies at every bond
/// of the default-boundary chain.
pub fn compare_profile(formula: &dyn EntropyFormula, length: usize, tol: f64) -> Result<Vec<EntropyComparison>> {
    let mps = build_xvbs_mps(length, default_boundary())?;
    (1..length)
        .map(|cut| {
            let closed_form = formula.entropy_at_cut(length, cut)?;
            let transfer_matrix = mps.schmidt_spectrum(cut)?.entropy();
            let abs_difference = (closed_form - transfer_matrix).abs();
            let status = if abs_difference <= tol { VerificationStatus::Agrees } else { VerificationStatus::Discrepant };
            Ok(EntropyComparison { cut, closed_form, transfer_matrix, abs_difference, status })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{assemble_hamiltonian, cut_spectrum, ground_state, BondSum, OperatorKind};
    use crate::su4::projector_angle;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix4<Complex64> {
        let m = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let q = m.qr().q();
        Matrix4::from_fn(|i, j| q[(i, j)])
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(&[0, 1, 2, 3]), 1);
        assert_eq!(levi_civita(&[1, 0, 2, 3]), -1);
        assert_eq!(levi_civita(&[3, 2, 1, 0]), 1);
        assert_eq!(levi_civita(&[0, 0, 2, 3]), 0);
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(0).unwrap(), 1);
        assert_eq!(chi(1).unwrap(), 3);
        assert_eq!(chi(2).unwrap(), 21);
        assert_eq!(chi(3).unwrap(), 183);
        assert!(matches!(chi(60), Err(Error::ChiOverflow(60))));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(build_xvbs_mps(4, default_boundary()), Err(Error::EvenOrShortLength(4))));
        assert!(matches!(build_xvbs_mps(1, default_boundary()), Err(Error::EvenOrShortLength(1))));
        assert!(matches!(build_xvbs_mps(5, Matrix4::zeros()), Err(Error::ZeroBoundary)));
        let mps = build_xvbs_mps(5, default_boundary()).unwrap();
        assert!(matches!(mps.schmidt_spectrum(5), Err(Error::CutOutOfRange { .. })));
        assert!(matches!(mps.schmidt_spectrum(0), Err(Error::CutOutOfRange { .. })));
    }

    #[test]
    fn norm_is_positive_and_consistent() {
        for length in [3, 5, 7] {
            let mps = build_xvbs_mps(length, default_boundary()).unwrap();
            let dense: f64 = mps.to_dense().iter().map(|z| z.norm_sqr()).sum();
            assert!(dense > 0.0);
            assert!((mps.norm_sqr() - dense).abs() <= 1e-9 * dense);
        }
    }

    #[test]
    fn zero_variance_at_projector_point() {
        for length in [3, 5, 7] {
            let mps = build_xvbs_mps(length, default_boundary()).unwrap();
            let op = BondSum::new(OperatorKind::Hamiltonian { theta: projector_angle() }, length).unwrap();
            let (_, var) = energy_and_variance(&op, &mps.to_dense());
            assert!(var <= 1e-9, "L = {length}: variance {var:e}");
        }
    }

    #[test]
    fn energy_matches_lanczos_at_seven_sites() {
        let mps = build_xvbs_mps(7, default_boundary()).unwrap();
        let theta = projector_angle();
        let op = BondSum::new(OperatorKind::Hamiltonian { theta }, 7).unwrap();
        let (energy, _) = energy_and_variance(&op, &mps.to_dense());
        let gs = ground_state(&assemble_hamiltonian(7, theta).unwrap(), 1e-9, 4).unwrap();
        assert!((energy - gs.energy).abs() <= 1e-8);
    }

    #[test]
    fn transfer_spectrum_matches_dense_svd() {
        let mps = build_xvbs_mps(7, default_boundary()).unwrap();
        let dense = mps.to_dense_real().unwrap();
        for cut in 1..7 {
            let tm = mps.schmidt_spectrum(cut).unwrap();
            assert!(tm.rank() <= 4);
            assert!((tm.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let svd = cut_spectrum(&dense, cut).unwrap();
            for (i, v) in svd.iter().enumerate() {
                let expected = tm.values.get(i).copied().unwrap_or(0.0);
                assert!((v - expected).abs() <= 1e-10, "cut {cut}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn fifteen_site_centre_cut() {
        let mps = build_xvbs_mps(15, default_boundary()).unwrap();
        let s = mps.schmidt_spectrum(7).unwrap();
        assert!(s.rank() <= 4);
        let e = s.entropy();
        assert!(e.is_finite() && e > 0.0);
        assert!((e - exact_cut_entropy(15, 7).unwrap()).abs() <= 1e-12);
        // One level of weight p and a three-fold level.
        let mut counts: Vec<usize> = s.multiplicities.iter().map(|g| g.1).collect();
        counts.sort();
        assert_eq!(counts, vec![1, 3]);
    }

    #[test]
    fn gauge_transformations_leave_entropy_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let length = 7;
        let base = build_xvbs_mps(length, default_boundary()).unwrap();
        let mut boundary = default_boundary();
        boundary[(1, 2)] = Complex64::new(0.3, -0.2);
        boundary[(3, 3)] = Complex64::new(-0.5, 0.1);
        let reference = MpsState { boundary, ..base.clone() };

        let (u, v) = (random_unitary(&mut rng), random_unitary(&mut rng));
        let mut gauged = reference.clone();
        gauged.boundary = u * boundary * v;
        for a in gauged.site_tensors[0].iter_mut() {
            *a = u.conjugate() * *a;
        }
        for a in gauged.site_tensors[length - 1].iter_mut() {
            *a = *a * v.conjugate();
        }
        for bond in 0..length - 1 {
            let g = random_unitary(&mut rng);
            for a in gauged.site_tensors[bond].iter_mut() {
                *a = *a * g;
            }
            for a in gauged.site_tensors[bond + 1].iter_mut() {
                *a = g.adjoint() * *a;
            }
        }

        let (d0, d1) = (reference.to_dense(), gauged.to_dense());
        let diff = d0.iter().zip(&d1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-10);
        for cut in 1..length {
            let s0 = reference.schmidt_spectrum(cut).unwrap().entropy();
            let s1 = gauged.schmidt_spectrum(cut).unwrap().entropy();
            assert!((s0 - s1).abs() <= 1e-10, "cut {cut}: {s0} vs {s1}");
        }
    }

    #[test]
    fn closed_form_symmetry_under_reflection() {
        for half in 1..=7 {
            for n in 0..=half {
                let a = closed_form_entropy(half, n).unwrap();
                let b = closed_form_entropy(half, half - n).unwrap();
                assert!((a - b).abs() <= 1e-12);
            }
        }
        assert!(matches!(closed_form_entropy(0, 0), Err(Error::Domain(_))));
        assert!(matches!(closed_form_entropy(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_formula_matches_transfer_matrix() {
        for length in (3..=15).step_by(2) {
            let rows = compare_profile(&ExactFormula, length, 1e-10).unwrap();
            assert!(rows.iter().all(|r| r.status == VerificationStatus::Agrees), "L = {length}");
        }
    }

    #[test]
    fn symmetrized_formula_is_discrepant_at_fifteen_sites() {
        let rows = compare_profile(&SymmetrizedFormula, 15, 1e-10).unwrap();
        assert!(rows.iter().any(|r| r.status == VerificationStatus::Discrepant));
        // Interior bonds carry only the small averaging error.
        assert!(rows[3..11].iter().all(|r| r.abs_difference < 1e-3));
    }

    #[test]
    fn profile_has_boundary_dips() {
        let s: Vec<f64> = (1..15).map(|c| exact_cut_entropy(15, c).unwrap()).collect();
        assert!((s[0] - 3f64.ln()).abs() <= 1e-12);
        let centre = s[6];
        assert!(s[0] < s[1] && s[1] < centre);
        assert!(centre <= 4f64.ln() + 1e-12);
    }
}
