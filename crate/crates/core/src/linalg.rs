//! Dense complex Hermitian linear algebra.
//!
//! Every operator in the crate is a [`HermitianMatrix`]; density matrices add
//! positivity and unit trace on top. Spectral decompositions are computed once
//! per matrix and cached, since nearly every downstream quantity is a function
//! of the spectrum.
//!
//! Matrix powers, logarithms and inverses are always taken *on the support*:
//! eigenvalues at or below [`support_threshold`] are treated as exact zeros and
//! mapped to zero regardless of the function applied.

use std::ops::Deref;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative eigenvalue cutoff used for every rank decision.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
const DENSITY_PSD_TOL: f64 = 1e-10;
const DENSITY_TRACE_TOL: f64 = 1e-10;

/// Eigenvalues `λ <= support_threshold(λ_max)` count as zero.
pub fn support_threshold(max_eigenvalue: f64) -> f64 {
    SUPPORT_CUTOFF * max_eigenvalue.max(1.0)
}

/// Spectral decomposition `H = U diag(λ) U†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn threshold(&self) -> f64 {
        support_threshold(self.max_value())
    }

    /// Indicator of eigenvalues strictly above the support cutoff.
    pub fn support_mask(&self) -> Vec<bool> {
        let t = self.threshold();
        self.values.iter().map(|&v| v > t).collect()
    }

    pub fn rank(&self) -> usize {
        self.support_mask().iter().filter(|&&b| b).count()
    }

    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> DVector<C64> {
        self.vectors.column(i).into_owned()
    }

    /// `U diag(f(λ)) U†`, where `f` is applied on the support only.
    pub fn map_on_support(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let t = self.threshold();
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = if lam > t { f(lam) } else { 0.0 };
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= lam;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix (only the lower triangle is read).
pub fn eigh(m: &CMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(invalid("matrix is not square"));
    }
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    Ok(eigh_unchecked(m))
}

fn eigh_unchecked(m: &CMatrix) -> EigenDecomposition {
    let n = m.nrows();
    let se = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    EigenDecomposition { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// Slower than [`eigvalsh`] but keeps small eigenvalues to high relative
/// accuracy when the matrix is graded, e.g. nearly diagonal with entries of
/// very different magnitude.
pub fn eigvalsh_jacobi(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let c = a[(p, q)];
                let ac = c.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if ac == 0.0 || ac <= f64::EPSILON * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let phase = c / ac;
                let zeta = (aqq - app) / (2.0 * ac);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let pc = phase.conj();
                for k in 0..n {
                    let (xp, xq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = xp * cs - xq * pc * sn;
                    a[(k, q)] = xp * sn + xq * pc * cs;
                }
                for k in 0..n {
                    let (xp, xq) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = xp * cs - xq * phase * sn;
                    a[(q, k)] = xp * sn + xq * phase * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * ac, 0.0);
                a[(q, q)] = C64::new(aqq + t * ac, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    m: CMatrix,
    eig: OnceLock<EigenDecomposition>,
}

impl HermitianMatrix {
    /// Validates Hermiticity to within `1e-12` (relative to the largest entry).
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_finite(&m)?;
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let n = m.nrows();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(invalid(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_raw(symmetrize(&m)))
    }

    /// Replaces `m` by `(m + m†)/2` before accepting it.
    pub fn from_symmetrized(m: CMatrix) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self::from_raw(symmetrize(&m)))
    }

    pub(crate) fn from_raw(m: CMatrix) -> Self {
        Self { m, eig: OnceLock::new() }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
        Self::from_raw(CMatrix::from_diagonal(&v))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw(CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Cached spectral decomposition.
    pub fn eig(&self) -> &EigenDecomposition {
        self.eig.get_or_init(|| eigh_unchecked(&self.m))
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    pub fn power_on_support(&self, p: f64) -> HermitianMatrix {
        Self::from_raw(self.eig().map_on_support(|x| x.powf(p)))
    }

    pub fn log_on_support(&self) -> HermitianMatrix {
        Self::from_raw(self.eig().map_on_support(f64::ln))
    }

    pub fn support_projector(&self) -> HermitianMatrix {
        Self::from_raw(self.eig().map_on_support(|_| 1.0))
    }

    /// Schatten `p`-(quasi)norm; `p = ∞` gives the operator norm.
    pub fn schatten(&self, p: f64) -> f64 {
        schatten_p(self, p)
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self::from_raw(self.m.kronecker(&other.m))
    }

    /// `U H U†` for a unitary `U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> HermitianMatrix {
        Self::from_raw(symmetrize(&(u * &self.m * u.adjoint())))
    }

    /// Diagonal part in the computational basis.
    pub fn dephased(&self) -> HermitianMatrix {
        Self::from_real_diagonal(&self.diagonal())
    }
}

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(invalid("matrix must be square with dimension at least 1"));
    }
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    Ok(())
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(h: &HermitianMatrix) -> EigenDecomposition {
    h.eig().clone()
}

pub fn power_on_support(a: &HermitianMatrix, p: f64) -> HermitianMatrix {
    a.power_on_support(p)
}

pub fn support_projector(a: &HermitianMatrix) -> HermitianMatrix {
    a.support_projector()
}

/// `(Σ s_i^p)^{1/p}` over singular values; also valid for `0 < p < 1`.
pub fn schatten_p(a: &HermitianMatrix, p: f64) -> f64 {
    let s = a.eig().values.iter().map(|v| v.abs());
    if p.is_infinite() {
        return s.fold(0.0, f64::max);
    }
    let sum: f64 = s.filter(|&x| x > 0.0).map(|x| x.powf(p)).sum();
    sum.powf(1.0 / p)
}

/// A positive semidefinite Hermitian matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    h: HermitianMatrix,
}

impl DensityMatrix {
    /// Symmetrizes, then requires eigenvalues `>= -1e-10` and trace within `1e-10` of one.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(HermitianMatrix::from_symmetrized(m)?, DENSITY_PSD_TOL, DENSITY_TRACE_TOL)
    }

    /// Validates with the given tolerances and rescales the trace to exactly one.
    pub fn with_tolerance(h: HermitianMatrix, psd_tol: f64, trace_tol: f64) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::TraceMismatch(tr));
        }
        let min = h.eig().min_value();
        if min < -psd_tol {
            return Err(Error::NotPsd(min));
        }
        let h = if tr == 1.0 { h } else { HermitianMatrix::from_raw(h.m.unscale(tr)) };
        Ok(Self { h })
    }

    /// Normalizes any nonzero PSD operator.
    pub fn from_psd(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if !(tr > 0.0) {
            return Err(invalid("operator has nonpositive trace"));
        }
        let scaled = HermitianMatrix::from_raw(h.m.unscale(tr));
        Self::with_tolerance(scaled, DENSITY_PSD_TOL, DENSITY_TRACE_TOL)
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { h: HermitianMatrix::from_raw(m) }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("state vector must be nonzero and finite"));
        }
        let v = v.unscale(norm);
        Ok(Self::from_trusted(&v * v.adjoint()))
    }

    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        let c: Vec<C64> = amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect();
        Self::pure(&c)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(CMatrix::identity(d, d).unscale(d as f64))
    }

    /// Uniform superposition of all basis states.
    pub fn maximally_coherent(d: usize) -> Self {
        Self::from_trusted(CMatrix::from_element(d, d, C64::new(1.0 / d as f64, 0.0)))
    }

    pub fn diagonal_state(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(p).into_matrix())
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.h
    }

    /// `ρ^{diag}` as a density matrix.
    pub fn dephased_state(&self) -> DensityMatrix {
        Self { h: self.h.dephased() }
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { h: self.h.kron(&other.h) }
    }

    pub fn rotate(&self, u: &CMatrix) -> DensityMatrix {
        Self { h: self.h.conjugate_by(u) }
    }

    /// Eigenvalues clamped at zero.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eig().values.iter().map(|&v| v.max(0.0)).collect()
    }

    /// Second-largest eigenvalue (zero in dimension one).
    pub fn second_eigenvalue(&self) -> f64 {
        let v = &self.eig().values;
        if v.len() < 2 {
            0.0
        } else {
            v[v.len() - 2].max(0.0)
        }
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.h
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.h
    }
}

/// Which tensor factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A density matrix on `C^{dA} ⊗ C^{dB}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim() {
            return Err(invalid(format!(
                "subsystem dimensions {dim_a}x{dim_b} do not match state dimension {}",
                state.dim()
            )));
        }
        Ok(Self { state, dim_a, dim_b })
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self { state: a.kron(b), dim_a: a.dim(), dim_b: b.dim() }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Traces out `which`, returning the marginal on the other factor.
    pub fn partial_trace(&self, which: Subsystem) -> DensityMatrix {
        let keep = match which {
            Subsystem::A => 1,
            Subsystem::B => 0,
        };
        let m = reduce(self.state.matrix(), &[self.dim_a, self.dim_b], &[keep]);
        DensityMatrix::from_trusted(symmetrize(&m))
    }

    /// Transpose on the A factor.
    pub fn partial_transpose(&self) -> HermitianMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = self.state.matrix();
        let mut out = CMatrix::zeros(da * db, da * db);
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        out[(a * db + b, a2 * db + b2)] = m[(a2 * db + b, a * db + b2)];
                    }
                }
            }
        }
        HermitianMatrix::from_raw(out)
    }

    /// Tensor product of two bipartite states, regrouped as `(A1 A2) | (B1 B2)`.
    pub fn kron_regrouped(&self, other: &BipartiteState) -> BipartiteState {
        let dims = [self.dim_a, self.dim_b, other.dim_a, other.dim_b];
        let joint = self.state.matrix().kronecker(other.state.matrix());
        let m = permute_subsystems(&joint, &dims, &[0, 2, 1, 3]);
        BipartiteState {
            state: DensityMatrix::from_trusted(m),
            dim_a: self.dim_a * other.dim_a,
            dim_b: self.dim_b * other.dim_b,
        }
    }
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn compose(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Partial trace over every subsystem not listed in `keep` (kept in listed order).
pub fn reduce(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "dimension mismatch in partial trace");
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let split: Vec<(usize, usize)> = (0..total)
        .map(|i| {
            let d = digits(i, dims);
            let kd: Vec<usize> = keep.iter().map(|&k| d[k]).collect();
            let td: Vec<usize> = traced.iter().map(|&k| d[k]).collect();
            (compose(&kd, &keep_dims), compose(&td, &traced_dims))
        })
        .collect();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for i in 0..total {
        for j in 0..total {
            if split[i].1 == split[j].1 {
                out[(split[i].0, split[j].0)] += m[(i, j)];
            }
        }
    }
    out
}

/// Reorders tensor factors: factor `order[k]` of the input becomes factor `k`.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], order: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let map: Vec<usize> = (0..total)
        .map(|i| {
            let d = digits(i, dims);
            let nd: Vec<usize> = order.iter().map(|&k| d[k]).collect();
            compose(&nd, &new_dims)
        })
        .collect();
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    out
}

/// Uhlmann fidelity `(tr √(√σ ρ √σ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(invalid("fidelity arguments have different dimensions"));
    }
    let s = sigma.power_on_support(0.5);
    let x = s.matrix() * rho.matrix() * s.matrix();
    let root: f64 = eigvalsh(&symmetrize(&x)).iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Frobenius norm of `AB - BA`.
pub fn commutator_norm(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn jacobi_keeps_tiny_eigenvalues() {
        let m = CMatrix::from_fn(3, 3, |r, k| match (r, k) {
            (0, 0) => c(1.0),
            (1, 1) => c(1e-20),
            (2, 2) => c(0.5),
            (0, 2) | (2, 0) => C64::new(0.0, 0.25),
            (0, 1) => C64::new(1e-11, 1e-11),
            (1, 0) => C64::new(1e-11, -1e-11),
            _ => c(0.0),
        });
        let v = eigvalsh_jacobi(&m);
        let qr = eigvalsh(&m);
        for (a, b) in v.iter().zip(&qr).skip(1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        // the Schur complement of the big block sets the small eigenvalue
        let schur = 1e-20 - 2e-22 * 0.5 / (0.5 - 0.0625);
        assert!((v[0] - schur).abs() < 1e-3 * schur, "{} vs {schur}", v[0]);
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(s), c(0.0), c(0.0), c(s)]).unwrap()
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = eig_hermitian(&HermitianMatrix::identity(2));
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let e = eig_hermitian(&HermitianMatrix::from_real_diagonal(&[0.7, 0.3]));
        assert_abs_diff_eq!(e.values[0], 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 0.7, epsilon = 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let e = eig_hermitian(&HermitianMatrix::new(x.clone()).unwrap());
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        assert!((e.reconstruct() - x).norm() < 1e-12);
        let uu = e.vectors.adjoint() * &e.vectors;
        assert!((uu - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_finite() {
        let m = CMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
        assert!(matches!(eigh(&m), Err(Error::InvalidInput(_))));
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn hermitian_check() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), C64::new(0.0, 1.0), C64::new(0.0, 1.0), c(1.0)]);
        assert!(HermitianMatrix::new(m.clone()).is_err());
        assert!(HermitianMatrix::from_symmetrized(m).is_ok());
    }

    #[test]
    fn powers_on_support() {
        let p = DensityMatrix::pure_real(&[1.0, 1.0, 0.0]).unwrap();
        let proj = HermitianMatrix::from_raw(p.matrix().clone());
        assert!((proj.power_on_support(-1.0).matrix() - proj.matrix()).norm() < 1e-12);
        for a in [0.3, 2.0, 7.5] {
            assert!((p.power_on_support(a).matrix() - p.matrix()).norm() < 1e-12);
        }
        let d = HermitianMatrix::from_real_diagonal(&[4.0, 0.0]).power_on_support(0.5);
        assert_abs_diff_eq!(d.matrix()[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.matrix()[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn projectors() {
        let full = DensityMatrix::maximally_mixed(3);
        assert!((full.support_projector().matrix() - CMatrix::identity(3, 3)).norm() < 1e-12);
        let pure = DensityMatrix::pure_real(&[0.6, 0.8]).unwrap();
        assert!((pure.support_projector().matrix() - pure.matrix()).norm() < 1e-12);
        let half = HermitianMatrix::from_real_diagonal(&[0.5, 0.5, 0.0]).support_projector();
        assert_eq!(half.diagonal(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn schatten_values() {
        assert_abs_diff_eq!(schatten_p(&HermitianMatrix::identity(3), 1.0), 3.0, epsilon = 1e-12);
        let q = HermitianMatrix::from_real_diagonal(&[0.25; 4]);
        assert_abs_diff_eq!(schatten_p(&q, 0.5), 4.0, epsilon = 1e-12);
        let x = HermitianMatrix::from_real_diagonal(&[-3.0, 2.0]);
        assert_abs_diff_eq!(schatten_p(&x, f64::INFINITY), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_cases() {
        let a = DensityMatrix::pure_real(&[0.6, 0.8]).unwrap();
        let b = DensityMatrix::diagonal_state(&[0.2, 0.3, 0.5]).unwrap();
        let ab = BipartiteState::product(&a, &b);
        assert!((ab.partial_trace(Subsystem::A).matrix() - b.matrix()).norm() < 1e-12);
        assert!((ab.partial_trace(Subsystem::B).matrix() - a.matrix()).norm() < 1e-12);
        let bell = BipartiteState::new(bell(), 2, 2).unwrap();
        let red = bell.partial_trace(Subsystem::A);
        assert!((red.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_bell() {
        let bell = BipartiteState::new(bell(), 2, 2).unwrap();
        let pt = bell.partial_transpose();
        let e = &pt.eig().values;
        assert_abs_diff_eq!(e[0], -0.5, epsilon = 1e-12);
        for v in &e[1..] {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
        let diag = DensityMatrix::diagonal_state(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = BipartiteState::new(diag.clone(), 2, 2).unwrap();
        assert!((s.partial_transpose().matrix() - diag.matrix()).norm() < 1e-15);
    }

    #[test]
    fn fidelity_cases() {
        let plus = DensityMatrix::maximally_coherent(2);
        assert_abs_diff_eq!(fidelity(&plus, &plus).unwrap(), 1.0, epsilon = 1e-12);
        let zero = DensityMatrix::pure_real(&[1.0, 0.0]).unwrap();
        let one = DensityMatrix::pure_real(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(fidelity(&plus, &mixed).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.4)]));
        assert!(matches!(DensityMatrix::new(bad), Err(Error::TraceMismatch(_))));
        let neg = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.1), c(-0.1)]));
        assert!(matches!(DensityMatrix::new(neg), Err(Error::NotPsd(_))));
    }

    #[test]
    fn regrouped_product_traces() {
        let a = DensityMatrix::diagonal_state(&[0.25, 0.75]).unwrap();
        let s1 = BipartiteState::new(bell(), 2, 2).unwrap();
        let s2 = BipartiteState::product(&a, &DensityMatrix::maximally_mixed(3));
        let joint = s1.kron_regrouped(&s2);
        assert_eq!((joint.dim_a(), joint.dim_b()), (4, 6));
        let ra = joint.partial_trace(Subsystem::B);
        let expected = s1.partial_trace(Subsystem::B).kron(&a);
        assert!((ra.matrix() - expected.matrix()).norm() < 1e-12);
    }
}
