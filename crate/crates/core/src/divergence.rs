//! Petz and sandwiched Rényi relative entropies.
//!
//! ```text
//! Petz:        S_α(ρ‖σ)  = 1/(α-1) ln tr(ρ^α σ^{1-α})
//! sandwiched:  S̲_α(ρ‖σ) = 1/(α-1) ln tr(σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α
//! ```
//!
//! The second argument may be any nonzero PSD operator. Powers are taken on
//! the support, and `+∞` is returned whenever `α >= 1` and `supp ρ ⊄ supp σ`
//! (or the trace functional vanishes). `α = 1` is the Umegaki relative entropy
//! and is evaluated by its own branch. Traces are accumulated in log space so
//! that large orders do not overflow.

use crate::error::{invalid, Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{
    commutator_norm, eigvalsh, support_threshold, symmetrize, CMatrix, DensityMatrix, EigenDecomposition,
    HermitianMatrix,
};

/// Orders used to approximate the Petz `α → ∞` limit.
pub const PETZ_INFINITY_GRID: [f64; 10] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

const LEAK_TOL: f64 = 1e-9;
/// Eigenvector overlaps below this are rounding noise; at large orders they
/// would otherwise be amplified by `(λ/μ)^α`.
pub(crate) const OVERLAP_FLOOR: f64 = 1e-12;

/// A strictly increasing list of orders in `[0, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(Vec<f64>);

impl AlphaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("alpha grid is empty"));
        }
        if values.iter().any(|a| a.is_nan() || *a < 0.0) {
            return Err(invalid("alpha values must be nonnegative"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("alpha grid must be strictly increasing"));
        }
        Ok(Self(values))
    }

    /// Comma-separated list; `inf` denotes `α = ∞`.
    pub fn parse(csv: &str) -> Result<Self> {
        let values = csv
            .split(',')
            .map(|s| parse_alpha(s.trim()))
            .collect::<Result<Vec<f64>>>()?;
        Self::new(values)
    }

    /// `{0.25, 0.5, 0.75, 1, 1.5, 2, 3, 5, ∞}`.
    pub fn standard() -> Self {
        Self(vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, f64::INFINITY])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn restricted(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.iter().filter(|&a| a >= lo && a <= hi).collect()
    }
}

pub fn parse_alpha(s: &str) -> Result<f64> {
    match s {
        "inf" | "∞" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad alpha value {s:?}")))
            .and_then(|a| if a >= 0.0 { Ok(a) } else { Err(invalid("alpha must be nonnegative")) }),
    }
}

fn validate_pair(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", rho.dim(), sigma.dim())));
    }
    let e = sigma.eig();
    if e.max_value() <= 0.0 {
        return Err(invalid("second argument must be a nonzero PSD operator"));
    }
    if e.min_value() < -support_threshold(e.max_value()) {
        return Err(Error::NotPsd(e.min_value()));
    }
    Ok(())
}

/// Joint spectral data: support eigenpairs of both operators and their overlaps.
struct Pair {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    /// `overlap[j][k] = |⟨u_j|v_k⟩|²` over support eigenvectors.
    overlap: Vec<Vec<f64>>,
    leaks: bool,
}

impl Pair {
    fn new(rho: &EigenDecomposition, sigma: &EigenDecomposition) -> Self {
        let rs = support_indices(rho);
        let ss = support_indices(sigma);
        let w = rho.vectors.adjoint() * &sigma.vectors;
        let overlap: Vec<Vec<f64>> =
            rs.iter().map(|&j| ss.iter().map(|&k| snap(w[(j, k)].norm_sqr())).collect()).collect();
        let leaks = overlap.iter().any(|row| 1.0 - row.iter().sum::<f64>() > LEAK_TOL);
        Pair {
            lambda: rs.iter().map(|&j| rho.values[j]).collect(),
            mu: ss.iter().map(|&k| sigma.values[k]).collect(),
            overlap,
            leaks,
        }
    }
}

fn snap(a: f64) -> f64 {
    if a < OVERLAP_FLOOR {
        0.0
    } else {
        a
    }
}

fn support_indices(e: &EigenDecomposition) -> Vec<usize> {
    e.support_mask().iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

pub(crate) fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn from_log_trace(log_trace: f64, alpha: f64) -> ExtReal {
    if log_trace == f64::NEG_INFINITY {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(log_trace / (alpha - 1.0))
    }
}

/// Umegaki relative entropy `tr ρ(ln ρ - ln σ)`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<ExtReal> {
    validate_pair(rho, sigma)?;
    let p = Pair::new(rho.eig(), sigma.eig());
    Ok(relative_entropy_pair(&p))
}

fn relative_entropy_pair(p: &Pair) -> ExtReal {
    if p.leaks {
        return ExtReal::PosInf;
    }
    let mut s = 0.0;
    for (j, &l) in p.lambda.iter().enumerate() {
        s += l * l.ln();
        for (k, &m) in p.mu.iter().enumerate() {
            s -= p.overlap[j][k] * l * m.ln();
        }
    }
    ExtReal::Finite(s)
}

/// Petz Rényi relative entropy for `α ∈ [0, ∞]`.
///
/// `α = ∞` is reported as the supremum over [`PETZ_INFINITY_GRID`].
pub fn petz_renyi(rho: &DensityMatrix, sigma: &HermitianMatrix, alpha: f64) -> Result<ExtReal> {
    check_alpha(alpha, 0.0)?;
    validate_pair(rho, sigma)?;
    let p = Pair::new(rho.eig(), sigma.eig());
    Ok(petz_pair(&p, alpha))
}

fn petz_pair(p: &Pair, alpha: f64) -> ExtReal {
    if alpha.is_infinite() {
        return PETZ_INFINITY_GRID.iter().map(|&a| petz_pair(p, a)).fold(ExtReal::Finite(f64::MIN), ExtReal::max);
    }
    if alpha == 1.0 {
        return relative_entropy_pair(p);
    }
    if alpha == 0.0 {
        let t: f64 = p.overlap.iter().map(|row| row.iter().zip(&p.mu).map(|(a, m)| a * m).sum::<f64>()).sum();
        return if t > 0.0 { ExtReal::Finite(-t.ln()) } else { ExtReal::PosInf };
    }
    if alpha > 1.0 && p.leaks {
        return ExtReal::PosInf;
    }
    let mut terms = Vec::with_capacity(p.lambda.len() * p.mu.len());
    for (j, &l) in p.lambda.iter().enumerate() {
        for (k, &m) in p.mu.iter().enumerate() {
            let a = p.overlap[j][k];
            if a > 0.0 {
                terms.push(a.ln() + alpha * l.ln() + (1.0 - alpha) * m.ln());
            }
        }
    }
    from_log_trace(log_sum_exp(terms), alpha)
}

fn check_alpha(alpha: f64, min: f64) -> Result<()> {
    if alpha.is_nan() || alpha < min {
        return Err(invalid(format!("order alpha = {alpha} outside [{min}, inf]")));
    }
    Ok(())
}

/// Sandwiched Rényi relative entropy for `α ∈ (0, ∞]`.
pub fn sandwiched_renyi(rho: &DensityMatrix, sigma: &HermitianMatrix, alpha: f64) -> Result<ExtReal> {
    check_alpha(alpha, 0.0)?;
    if alpha == 0.0 {
        return Err(invalid("the sandwiched divergence is not defined here at alpha = 0"));
    }
    validate_pair(rho, sigma)?;
    if alpha.is_infinite() {
        return max_relative_entropy(rho, sigma);
    }
    let p = Pair::new(rho.eig(), sigma.eig());
    if alpha == 1.0 {
        return Ok(relative_entropy_pair(&p));
    }
    if alpha > 1.0 && p.leaks {
        return Ok(ExtReal::PosInf);
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let s = sigma.power_on_support(gamma);
    let x = symmetrize(&(s.matrix() * rho.matrix() * s.matrix()));
    Ok(sandwiched_from_eigs(&eigvalsh(&x), alpha))
}

fn sandwiched_from_eigs(x: &[f64], alpha: f64) -> ExtReal {
    let xmax = x.iter().copied().fold(0.0, f64::max);
    let t = support_threshold(xmax);
    from_log_trace(log_sum_exp(x.iter().filter(|&&v| v > t).map(|&v| alpha * v.ln())), alpha)
}

/// `min{ln λ : λσ >= ρ}`, i.e. the log of the largest eigenvalue of `σ^{-1/2} ρ σ^{-1/2}`.
pub fn max_relative_entropy(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<ExtReal> {
    validate_pair(rho, sigma)?;
    let p = Pair::new(rho.eig(), sigma.eig());
    if p.leaks {
        return Ok(ExtReal::PosInf);
    }
    let s = sigma.power_on_support(-0.5);
    let x = symmetrize(&(s.matrix() * rho.matrix() * s.matrix()));
    let top = eigvalsh(&x).last().copied().unwrap_or(0.0);
    Ok(ExtReal::Finite(top.ln()))
}

fn diag_threshold(q: &[f64]) -> f64 {
    support_threshold(q.iter().copied().fold(0.0, f64::max))
}

fn validate_diag(rho: &DensityMatrix, q: &[f64]) -> Result<()> {
    if q.len() != rho.dim() {
        return Err(invalid("diagonal length does not match state dimension"));
    }
    if q.iter().any(|x| !x.is_finite()) || q.iter().all(|&x| x <= 0.0) {
        return Err(invalid("diagonal second argument must be finite, nonnegative and nonzero"));
    }
    Ok(())
}

fn diag_leaks(rho: &DensityMatrix, q: &[f64], t: f64) -> bool {
    let proj = rho.support_projector();
    q.iter().enumerate().any(|(i, &x)| x <= t && proj.matrix()[(i, i)].re > LEAK_TOL)
}

/// Petz divergence against the diagonal operator `diag(q)`.
///
/// Same conventions as [`petz_renyi`]; avoids a second eigendecomposition.
pub fn petz_renyi_diag(rho: &DensityMatrix, q: &[f64], alpha: f64) -> Result<ExtReal> {
    check_alpha(alpha, 0.0)?;
    validate_diag(rho, q)?;
    if alpha.is_infinite() || alpha == 1.0 {
        return petz_renyi(rho, &HermitianMatrix::from_real_diagonal(q), alpha);
    }
    let t = diag_threshold(q);
    if alpha == 0.0 {
        let proj = rho.support_projector();
        let s: f64 = q.iter().enumerate().filter(|(_, &x)| x > t).map(|(i, &x)| proj.matrix()[(i, i)].re * x).sum();
        return Ok(if s > 0.0 { ExtReal::Finite(-s.ln()) } else { ExtReal::PosInf });
    }
    if alpha > 1.0 && diag_leaks(rho, q, t) {
        return Ok(ExtReal::PosInf);
    }
    let e = rho.eig();
    let mask = e.support_mask();
    let mut terms = Vec::new();
    for (j, &l) in e.values.iter().enumerate() {
        if !mask[j] {
            continue;
        }
        for (k, &x) in q.iter().enumerate() {
            let a = snap(e.vectors[(k, j)].norm_sqr());
            if x > t && a > 0.0 {
                terms.push(a.ln() + alpha * l.ln() + (1.0 - alpha) * x.ln());
            }
        }
    }
    Ok(from_log_trace(log_sum_exp(terms), alpha))
}

/// Sandwiched divergence against the diagonal operator `diag(q)`.
pub fn sandwiched_renyi_diag(rho: &DensityMatrix, q: &[f64], alpha: f64) -> Result<ExtReal> {
    check_alpha(alpha, 0.0)?;
    if alpha == 0.0 {
        return Err(invalid("the sandwiched divergence is not defined here at alpha = 0"));
    }
    validate_diag(rho, q)?;
    if alpha == 1.0 {
        return relative_entropy(rho, &HermitianMatrix::from_real_diagonal(q));
    }
    let t = diag_threshold(q);
    if (alpha > 1.0) && diag_leaks(rho, q, t) {
        return Ok(ExtReal::PosInf);
    }
    let gamma = if alpha.is_infinite() { -0.5 } else { (1.0 - alpha) / (2.0 * alpha) };
    let w: Vec<f64> = q.iter().map(|&x| if x > t { x.powf(gamma) } else { 0.0 }).collect();
    let n = q.len();
    let m = rho.matrix();
    let x = CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (w[i] * w[j]));
    let eigs = eigvalsh(&x);
    if alpha.is_infinite() {
        let top = eigs.last().copied().unwrap_or(0.0);
        return Ok(if top > 0.0 { ExtReal::Finite(top.ln()) } else { ExtReal::PosInf });
    }
    Ok(sandwiched_from_eigs(&eigs, alpha))
}

/// Relative varentropy `tr ρ(ln ρ - ln σ)² - S(ρ‖σ)²`.
pub fn relative_varentropy(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    validate_pair(rho, sigma)?;
    if Pair::new(rho.eig(), sigma.eig()).leaks {
        return Err(invalid("relative varentropy needs supp ρ ⊆ supp σ"));
    }
    let l = rho.log_on_support().matrix() - sigma.log_on_support().matrix();
    let rl = rho.matrix() * &l;
    let first = rl.trace().re;
    let second = (&rl * &l).trace().re;
    Ok(second - first * first)
}

/// Commutator tolerance relative to `‖ρ‖_F ‖σ‖_F`.
pub const COMMUTATOR_TOL: f64 = 1e-9;
/// Tolerance on `‖Π_ρ σ - cρ‖_F` relative to `‖σ‖_F`.
pub const PROPORTIONALITY_TOL: f64 = 1e-9;

/// The constant `c > 0` with `Π_ρ σ = cρ`, provided `ρ` and `σ` commute.
///
/// When it exists, both divergence families equal `-ln c` at every order.
pub fn proportionality_constant(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<Option<f64>> {
    validate_pair(rho, sigma)?;
    let scale = rho.frobenius_norm() * sigma.frobenius_norm();
    if commutator_norm(rho.as_hermitian(), sigma) > COMMUTATOR_TOL * scale {
        return Ok(None);
    }
    let m = rho.support_projector().matrix() * sigma.matrix();
    let c = m.trace().re;
    if !(c > 0.0) {
        return Ok(None);
    }
    let resid = (m - rho.matrix().scale(c)).norm();
    Ok((resid <= PROPORTIONALITY_TOL * sigma.frobenius_norm()).then_some(c))
}

/// True iff `ρ` commutes with `σ` and is proportional to `Π_ρ σ`.
///
/// This is exactly the case in which the Rényi divergences do not depend on
/// the order.
pub fn alpha_independent(rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<bool> {
    Ok(proportionality_constant(rho, sigma)?.is_some())
}

/// Completely dephasing channel: keeps only the diagonal.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    rho.dephased_state()
}
