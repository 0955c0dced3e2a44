//! Rényi conditional entropies `H(A|B)` of a bipartite state.
//!
//! ```text
//! down:  H_α^↓(A|B) = -S_α(ρ_AB ‖ I_A ⊗ ρ_B)
//! up:    H_α^↑(A|B) = max_σ -S_α(ρ_AB ‖ I_A ⊗ σ_B)
//! ```
//!
//! for both the Petz and the sandwiched divergence. The Petz `up` entropy has
//! the closed form `α/(1-α) ln tr[(tr_A ρ^α)^{1/α}]`; the sandwiched `up`
//! entropy is found numerically over `σ_B`.

use std::fmt;
use std::str::FromStr;

use crate::divergence::{log_sum_exp, petz_renyi, sandwiched_renyi, PETZ_INFINITY_GRID};
use crate::error::{invalid, Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{eigvalsh, eigvalsh_jacobi, reduce, symmetrize, BipartiteState, CMatrix, DensityMatrix, HermitianMatrix, Subsystem};
use crate::optimize::{minimize_over_density_from, OptimizerConfig};
use crate::report::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Petz,
    Sandwiched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// `σ_B = ρ_B`.
    Down,
    /// Optimized over `σ_B`.
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CondEntropyKind {
    pub family: Family,
    pub arrow: Arrow,
}

impl CondEntropyKind {
    pub const PETZ_DOWN: Self = Self { family: Family::Petz, arrow: Arrow::Down };
    pub const PETZ_UP: Self = Self { family: Family::Petz, arrow: Arrow::Up };
    pub const SANDWICHED_DOWN: Self = Self { family: Family::Sandwiched, arrow: Arrow::Down };
    pub const SANDWICHED_UP: Self = Self { family: Family::Sandwiched, arrow: Arrow::Up };

    pub const ALL: [Self; 4] = [Self::PETZ_DOWN, Self::PETZ_UP, Self::SANDWICHED_DOWN, Self::SANDWICHED_UP];

    /// Smallest admissible order.
    pub fn min_alpha(self) -> f64 {
        match (self.family, self.arrow) {
            (Family::Petz, _) => 0.0,
            (Family::Sandwiched, Arrow::Down) => f64::MIN_POSITIVE,
            (Family::Sandwiched, Arrow::Up) => 0.5,
        }
    }

    pub fn short_name(self) -> &'static str {
        match (self.family, self.arrow) {
            (Family::Petz, Arrow::Down) => "pd",
            (Family::Petz, Arrow::Up) => "pu",
            (Family::Sandwiched, Arrow::Down) => "sd",
            (Family::Sandwiched, Arrow::Up) => "su",
        }
    }
}

impl fmt::Display for CondEntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for CondEntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.short_name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown conditional entropy kind {s:?}")))
    }
}

/// Rényi entropy `1/(1-α) ln tr ρ^α`, with the von Neumann, `ln rank` and
/// `-ln λ_max` limits at `α = 1, 0, ∞`.
pub fn renyi_entropy(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(invalid("alpha must be nonnegative"));
    }
    let e = rho.eig();
    let mask = e.support_mask();
    let lambda: Vec<f64> = e.values.iter().zip(&mask).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
    Ok(if alpha == 0.0 {
        (lambda.len() as f64).ln()
    } else if alpha == 1.0 {
        -lambda.iter().map(|l| l * l.ln()).sum::<f64>()
    } else if alpha.is_infinite() {
        -e.max_value().ln()
    } else {
        log_sum_exp(lambda.iter().map(|l| alpha * l.ln())) / (1.0 - alpha)
    })
}

/// `S(ρ_AB) - S(ρ_B)`.
pub fn conditional_von_neumann(state: &BipartiteState) -> f64 {
    let b = state.partial_trace(Subsystem::A);
    renyi_entropy(state.state(), 1.0).unwrap_or(0.0) - renyi_entropy(&b, 1.0).unwrap_or(0.0)
}

fn identity_times(sigma_b: &HermitianMatrix, dim_a: usize) -> HermitianMatrix {
    HermitianMatrix::identity(dim_a).kron(sigma_b)
}

/// Conditional entropy with the default optimizer settings.
pub fn cond_entropy(state: &BipartiteState, alpha: f64, kind: CondEntropyKind) -> Result<f64> {
    cond_entropy_with(state, alpha, kind, &OptimizerConfig::default()).map(|e| e.value)
}

pub fn cond_entropy_with(
    state: &BipartiteState,
    alpha: f64,
    kind: CondEntropyKind,
    cfg: &OptimizerConfig,
) -> Result<Estimate> {
    if alpha.is_nan() || alpha < kind.min_alpha() {
        return Err(invalid(format!("alpha = {alpha} outside the range of conditional entropy {kind}")));
    }
    if alpha == 1.0 {
        return Ok(Estimate::closed(conditional_von_neumann(state)));
    }
    let rho = state.state();
    match (kind.family, kind.arrow) {
        (Family::Petz, Arrow::Down) => {
            let sigma = identity_times(state.partial_trace(Subsystem::A).as_hermitian(), state.dim_a());
            let v = petz_renyi(rho, &sigma, alpha)?;
            let est = if alpha.is_infinite() { Estimate::grid } else { Estimate::closed };
            Ok(est(-finite(v)?))
        }
        (Family::Sandwiched, Arrow::Down) => {
            let sigma = identity_times(state.partial_trace(Subsystem::A).as_hermitian(), state.dim_a());
            Ok(Estimate::closed(-finite(sandwiched_renyi(rho, &sigma, alpha)?)?))
        }
        (Family::Petz, Arrow::Up) => Ok(petz_up(state, alpha)),
        (Family::Sandwiched, Arrow::Up) => sandwiched_up(state, alpha, cfg),
    }
}

fn finite(v: ExtReal) -> Result<f64> {
    v.finite().ok_or(Error::SupportViolation)
}

/// Petz up-entropy from its closed form.
pub fn petz_up(state: &BipartiteState, alpha: f64) -> Estimate {
    if alpha.is_infinite() {
        let v = PETZ_INFINITY_GRID.iter().map(|&a| petz_up_finite(state, a)).fold(f64::INFINITY, f64::min);
        return Estimate::grid(v);
    }
    if alpha == 1.0 {
        return Estimate::closed(conditional_von_neumann(state));
    }
    Estimate::closed(petz_up_finite(state, alpha))
}

fn petz_up_finite(state: &BipartiteState, alpha: f64) -> f64 {
    let dims = [state.dim_a(), state.dim_b()];
    let e = state.state().eig();
    if alpha == 0.0 {
        let proj = state.state().support_projector();
        let m = symmetrize(&reduce(proj.matrix(), &dims, &[1]));
        return eigvalsh(&m).last().copied().unwrap_or(0.0).ln();
    }
    // scale by λ_max so that large orders stay representable
    let top = e.max_value();
    let t = e.threshold();
    // tr_A ρ^α has the support of ρ_B. Building it entrywise in the ρ_B
    // eigenbasis keeps tiny eigenvalues accurate relative to their size, which
    // matters because they enter through the power 1/α.
    let b = state.partial_trace(Subsystem::A);
    let eb = b.eig();
    let keep: Vec<usize> = (0..eb.dim()).filter(|&i| eb.support_mask()[i]).collect();
    let v = CMatrix::from_fn(eb.dim(), keep.len(), |r, c| eb.vectors[(r, keep[c])]);
    let (da, db) = (dims[0], dims[1]);
    let r = keep.len();
    let mut m = CMatrix::zeros(r, r);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= t {
            continue;
        }
        let w = (lam / top).powf(alpha);
        let u = e.vectors.column(k);
        let blocks = CMatrix::from_fn(db, da, |j, a| u[a * db + j]);
        let proj = v.adjoint() * blocks;
        m += (&proj * proj.adjoint()).scale(w);
    }
    let mu = eigvalsh_jacobi(&symmetrize(&m));
    let log_trace = top.ln() + log_sum_exp(mu.iter().filter(|&&x| x > 0.0).map(|x| x.ln() / alpha));
    alpha / (1.0 - alpha) * log_trace
}

/// `S̲_α(ρ_AB ‖ I_A ⊗ σ_B)` for a PSD `σ_B`, reusing the small eigenproblem.
pub(crate) fn sandwiched_vs_identity_times(
    rho: &DensityMatrix,
    dim_a: usize,
    sigma_b: &HermitianMatrix,
    alpha: f64,
) -> ExtReal {
    let e = sigma_b.eig();
    let top = e.max_value();
    if !(top > 0.0) || e.min_value() < -crate::linalg::support_threshold(top) {
        return ExtReal::PosInf;
    }
    if alpha > 1.0 {
        let off = HermitianMatrix::identity(dim_a).kron(&sigma_b.support_projector());
        let leak = 1.0 - (off.matrix() * rho.matrix()).trace().re;
        if leak > 1e-9 {
            return ExtReal::PosInf;
        }
    }
    let gamma = if alpha.is_infinite() { -0.5 } else { (1.0 - alpha) / (2.0 * alpha) };
    let p = HermitianMatrix::identity(dim_a).kron(&sigma_b.power_on_support(gamma));
    let x: CMatrix = symmetrize(&(p.matrix() * rho.matrix() * p.matrix()));
    let eigs = eigvalsh(&x);
    let xmax = eigs.last().copied().unwrap_or(0.0);
    if !(xmax > 0.0) {
        return ExtReal::PosInf;
    }
    if alpha.is_infinite() {
        return ExtReal::Finite(xmax.ln());
    }
    let t = crate::linalg::support_threshold(xmax);
    let lt = log_sum_exp(eigs.iter().filter(|&&v| v > t).map(|v| alpha * v.ln()));
    ExtReal::Finite(lt / (alpha - 1.0))
}

fn sandwiched_up(state: &BipartiteState, alpha: f64, cfg: &OptimizerConfig) -> Result<Estimate> {
    let rho = state.state();
    let dim_a = state.dim_a();
    let rho_b = state.partial_trace(Subsystem::A);
    let objective = |s: &HermitianMatrix| sandwiched_vs_identity_times(rho, dim_a, s, alpha);
    let r = minimize_over_density_from(objective, state.dim_b(), &[rho_b.matrix().clone()], cfg)?;
    Ok(Estimate::optimized(-r.value, r.converged, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use approx::assert_abs_diff_eq;

    fn bell() -> BipartiteState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        BipartiteState::new(DensityMatrix::pure_real(&[s, 0.0, 0.0, s]).unwrap(), 2, 2).unwrap()
    }

    fn qubit(p: f64, re: f64, im: f64) -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(p, 0.0), C64::new(re, -im), C64::new(re, im), C64::new(1.0 - p, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(3);
        let pure = DensityMatrix::pure_real(&[0.6, 0.8]).unwrap();
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert_abs_diff_eq!(renyi_entropy(&mixed, a).unwrap(), 3f64.ln(), epsilon = 1e-12);
            assert_abs_diff_eq!(renyi_entropy(&pure, a).unwrap(), 0.0, epsilon = 1e-12);
        }
        let r = DensityMatrix::diagonal_state(&[0.5, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(renyi_entropy(&r, 2.0).unwrap(), -(0.375f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn product_states_collapse() {
        let a = qubit(0.7, 0.1, 0.2);
        let b = qubit(0.4, -0.2, 0.05);
        let ab = BipartiteState::product(&a, &b);
        for alpha in [0.5, 0.8, 1.0, 1.5, 3.0] {
            let expect = renyi_entropy(&a, alpha).unwrap();
            for k in CondEntropyKind::ALL {
                let v = cond_entropy(&ab, alpha, k).unwrap();
                let tol = if k == CondEntropyKind::SANDWICHED_UP { 1e-6 } else { 1e-9 };
                assert_abs_diff_eq!(v, expect, epsilon = tol);
            }
        }
    }

    #[test]
    fn maximally_entangled_petz_up() {
        for a in [0.0, 0.3, 1.0, 2.0, 7.0] {
            assert_abs_diff_eq!(petz_up(&bell(), a).value, -(2f64.ln()), epsilon = 1e-10);
        }
    }

    #[test]
    fn min_entropy_of_classical_quantum_state() {
        // guessing a classical bit from quantum side information
        let (p0, p1) = (0.6, 0.4);
        let r0 = DensityMatrix::pure_real(&[1.0, 0.0]).unwrap();
        let t = 0.4f64;
        let r1 = DensityMatrix::pure_real(&[t.cos(), t.sin()]).unwrap();
        let mut m = CMatrix::zeros(4, 4);
        for (i, (p, r)) in [(p0, &r0), (p1, &r1)].into_iter().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    m[(2 * i + j, 2 * i + k)] = r.matrix()[(j, k)] * p;
                }
            }
        }
        let cq = BipartiteState::new(DensityMatrix::new(m).unwrap(), 2, 2).unwrap();
        let diff = r0.matrix() * C64::new(p0, 0.0) - r1.matrix() * C64::new(p1, 0.0);
        let trace_norm: f64 = eigvalsh(&diff).iter().map(|v| v.abs()).sum();
        let guess = 0.5 * (1.0 + trace_norm);
        let h = cond_entropy(&cq, f64::INFINITY, CondEntropyKind::SANDWICHED_UP).unwrap();
        assert_abs_diff_eq!(h, -guess.ln(), epsilon = 1e-6);
    }

    #[test]
    fn range_checks() {
        assert!(cond_entropy(&bell(), 0.3, CondEntropyKind::SANDWICHED_UP).is_err());
        assert!(cond_entropy(&bell(), 0.0, CondEntropyKind::SANDWICHED_DOWN).is_err());
        assert!("zz".parse::<CondEntropyKind>().is_err());
        assert_eq!("su".parse::<CondEntropyKind>().unwrap(), CondEntropyKind::SANDWICHED_UP);
    }
}
