//! Coherence measures in the computational basis.
//!
//! Rényi relative entropies of coherence are `min_{σ ∈ I} S_α(ρ‖σ)` over
//! incoherent (diagonal) states. The Petz family has the closed form
//!
//! ```text
//! C_{r,α}(ρ) = 1/(α-1) ln ‖(ρ^α)^diag‖_{1/α}
//! ```
//!
//! while the sandwiched family is minimized numerically, except at `α = ∞`
//! where it equals the logarithmic robustness and is computed from the
//! diagonal-dominance semidefinite program.

use serde::Serialize;

use crate::divergence::{
    self, log_sum_exp, petz_renyi_diag, sandwiched_renyi_diag, OVERLAP_FLOOR, PETZ_INFINITY_GRID,
};
use crate::conditional::renyi_entropy;
use crate::error::{invalid, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{DensityMatrix, HermitianMatrix};
use crate::optimize::{min_diag_dominating, minimize_over_simplex_from, DiagDominating, OptimizerConfig};
use crate::probability::ProbabilityVector;
use crate::report::Estimate;

/// Values at or above `-NEG_CLAMP` are reported as 0.
pub const NEG_CLAMP: f64 = 1e-10;

fn clamp(v: f64) -> f64 {
    if (-NEG_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Diagonal of `ρ` as a distribution.
pub fn diag_part(rho: &DensityMatrix) -> ProbabilityVector {
    let d: Vec<f64> = rho.diagonal().into_iter().map(|x| x.max(0.0)).collect();
    let s: f64 = d.iter().sum();
    ProbabilityVector::from_trusted(d.into_iter().map(|x| x / s).collect())
}

fn diag_state(rho: &DensityMatrix) -> DensityMatrix {
    rho.dephased_state()
}

/// Relative entropy of coherence `S(ρ^diag) - S(ρ)`.
pub fn c_rel_entropy(rho: &DensityMatrix) -> f64 {
    let a = renyi_entropy(&diag_state(rho), 1.0).unwrap_or(0.0);
    let b = renyi_entropy(rho, 1.0).unwrap_or(0.0);
    clamp(a - b)
}

/// Petz Rényi relative entropy of coherence for `α ∈ [0, ∞]`.
///
/// `α = ∞` is the supremum over [`PETZ_INFINITY_GRID`].
pub fn c_renyi_petz(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(invalid("alpha must be nonnegative"));
    }
    Ok(clamp(if alpha.is_infinite() {
        PETZ_INFINITY_GRID.iter().map(|&a| petz_closed_form(rho, a)).fold(f64::MIN, f64::max)
    } else {
        petz_closed_form(rho, alpha)
    }))
}

pub fn c_renyi_petz_estimate(rho: &DensityMatrix, alpha: f64) -> Result<Estimate> {
    let v = c_renyi_petz(rho, alpha)?;
    Ok(if alpha.is_infinite() { Estimate::grid(v) } else { Estimate::closed(v) })
}

fn petz_closed_form(rho: &DensityMatrix, alpha: f64) -> f64 {
    if alpha == 1.0 {
        return c_rel_entropy(rho);
    }
    if alpha == 0.0 {
        let p = rho.support_projector().diagonal();
        return -p.iter().copied().fold(0.0, f64::max).ln();
    }
    let w = scaled_power_diagonal(rho, alpha);
    alpha / (alpha - 1.0) * (rho.eig().max_value().ln() + log_sum_exp(w.iter().map(|x| x.ln() / alpha)))
}

/// Diagonal of `(ρ/λ_max)^α` as `Σ_j (λ_j/λ_max)^α |U_ij|²`, where weights
/// below [`OVERLAP_FLOOR`] are rounding noise (powers `1/α` would inflate them).
fn power_diagonal(rho: &DensityMatrix, alpha: f64) -> Vec<f64> {
    let e = rho.eig();
    let top = e.max_value();
    let mask = e.support_mask();
    let n = rho.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| mask[j])
                .map(|j| {
                    let w = e.vectors[(i, j)].norm_sqr();
                    if w < OVERLAP_FLOOR {
                        0.0
                    } else {
                        w * (e.values[j] / top).powf(alpha)
                    }
                })
                .sum()
        })
        .collect()
}

fn scaled_power_diagonal(rho: &DensityMatrix, alpha: f64) -> Vec<f64> {
    power_diagonal(rho, alpha).into_iter().filter(|&x| x > 0.0).collect()
}

/// The diagonal state attaining the Petz minimum: `[(ρ^α)^diag]^{1/α}`, normalized.
pub fn petz_optimal_state(rho: &DensityMatrix, alpha: f64) -> Vec<f64> {
    let q: Vec<f64> = power_diagonal(rho, alpha).into_iter().map(|x| x.powf(1.0 / alpha)).collect();
    let s: f64 = q.iter().sum();
    q.into_iter().map(|x| x / s).collect()
}

/// Petz coherence by direct minimization over diagonal states (an oracle
/// for the closed form).
pub fn c_renyi_petz_optimized(rho: &DensityMatrix, alpha: f64, cfg: &OptimizerConfig) -> Result<Estimate> {
    let objective = |q: &[f64]| petz_renyi_diag(rho, q, alpha).unwrap_or(ExtReal::PosInf);
    let hints = vec![diag_part(rho).as_slice().to_vec()];
    let r = minimize_over_simplex_from(objective, rho.dim(), &hints, cfg)?;
    Ok(Estimate::optimized(clamp(r.value), r.converged, cfg))
}

/// Sandwiched Rényi relative entropy of coherence for `α >= 1/2`.
///
/// If the optimizer fails the upper bound `S̲_α(ρ‖ρ^diag)` is returned with
/// `converged = false`.
pub fn c_renyi_sandwiched(rho: &DensityMatrix, alpha: f64, cfg: &OptimizerConfig) -> Result<Estimate> {
    if alpha.is_nan() || alpha < 0.5 {
        return Err(invalid("sandwiched coherence needs alpha >= 1/2"));
    }
    if alpha.is_infinite() {
        let sdp = min_diag_dominating(rho);
        return Ok(Estimate::optimized(clamp(sdp.trace.ln()), sdp.gap() <= 1e-7, cfg));
    }
    if alpha == 1.0 {
        return Ok(Estimate::closed(c_rel_entropy(rho)));
    }
    let p = diag_part(rho);
    let upper = sandwiched_renyi_diag(rho, p.as_slice(), alpha)?.to_f64();
    let objective = |q: &[f64]| sandwiched_renyi_diag(rho, q, alpha).unwrap_or(ExtReal::PosInf);
    let mut hints = vec![p.as_slice().to_vec()];
    if alpha > 0.5 {
        // the Petz minimizer at order 2 - 1/α is exact for pure states
        hints.push(petz_optimal_state(rho, 2.0 - 1.0 / alpha));
    }
    match minimize_over_simplex_from(objective, rho.dim(), &hints, cfg) {
        Ok(r) if r.value <= upper => Ok(Estimate::optimized(clamp(r.value), r.converged, cfg)),
        _ => Ok(Estimate::optimized(clamp(upper), false, cfg)),
    }
}

/// `Σ_{j≠k} |ρ_jk|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                s += m[(j, k)].norm();
            }
        }
    }
    s
}

/// `ln(1 + C_l1)`.
pub fn c_l1_log(rho: &DensityMatrix) -> f64 {
    c_l1(rho).ln_1p()
}

/// Solution of `min{tr D : D diagonal, D >= ρ}` with its dual certificate.
pub fn robustness_certificate(rho: &DensityMatrix) -> DiagDominating {
    min_diag_dominating(rho)
}

/// Robustness of coherence `C_R = min tr D - 1`.
pub fn robustness_of_coherence(rho: &DensityMatrix) -> f64 {
    clamp(min_diag_dominating(rho).trace - 1.0)
}

/// Logarithmic robustness `ln(1 + C_R)`.
pub fn c_log_robustness(rho: &DensityMatrix) -> f64 {
    clamp(min_diag_dominating(rho).trace.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricCoherence {
    /// `-ln max_{σ ∈ I} F(ρ, σ)`.
    pub log: Estimate,
    /// `1 - max_{σ ∈ I} F(ρ, σ)`.
    pub linear: f64,
}

pub fn geometric_coherence(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<GeometricCoherence> {
    let log = c_renyi_sandwiched(rho, 0.5, cfg)?;
    Ok(GeometricCoherence { log, linear: clamp(-(-log.value).exp_m1()) })
}

/// The constant `c` with `Π_ρ ρ^diag = cρ`, when `ρ` also commutes with `ρ^diag`.
pub fn proportionality_constant(rho: &DensityMatrix) -> Result<Option<f64>> {
    divergence::proportionality_constant(rho, diag_state(rho).as_hermitian())
}

/// True iff every Rényi coherence of `ρ` takes the same value, namely
/// `-ln c` with `c` from [`proportionality_constant`].
pub fn alpha_independent(rho: &DensityMatrix) -> Result<bool> {
    Ok(proportionality_constant(rho)?.is_some())
}

/// One inequality `lower <= upper` between two computed quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub alpha: Option<ExtReal>,
    pub lower: f64,
    pub upper: f64,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        if self.lower == self.upper {
            0.0
        } else {
            self.upper - self.lower
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSuite {
    pub checks: Vec<BoundCheck>,
}

impl BoundSuite {
    pub fn worst_slack(&self) -> f64 {
        self.checks.iter().map(BoundCheck::slack).fold(f64::INFINITY, f64::min)
    }

    pub fn all_hold(&self, tol: f64) -> bool {
        self.worst_slack() >= -tol
    }

    pub fn get(&self, name: &str, alpha: Option<f64>) -> Option<&BoundCheck> {
        let a = alpha.map(ExtReal::from_f64);
        self.checks.iter().find(|c| c.name == name && c.alpha == a)
    }
}

/// Evaluates every upper and lower bound on the coherence measures of `ρ`
/// at the orders in `grid`.
pub fn coherence_bound_suite(
    rho: &DensityMatrix,
    grid: &divergence::AlphaGrid,
    cfg: &OptimizerConfig,
) -> Result<BoundSuite> {
    let d = rho.dim() as f64;
    let diag = diag_state(rho);
    let dh: &HermitianMatrix = diag.as_hermitian();
    let mut checks = Vec::new();
    let mut push = |name, alpha: Option<f64>, lower: f64, upper: f64| {
        checks.push(BoundCheck { name, alpha: alpha.map(ExtReal::from_f64), lower, upper })
    };

    let cl1 = c_l1(rho);
    let cl = c_l1_log(rho);
    let sdp = min_diag_dominating(rho);
    let cr_rob = clamp(sdp.trace - 1.0);
    let clr = clamp(sdp.trace.ln());
    let cr = c_rel_entropy(rho);

    push("robustness-above-l1-over-d-minus-1", None, if d > 1.0 { cl1 / (d - 1.0) } else { 0.0 }, cr_rob);
    push("robustness-below-l1", None, cr_rob, cl1);
    push("log-robustness-below-log-l1", None, clr, cl);
    push("log-robustness-above-petz-order-2", None, c_renyi_petz(rho, 2.0)?, clr);
    push("log-robustness-below-half-entropy-of-diagonal", None, clr, renyi_entropy(&diag, 0.5)?);
    push(
        "log-robustness-above-collision-divergence",
        None,
        divergence::sandwiched_renyi(rho, dh, 2.0)?.to_f64(),
        clr,
    );
    push(
        "log-robustness-below-max-divergence",
        None,
        clr,
        divergence::max_relative_entropy(rho, dh)?.to_f64(),
    );
    push("relative-entropy-below-log-robustness", None, cr, clr);

    let geo = geometric_coherence(rho, cfg)?;
    push("geometric-below-min-entropy-of-diagonal", None, geo.log.value, -diag_part(rho).max().ln());
    push("geometric-above-petz-order-0", None, c_renyi_petz(rho, 0.0)?, geo.log.value);

    for alpha in grid.iter() {
        let a = Some(alpha);
        let petz = c_renyi_petz(rho, alpha)?;
        if alpha <= 2.0 {
            let s = if alpha == 0.0 { f64::INFINITY } else { 1.0 / alpha };
            push("petz-below-renyi-entropy-of-diagonal", a, petz, renyi_entropy(&diag, s)?);
            push("petz-below-log-robustness", a, petz, clr);
        }
        if (0.5..=2.0).contains(&alpha) {
            let low = divergence::petz_renyi(rho, dh, 2.0 - 1.0 / alpha)?.to_f64();
            let up = divergence::petz_renyi(rho, dh, alpha)?.to_f64();
            push("petz-above-divergence-to-diagonal-at-2-minus-inverse", a, low, petz);
            push("petz-below-divergence-to-diagonal", a, petz, up);
        }
        if alpha >= 0.5 {
            let sand = c_renyi_sandwiched(rho, alpha, cfg)?.value;
            let s = if alpha == 0.5 {
                f64::INFINITY
            } else if alpha.is_infinite() {
                0.5
            } else {
                alpha / (2.0 * alpha - 1.0)
            };
            let inv = if alpha.is_infinite() { 2.0 } else { 2.0 - 1.0 / alpha };
            push("sandwiched-below-renyi-entropy-of-diagonal", a, sand, renyi_entropy(&diag, s)?);
            push("sandwiched-below-log-robustness", a, sand, clr);
            push("sandwiched-below-petz", a, sand, petz);
            push("sandwiched-above-petz-at-2-minus-inverse", a, c_renyi_petz(rho, inv)?, sand);
            push("sandwiched-below-divergence-to-diagonal", a, sand, divergence::sandwiched_renyi(rho, dh, alpha)?.to_f64());
            if alpha > 0.5 {
                let low = divergence::sandwiched_renyi(rho, dh, inv)?.to_f64();
                push("sandwiched-above-divergence-to-diagonal-at-2-minus-inverse", a, low, sand);
            }
        }
    }
    Ok(BoundSuite { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, C64};
    use approx::assert_abs_diff_eq;

    fn theta_state(deg: f64) -> DensityMatrix {
        let t = deg.to_radians();
        DensityMatrix::pure_real(&[t.cos(), t.sin()]).unwrap()
    }

    fn mixed3() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.05),
                C64::new(0.0, -0.1),
                C64::new(0.1, -0.05),
                C64::new(0.3, 0.0),
                C64::new(0.05, 0.0),
                C64::new(0.0, 0.1),
                C64::new(0.05, 0.0),
                C64::new(0.2, 0.0),
            ],
        ))
        .unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn diag_part_examples() {
        assert_eq!(diag_part(&DensityMatrix::maximally_coherent(2)).as_slice(), &[0.5, 0.5]);
        let p = diag_part(&theta_state(30.0));
        assert_abs_diff_eq!(p.as_slice()[0], 0.75, epsilon = 1e-14);
    }

    #[test]
    fn incoherent_states_have_no_coherence() {
        let r = DensityMatrix::diagonal_state(&[0.2, 0.5, 0.3]).unwrap();
        let cfg = OptimizerConfig::default();
        assert_eq!(c_rel_entropy(&r), 0.0);
        assert_eq!(c_l1(&r), 0.0);
        assert_abs_diff_eq!(robustness_of_coherence(&r), 0.0, epsilon = 1e-12);
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert_abs_diff_eq!(c_renyi_petz(&r, a).unwrap(), 0.0, epsilon = 1e-12);
            if a >= 0.5 {
                assert_abs_diff_eq!(c_renyi_sandwiched(&r, a, &cfg).unwrap().value, 0.0, epsilon = 1e-8);
            }
        }
        assert_abs_diff_eq!(geometric_coherence(&r, &cfg).unwrap().linear, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn maximally_coherent_values() {
        for d in 2..5 {
            let r = DensityMatrix::maximally_coherent(d);
            let ln_d = (d as f64).ln();
            assert_abs_diff_eq!(c_rel_entropy(&r), ln_d, epsilon = 1e-10);
            assert_abs_diff_eq!(c_l1(&r), d as f64 - 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c_log_robustness(&r), ln_d, epsilon = 1e-9);
            assert!(alpha_independent(&r).unwrap());
        }
    }

    #[test]
    fn qubit_family() {
        for deg in [5.0, 20.0, 30.0, 45.0, 70.0] {
            let r = theta_state(deg);
            let t = (2.0 * deg).to_radians();
            assert_abs_diff_eq!(c_l1_log(&r), t.sin().ln_1p(), epsilon = 1e-12);
            assert_abs_diff_eq!(c_log_robustness(&r), t.sin().ln_1p(), epsilon = 1e-9);
            let c = deg.to_radians().cos().powi(2);
            assert_abs_diff_eq!(c_rel_entropy(&r), binary_entropy(c), epsilon = 1e-10);
        }
        assert!(!alpha_independent(&theta_state(22.5)).unwrap());
    }

    #[test]
    fn pure_state_formulas() {
        let psi = [0.6, 0.0, 0.8 * 0.6, 0.8 * 0.8];
        let r = DensityMatrix::pure_real(&psi).unwrap();
        let p: Vec<f64> = psi.iter().map(|a| a * a).collect();
        let cfg = OptimizerConfig::default();
        for alpha in [0.3f64, 0.7, 1.5, 2.0, 4.0] {
            let expect = alpha / (alpha - 1.0) * p.iter().map(|x| x.powf(1.0 / alpha)).sum::<f64>().ln();
            assert_abs_diff_eq!(c_renyi_petz(&r, alpha).unwrap(), expect, epsilon = 1e-10);
        }
        for alpha in [0.8f64, 2.0, 5.0] {
            let e = alpha / (2.0 * alpha - 1.0);
            let expect = (2.0 * alpha - 1.0) / (alpha - 1.0) * p.iter().map(|x| x.powf(e)).sum::<f64>().ln();
            let got = c_renyi_sandwiched(&r, alpha, &cfg).unwrap();
            assert_abs_diff_eq!(got.value, expect, epsilon = 1e-6);
        }
        let pmax = p.iter().copied().fold(0.0, f64::max);
        assert_abs_diff_eq!(c_renyi_petz(&r, 0.0).unwrap(), -pmax.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(geometric_coherence(&r, &cfg).unwrap().log.value, -pmax.ln(), epsilon = 1e-7);
        let trsqrt: f64 = p.iter().map(|x| x.sqrt()).sum();
        assert_abs_diff_eq!(c_log_robustness(&r), 2.0 * trsqrt.ln(), epsilon = 1e-8);
    }

    #[test]
    fn closed_form_special_orders() {
        let r = mixed3();
        let m = r.matrix();
        let s: f64 = (0..3).map(|j| (0..3).map(|k| m[(j, k)].norm_sqr()).sum::<f64>().sqrt()).sum();
        assert_abs_diff_eq!(c_renyi_petz(&r, 2.0).unwrap(), 2.0 * s.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(c_renyi_petz(&r, 1.0 + 1e-6).unwrap(), c_rel_entropy(&r), epsilon = 1e-5);
    }

    #[test]
    fn closed_form_matches_minimization() {
        let r = mixed3();
        let cfg = OptimizerConfig::default();
        for alpha in [0.3, 0.7, 1.5, 2.0] {
            let closed = c_renyi_petz(&r, alpha).unwrap();
            let opt = c_renyi_petz_optimized(&r, alpha, &cfg).unwrap().value;
            assert_abs_diff_eq!(closed, opt, epsilon = 1e-7);
        }
    }

    #[test]
    fn direct_sum_of_coherent_blocks() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = DensityMatrix::pure_real(&[s, s, 0.0, 0.0]).unwrap();
        let b = DensityMatrix::pure_real(&[0.0, 0.0, s, s]).unwrap();
        let m = a.matrix() * C64::new(0.3, 0.0) + b.matrix() * C64::new(0.7, 0.0);
        let r = DensityMatrix::new(m).unwrap();
        let c = proportionality_constant(&r).unwrap().unwrap();
        assert_abs_diff_eq!(c, 0.5, epsilon = 1e-12);
        for alpha in [0.0, 0.5, 2.0, 5.0] {
            assert_abs_diff_eq!(c_renyi_petz(&r, alpha).unwrap(), 2f64.ln(), epsilon = 1e-9);
        }
        assert_abs_diff_eq!(c_log_robustness(&r), 2f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn bound_suite_on_mixed_and_pure() {
        let grid = divergence::AlphaGrid::standard();
        let cfg = OptimizerConfig::default();
        let suite = coherence_bound_suite(&mixed3(), &grid, &cfg).unwrap();
        assert!(suite.all_hold(1e-8), "{:#?}", suite.checks.iter().filter(|c| c.slack() < -1e-8).collect::<Vec<_>>());
        let pure = DensityMatrix::pure_real(&[0.6, 0.48, 0.64]).unwrap();
        let suite = coherence_bound_suite(&pure, &grid, &cfg).unwrap();
        assert!(suite.all_hold(1e-8));
        for a in [0.25, 0.5, 2.0] {
            assert!(suite.get("petz-below-renyi-entropy-of-diagonal", Some(a)).unwrap().slack() < 1e-9);
        }
        for a in [0.75, 2.0, 5.0] {
            assert!(suite.get("sandwiched-above-petz-at-2-minus-inverse", Some(a)).unwrap().slack() < 1e-6);
        }
    }
}
