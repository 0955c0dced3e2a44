//! Exact coherence distillation: majorization, the one-shot length and the
//! asymptotic rate for pure states, and Rényi upper bounds on the rate.

use serde::Serialize;

use crate::coherence;
use crate::divergence::AlphaGrid;
use crate::error::{invalid, Error, Result};
use crate::linalg::DensityMatrix;
use crate::optimize::OptimizerConfig;
use crate::probability::ProbabilityVector;

/// Largest `λ_2` accepted as pure.
pub const PURITY_TOL: f64 = 1e-9;

/// Relative slack on `1/p_max` before flooring, so that `p_max = 1/L` computed
/// with rounding error still gives length `L`.
const FLOOR_TOL: f64 = 1e-9;

/// Whether `x` majorizes `y`, zero-padding the shorter vector.
pub fn majorizes(x: &ProbabilityVector, y: &ProbabilityVector) -> bool {
    let n = x.len().max(y.len());
    let mut a = x.sorted_desc();
    let mut b = y.sorted_desc();
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    let (mut sa, mut sb) = (0.0, 0.0);
    for (u, v) in a.iter().zip(&b) {
        sa += u;
        sb += v;
        if sa < sb - 1e-12 {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateBound {
    pub name: String,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistillReport {
    pub p_max: f64,
    pub length: u64,
    pub rate_nats: f64,
    pub bounds: Vec<RateBound>,
}

/// One-shot length `⌊1/p_max⌋` and rate `-ln p_max` of a pure state, with
/// the closed-form Petz bounds over the standard grid.
pub fn exact_distill_pure(rho: &DensityMatrix) -> Result<DistillReport> {
    let lam2 = rho.second_eigenvalue();
    if lam2 > PURITY_TOL {
        return Err(Error::NotPure(lam2));
    }
    let p_max = coherence::diag_part(rho).max();
    let length = ((1.0 + FLOOR_TOL) / p_max).floor().max(1.0) as u64;
    let mut bounds = Vec::new();
    for a in std::iter::once(0.0).chain(AlphaGrid::standard().restricted(0.0, 2.0)) {
        bounds.push(petz_bound(rho, a)?);
    }
    Ok(DistillReport { p_max, length, rate_nats: -p_max.ln(), bounds })
}

fn petz_bound(rho: &DensityMatrix, alpha: f64) -> Result<RateBound> {
    Ok(RateBound { name: "petz".into(), alpha, value: coherence::c_renyi_petz(rho, alpha)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateBounds {
    pub bounds: Vec<RateBound>,
    /// Index of the smallest bound.
    pub best: usize,
}

impl RateBounds {
    pub fn best(&self) -> &RateBound {
        &self.bounds[self.best]
    }
}

/// Petz bounds for `α ∈ grid ∩ [0, 2]`, always including `α = 0`, and
/// sandwiched bounds for `α ∈ grid ∩ [1/2, ∞]`.
pub fn distill_rate_bounds(rho: &DensityMatrix, grid: &AlphaGrid, cfg: &OptimizerConfig) -> Result<RateBounds> {
    let mut bounds = Vec::new();
    if grid.iter().next() != Some(0.0) {
        bounds.push(petz_bound(rho, 0.0)?);
    }
    for a in grid.iter().filter(|a| (0.0..=2.0).contains(a)) {
        bounds.push(petz_bound(rho, a)?);
    }
    for a in grid.iter().filter(|&a| a >= 0.5) {
        let est = coherence::c_renyi_sandwiched(rho, a, cfg)?;
        bounds.push(RateBound { name: "sandwiched".into(), alpha: a, value: est.value });
    }
    let best = (0..bounds.len())
        .min_by(|&i, &j| bounds[i].value.total_cmp(&bounds[j].value))
        .ok_or_else(|| invalid("no bounds"))?;
    Ok(RateBounds { bounds, best })
}

/// Necessary condition for the rate to reach the relative entropy of
/// coherence: `ρ` commutes with its diagonal and is proportional to
/// `Π_ρ ρ^diag`.
pub fn rate_equals_distillable_condition(rho: &DensityMatrix) -> Result<bool> {
    coherence::alpha_independent(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])));
        assert!(!majorizes(&pv(&[0.5, 0.5]), &pv(&[0.7, 0.3])));
        assert!(majorizes(&pv(&[0.2, 0.5, 0.3]), &ProbabilityVector::uniform(3)));
        assert!(majorizes(&pv(&[0.6, 0.4]), &pv(&[0.4, 0.3, 0.3])));
    }

    #[test]
    fn pure_examples() {
        let r = exact_distill_pure(&DensityMatrix::maximally_coherent(2)).unwrap();
        assert_eq!(r.length, 2);
        assert_abs_diff_eq!(r.rate_nats, std::f64::consts::LN_2, epsilon = 1e-12);

        let amps: Vec<f64> = [0.4f64, 0.3, 0.3].iter().map(|p| p.sqrt()).collect();
        let rho = DensityMatrix::pure_real(&amps).unwrap();
        let r = exact_distill_pure(&rho).unwrap();
        assert_eq!(r.length, 2);
        assert_abs_diff_eq!(r.rate_nats, -(0.4f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.rate_nats, coherence::c_renyi_petz(&rho, 0.0).unwrap(), epsilon = 1e-9);

        let r = exact_distill_pure(&DensityMatrix::pure_real(&[0.0, 1.0]).unwrap()).unwrap();
        assert_eq!((r.length, r.rate_nats), (1, 0.0));

        for l in 3..=7 {
            let r = exact_distill_pure(&DensityMatrix::maximally_coherent(l)).unwrap();
            assert_eq!(r.length, l as u64);
        }

        assert!(matches!(exact_distill_pure(&DensityMatrix::maximally_mixed(2)), Err(Error::NotPure(_))));
    }

    #[test]
    fn pure_bound_is_saturated() {
        let rho = DensityMatrix::pure_real(&[0.8, 0.36f64.sqrt()]).unwrap();
        let b = distill_rate_bounds(&rho, &AlphaGrid::standard(), &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(b.best().value, -(0.64f64).ln(), epsilon = 1e-9);
        assert_eq!(b.best().alpha, 0.0);
        let b = distill_rate_bounds(&DensityMatrix::maximally_mixed(3), &AlphaGrid::standard(), &OptimizerConfig::default())
            .unwrap();
        for x in &b.bounds {
            assert!(x.value.abs() < 1e-9, "{x:?}");
        }
    }

    #[test]
    fn equality_condition_examples() {
        assert!(rate_equals_distillable_condition(&DensityMatrix::maximally_coherent(2)).unwrap());
        assert!(rate_equals_distillable_condition(&DensityMatrix::maximally_mixed(2)).unwrap());
        let t = std::f64::consts::PI / 8.0;
        let rho = DensityMatrix::pure_real(&[t.cos(), t.sin()]).unwrap();
        assert!(!rate_equals_distillable_condition(&rho).unwrap());
    }
}
