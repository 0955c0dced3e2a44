//! Maximally correlated states and entanglement measures computed through
//! their coherence counterparts.
//!
//! The generalized CNOT maps `ρ ⊗ |0⟩⟨0|` to `ρ_MC = Σ_jk ρ_jk |jj⟩⟨kk|`. For
//! such states every Rényi relative entropy of entanglement equals the
//! matching coherence measure of `ρ` and minus the matching `up` conditional
//! entropy of `ρ_MC`. Measures are computed on the coherence side; the
//! conditional entropy is evaluated as a cross-check and its residual reported.

use std::fmt;
use std::str::FromStr;

use nalgebra::SVD;

use crate::coherence;
use crate::conditional::{cond_entropy_with, conditional_von_neumann, CondEntropyKind};
use crate::error::{invalid, Error, Result};
use crate::linalg::{eigvalsh, symmetrize, BipartiteState, CMatrix, DensityMatrix, HermitianMatrix, Subsystem, C64};
use crate::optimize::OptimizerConfig;
use crate::report::Estimate;

/// `|jk⟩ ↦ |j, j+k mod d_A⟩` for `k < d_A`, identity on `k >= d_A`.
pub fn cnot_unitary(dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    if dim_a == 0 || dim_b < dim_a {
        return Err(invalid(format!("generalized CNOT needs 1 <= d_A <= d_B, got {dim_a} x {dim_b}")));
    }
    let n = dim_a * dim_b;
    let mut u = CMatrix::zeros(n, n);
    for j in 0..dim_a {
        for k in 0..dim_b {
            let target = if k < dim_a { (j + k) % dim_a } else { k };
            u[(j * dim_b + target, j * dim_b + k)] = C64::new(1.0, 0.0);
        }
    }
    Ok(u)
}

#[derive(Debug, Clone)]
pub struct MaximallyCorrelated {
    base: DensityMatrix,
    embedded: BipartiteState,
}

/// `Σ_jk ρ_jk |jj⟩⟨kk|` on `d × d`.
pub fn make_mc(rho: &DensityMatrix) -> MaximallyCorrelated {
    let d = rho.dim();
    let mut m = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] = rho.matrix()[(j, k)];
        }
    }
    let embedded = BipartiteState::new(DensityMatrix::from_trusted(m), d, d).expect("square dimensions");
    MaximallyCorrelated { base: rho.clone(), embedded }
}

/// Entries allowed off the `|jj⟩⟨kk|` pattern.
const PATTERN_TOL: f64 = 1e-10;

impl MaximallyCorrelated {
    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn embedded(&self) -> &BipartiteState {
        &self.embedded
    }

    /// Recognizes a state of the form `Σ_jk ρ_jk |jj⟩⟨kk|`.
    pub fn detect(state: &BipartiteState) -> Option<Self> {
        let d = state.dim_a();
        if state.dim_b() != d {
            return None;
        }
        let m = state.state().matrix();
        let n = d * d;
        for r in 0..n {
            for c in 0..n {
                let on_pattern = r % (d + 1) == 0 && c % (d + 1) == 0;
                if !on_pattern && m[(r, c)].norm() > PATTERN_TOL {
                    return None;
                }
            }
        }
        let base = CMatrix::from_fn(d, d, |j, k| m[(j * d + j, k * d + k)]);
        Some(MaximallyCorrelated { base: DensityMatrix::from_trusted(base), embedded: state.clone() })
    }

    /// Schmidt form of a pure bipartite state, which is maximally correlated
    /// up to local unitaries.
    pub fn from_pure(state: &BipartiteState) -> Result<Self> {
        let lam2 = state.state().second_eigenvalue();
        if lam2 > 1e-9 {
            return Err(Error::NotPure(lam2));
        }
        let e = state.state().eig();
        let psi = e.vector(e.dim() - 1);
        let (da, db) = (state.dim_a(), state.dim_b());
        let mat = CMatrix::from_fn(da, db, |a, b| psi[a * db + b]);
        let sv = SVD::new(mat, false, false).singular_values;
        let amps: Vec<f64> = sv.iter().copied().collect();
        let base = DensityMatrix::pure_real(&amps)?;
        Ok(make_mc(&base))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntanglementMeasure {
    RelativeEntropy,
    Petz,
    Sandwiched,
    LogRobustness,
    Geometric,
}

impl EntanglementMeasure {
    pub const ALL: [Self; 5] =
        [Self::RelativeEntropy, Self::Petz, Self::Sandwiched, Self::LogRobustness, Self::Geometric];

    pub fn name(self) -> &'static str {
        match self {
            Self::RelativeEntropy => "relative-entropy",
            Self::Petz => "petz",
            Self::Sandwiched => "sandwiched",
            Self::LogRobustness => "log-robustness",
            Self::Geometric => "geometric",
        }
    }

    pub fn needs_alpha(self) -> bool {
        matches!(self, Self::Petz | Self::Sandwiched)
    }
}

impl fmt::Display for EntanglementMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntanglementMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown entanglement measure {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McMeasure {
    pub value: Estimate,
    /// `-H^↑(A|B)` of the embedded state, of the matching family and order.
    pub conditional: f64,
    pub residual: f64,
}

/// Entanglement measure of a maximally correlated state.
///
/// Orders: Petz `α ∈ [0, 2]`, sandwiched `α ∈ [1/2, ∞]`; ignored otherwise.
pub fn e_measure_mc(
    mc: &MaximallyCorrelated,
    measure: EntanglementMeasure,
    alpha: f64,
    cfg: &OptimizerConfig,
) -> Result<McMeasure> {
    let rho = &mc.base;
    let state = &mc.embedded;
    let (value, conditional) = match measure {
        EntanglementMeasure::RelativeEntropy => {
            (Estimate::closed(coherence::c_rel_entropy(rho)), -conditional_von_neumann(state))
        }
        EntanglementMeasure::Petz => {
            if !(0.0..=2.0).contains(&alpha) {
                return Err(invalid(format!("Petz entanglement measure needs alpha in [0, 2], got {alpha}")));
            }
            let v = coherence::c_renyi_petz(rho, alpha)?;
            let h = cond_entropy_with(state, alpha, CondEntropyKind::PETZ_UP, cfg)?;
            (Estimate::closed(v), -h.value)
        }
        EntanglementMeasure::Sandwiched | EntanglementMeasure::LogRobustness | EntanglementMeasure::Geometric => {
            let a = match measure {
                EntanglementMeasure::LogRobustness => f64::INFINITY,
                EntanglementMeasure::Geometric => 0.5,
                _ => alpha,
            };
            if a.is_nan() || a < 0.5 {
                return Err(invalid(format!("sandwiched entanglement measure needs alpha >= 1/2, got {a}")));
            }
            let v = coherence::c_renyi_sandwiched(rho, a, cfg)?;
            let h = cond_entropy_with(state, a, CondEntropyKind::SANDWICHED_UP, cfg)?;
            (v, -h.value)
        }
    };
    Ok(McMeasure { value, conditional, residual: (value.value - conditional).abs() })
}

/// `tr|ρ^{T_A}| - 1`.
pub fn negativity(state: &BipartiteState) -> f64 {
    let pt = state.partial_transpose();
    let s: f64 = eigvalsh(pt.matrix()).iter().map(|v| v.abs()).sum();
    (s - 1.0).max(0.0)
}

/// `ln(1 + N)`.
pub fn log_negativity(state: &BipartiteState) -> f64 {
    negativity(state).ln_1p()
}

/// Eigenvalue slack allowed in the operator inequalities.
pub const REDUCTION_TOL: f64 = 1e-9;

/// Whether `σ <= I_A ⊗ σ_B` and `σ <= σ_A ⊗ I_B`, a necessary condition for
/// a state to be undistillable.
pub fn reduction_criterion(state: &BipartiteState) -> bool {
    let (da, db) = (state.dim_a(), state.dim_b());
    let sa = state.partial_trace(Subsystem::B);
    let sb = state.partial_trace(Subsystem::A);
    let m = state.state().matrix();
    let left = HermitianMatrix::identity(da).kron(sb.as_hermitian());
    let right = sa.as_hermitian().kron(&HermitianMatrix::identity(db));
    [left, right].iter().all(|x| eigvalsh(&symmetrize(&(x.matrix() - m)))[0] >= -REDUCTION_TOL)
}

/// `Σ p_i |Ψ_i⟩⟨Ψ_i|` over the Bell basis `(|00⟩±|11⟩)/√2, (|01⟩±|10⟩)/√2`.
pub fn bell_diagonal(p: [f64; 4]) -> Result<BipartiteState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let basis = [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]];
    let mut m = CMatrix::zeros(4, 4);
    for (pi, v) in p.iter().zip(basis) {
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] += C64::new(pi * v[r] * v[c], 0.0);
            }
        }
    }
    BipartiteState::new(DensityMatrix::new(m)?, 2, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> BipartiteState {
        bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn cnot_examples() {
        let u = cnot_unitary(2, 2).unwrap();
        let perm = [0usize, 1, 3, 2];
        for (c, &r) in perm.iter().enumerate() {
            assert_eq!(u[(r, c)], C64::new(1.0, 0.0));
        }
        let u = cnot_unitary(3, 4).unwrap();
        assert_abs_diff_eq!((u.adjoint() * &u - CMatrix::identity(12, 12)).norm(), 0.0);
        for j in 0..3 {
            assert_eq!(u[(j * 4 + j, j * 4)], C64::new(1.0, 0.0));
        }
        assert!(cnot_unitary(3, 2).is_err());
    }

    #[test]
    fn embedding_matches_cnot_action() {
        let rho = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.7, 0.0), C64::new(0.2, 0.1), C64::new(0.2, -0.1), C64::new(0.3, 0.0)],
        ))
        .unwrap();
        let zero = DensityMatrix::pure_real(&[1.0, 0.0]).unwrap();
        let u = cnot_unitary(2, 2).unwrap();
        let direct = &u * rho.kron(&zero).matrix() * u.adjoint();
        let mc = make_mc(&rho);
        assert_abs_diff_eq!((direct - mc.embedded().state().matrix()).norm(), 0.0, epsilon = 1e-15);
        let b = mc.embedded().partial_trace(Subsystem::A);
        assert_abs_diff_eq!((b.matrix() - rho.dephased_state().matrix()).norm(), 0.0, epsilon = 1e-15);
        assert!(MaximallyCorrelated::detect(mc.embedded()).is_some());
        assert!(MaximallyCorrelated::detect(&bell_diagonal([0.5, 0.0, 0.5, 0.0]).unwrap()).is_none());
    }

    #[test]
    fn plus_embeds_to_bell() {
        let mc = make_mc(&DensityMatrix::maximally_coherent(2));
        assert_abs_diff_eq!((mc.embedded().state().matrix() - bell().state().matrix()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn negativity_examples() {
        let a = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(negativity(&BipartiteState::product(&a, &a)), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&bell()), 1.0, epsilon = 1e-12);
        for p0 in [0.5, 0.7, 0.9] {
            let r = (1.0 - p0) / 3.0;
            assert_abs_diff_eq!(negativity(&bell_diagonal([p0, r, r, r]).unwrap()), 2.0 * p0 - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let a = DensityMatrix::diagonal_state(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::pure_real(&[0.6, 0.8]).unwrap();
        assert!(reduction_criterion(&BipartiteState::product(&a, &b)));
        assert!(!reduction_criterion(&bell()));
        let mixed = BipartiteState::new(DensityMatrix::maximally_mixed(4), 2, 2).unwrap();
        assert!(reduction_criterion(&mixed));
    }

    #[test]
    fn pure_state_measures() {
        let amps = [0.8, 0.0, 0.0, 0.6];
        let psi = BipartiteState::new(DensityMatrix::pure_real(&amps).unwrap(), 2, 2).unwrap();
        let mc = MaximallyCorrelated::from_pure(&psi).unwrap();
        let cfg = OptimizerConfig::default();
        let p = [0.64, 0.36];
        for alpha in [0.5f64, 1.5, 2.0] {
            let expect = alpha / (alpha - 1.0) * p.iter().map(|x: &f64| x.powf(1.0 / alpha)).sum::<f64>().ln();
            let out = e_measure_mc(&mc, EntanglementMeasure::Petz, alpha, &cfg).unwrap();
            assert_abs_diff_eq!(out.value.value, expect, epsilon = 1e-10);
            assert!(out.residual < 1e-9);
        }
        let lr = e_measure_mc(&mc, EntanglementMeasure::LogRobustness, f64::NAN, &cfg).unwrap();
        let tr_sqrt: f64 = p.iter().map(|x| x.sqrt()).sum();
        assert_abs_diff_eq!(lr.value.value, 2.0 * tr_sqrt.ln(), epsilon = 1e-8);
        assert_abs_diff_eq!(lr.value.value, log_negativity(&psi), epsilon = 1e-8);
        assert!(lr.residual < 1e-5, "{}", lr.residual);
    }

    #[test]
    fn relative_entropy_bridge() {
        let rho = DensityMatrix::new(CMatrix::from_row_slice(
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
        .unwrap();
        let mc = make_mc(&rho);
        let out = e_measure_mc(&mc, EntanglementMeasure::RelativeEntropy, 1.0, &OptimizerConfig::default()).unwrap();
        assert!(out.residual < 1e-10);
        assert!(e_measure_mc(&mc, EntanglementMeasure::Petz, 2.5, &OptimizerConfig::default()).is_err());
    }
}
