//! `min{tr D : D diagonal, D >= ρ}` and its dual `max{tr ρW : W >= 0, W_ii = 1}`.
//!
//! The dual is solved by block-coordinate ascent on a factorization
//! `W_ij = ⟨v_i, v_j⟩` with unit vectors `v_i ∈ C^d` (the mixing method).
//! Each coordinate step has the closed form `v_i ← g_i / |g_i|` where
//! `g_i = Σ_{j≠i} ρ_ji v_j`. At a fixed point complementary slackness gives the
//! primal candidate `d_i = ρ_ii + |g_i|`, which is then made feasible. The
//! returned trace is always that of a feasible `D`; `dual_bound` certifies how
//! far it can be from the optimum.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{eigvalsh, symmetrize, CMatrix, DensityMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagDominating {
    /// Diagonal of the optimal `D`; `diag(d) - ρ` is PSD.
    pub d: Vec<f64>,
    pub trace: f64,
    /// A dual-feasible value; the optimum lies in `[dual_bound, trace]`.
    pub dual_bound: f64,
    pub sweeps: usize,
}

impl DiagDominating {
    pub fn gap(&self) -> f64 {
        (self.trace - self.dual_bound).max(0.0)
    }
}

const MAX_SWEEPS: usize = 50_000;
const SWEEP_TOL: f64 = 1e-15;
const INIT_SEED: u64 = 0x6d69_7869_6e67;

/// Smallest-trace diagonal operator dominating `ρ`.
pub fn min_diag_dominating(rho: &DensityMatrix) -> DiagDominating {
    let m = rho.matrix();
    let n = m.nrows();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();

    // diagonal dominance always gives a feasible point
    let dominant: Vec<f64> = (0..n).map(|i| (0..n).map(|k| m[(i, k)].norm()).sum()).collect();
    let mut best = dominant.clone();
    let mut best_trace: f64 = dominant.iter().sum();

    let mut rng = ChaCha8Rng::seed_from_u64(INIT_SEED);
    let mut v: Vec<DVector<C64>> = (0..n)
        .map(|_| {
            let z = DVector::from_fn(n, |_, _| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let nz = z.norm();
            z.unscale(nz)
        })
        .collect();

    let mut value = dual_value(m, &v);
    let mut sweeps = 0;
    let mut g_norm = vec![0.0; n];
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        for i in 0..n {
            let mut g = DVector::<C64>::zeros(n);
            for j in 0..n {
                if j != i {
                    g.axpy(m[(j, i)], &v[j], C64::new(1.0, 0.0));
                }
            }
            let gn = g.norm();
            g_norm[i] = gn;
            if gn > 1e-300 {
                v[i] = g.unscale(gn);
            }
        }
        let next = dual_value(m, &v);
        let done = (next - value).abs() <= SWEEP_TOL * (1.0 + value.abs());
        value = next;
        if done {
            break;
        }
    }
    // recompute the slackness candidate at the final iterate
    for i in 0..n {
        let mut g = DVector::<C64>::zeros(n);
        for j in 0..n {
            if j != i {
                g.axpy(m[(j, i)], &v[j], C64::new(1.0, 0.0));
            }
        }
        g_norm[i] = g.norm();
    }
    let dual_bound = value;

    let candidate: Vec<f64> = diag.iter().zip(&g_norm).map(|(a, b)| a + b).collect();
    for c in feasible_versions(m, &candidate) {
        let t: f64 = c.iter().sum();
        if t < best_trace {
            best_trace = t;
            best = c;
        }
    }
    DiagDominating { d: best, trace: best_trace, dual_bound, sweeps }
}

fn dual_value(m: &CMatrix, v: &[DVector<C64>]) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (m[(j, i)] * v[i].dotc(&v[j])).re;
        }
    }
    s
}

/// Both restorations of a near-feasible candidate: uniform positive scaling
/// `t·D` with `t = λ_max(D^{-1/2} ρ D^{-1/2})`, and the shift `D + s·I`.
fn feasible_versions(m: &CMatrix, d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut out = Vec::new();
    if d.iter().all(|&x| x > 0.0) {
        let w: Vec<f64> = d.iter().map(|x| x.sqrt().recip()).collect();
        let x = CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (w[i] * w[j]));
        let top = eigvalsh(&symmetrize(&x)).last().copied().unwrap_or(0.0);
        let t = top * (1.0 + 1e-12);
        out.push(d.iter().map(|v| v * t.max(f64::MIN_POSITIVE)).collect());
    }
    let slack = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) }) - m;
    let low = eigvalsh(&symmetrize(&slack)).first().copied().unwrap_or(0.0);
    let shift = (-low).max(0.0) * (1.0 + 1e-12);
    out.push(d.iter().map(|v| v + shift).collect());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn is_dominating(rho: &DensityMatrix, d: &[f64]) -> bool {
        let n = d.len();
        let s = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) })
            - rho.matrix();
        eigvalsh(&symmetrize(&s))[0] >= -1e-8
    }

    #[test]
    fn incoherent_state() {
        let r = DensityMatrix::diagonal_state(&[0.2, 0.3, 0.5]).unwrap();
        let out = min_diag_dominating(&r);
        assert_abs_diff_eq!(out.trace, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.d[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pure_qubit_family() {
        for deg in [10.0f64, 30.0, 60.0] {
            let t = deg.to_radians();
            let r = DensityMatrix::pure_real(&[t.cos(), t.sin()]).unwrap();
            let out = min_diag_dominating(&r);
            assert_abs_diff_eq!(out.trace, 1.0 + (2.0 * t).sin(), epsilon = 1e-9);
            assert!(is_dominating(&r, &out.d));
        }
    }

    #[test]
    fn maximally_coherent() {
        for d in 2..6 {
            let r = DensityMatrix::maximally_coherent(d);
            let out = min_diag_dominating(&r);
            assert_abs_diff_eq!(out.trace, d as f64, epsilon = 1e-9);
            assert!(out.gap() < 1e-9);
        }
    }
}
