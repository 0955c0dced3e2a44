//! Constrained minimizers used by the measure modules.
//!
//! Objectives are black boxes returning [`ExtReal`]. Each restart runs spectral
//! projected gradient on the feasible set and, for small problems, a
//! Nelder–Mead polish on a smooth unconstrained reparametrization
//! (`q_i = y_i² / Σ y²` on the simplex, `σ = M² / tr M²` for states). Restarts
//! use independent seeded generators and may run concurrently; the result
//! with the smallest value wins, ties going to the lowest restart index.

mod nelder_mead;
mod projection;
mod sdp;
mod spg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{CMatrix, HermitianMatrix, C64};
use crate::par::Execution;

pub use projection::{coords_from_hermitian, hermitian_from_coords, project_density, project_simplex};
pub use sdp::{min_diag_dominating, DiagDominating};

use nelder_mead::nelder_mead;
use spg::Spg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Relative objective change below which an iteration counts as stalled.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_iters: 2000, tol: 1e-13, restarts: 5, seed: 0x5eed }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Simplex point, or Hermitian coordinates for density problems
    /// (see [`hermitian_from_coords`]).
    pub minimizer: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Below this many parameters the Nelder–Mead polish is run.
const POLISH_MAX_PARAMS: usize = 8;

struct Run {
    x: Vec<f64>,
    f: f64,
    iterations: usize,
    converged: bool,
}

fn merge(runs: Vec<Run>) -> Result<OptResult> {
    let mut best: Option<Run> = None;
    for r in runs {
        if !r.f.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| r.f < b.f) {
            best = Some(r);
        }
    }
    best.map(|r| OptResult { minimizer: r.x, value: r.f, iterations: r.iterations, converged: r.converged })
        .ok_or(Error::NoFeasiblePoint)
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn dirichlet(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g = Gamma::new(1.0, 1.0).expect("valid gamma");
    let v: Vec<f64> = (0..dim).map(|_| g.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Minimizes `objective(q)` over probability vectors of length `dim`.
///
/// The objective may be evaluated on slightly unnormalized nonnegative
/// vectors while differentiating.
pub fn minimize_over_simplex<F>(objective: F, dim: usize, cfg: &OptimizerConfig) -> Result<OptResult>
where
    F: Fn(&[f64]) -> ExtReal + Sync,
{
    minimize_over_simplex_from(objective, dim, &[], cfg)
}

/// As [`minimize_over_simplex`], with extra starting points tried after the
/// uniform one.
pub fn minimize_over_simplex_from<F>(
    objective: F,
    dim: usize,
    hints: &[Vec<f64>],
    cfg: &OptimizerConfig,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> ExtReal + Sync,
{
    minimize_over_simplex_with(objective, dim, hints, cfg, Execution::default())
}

pub fn minimize_over_simplex_with<F>(
    objective: F,
    dim: usize,
    hints: &[Vec<f64>],
    cfg: &OptimizerConfig,
    exec: Execution,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> ExtReal + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(invalid("simplex dimension must be positive"));
    }
    if hints.iter().any(|h| h.len() != dim) {
        return Err(invalid("starting point has the wrong length"));
    }
    let f = |q: &[f64]| objective(q).to_f64();
    if dim == 1 {
        let v = f(&[1.0]);
        return merge(vec![Run { x: vec![1.0], f: v, iterations: 0, converged: true }]);
    }
    let n_starts = cfg.restarts.max(1 + hints.len());
    let runs = exec.map(n_starts, |i| {
        let start = match i {
            0 => vec![1.0 / dim as f64; dim],
            i if i <= hints.len() => project_simplex(&hints[i - 1]),
            _ => dirichlet(dim, &mut restart_rng(cfg.seed, i)),
        };
        simplex_run(&f, &start, cfg)
    });
    merge(runs)
}

fn simplex_run(f: &(dyn Fn(&[f64]) -> f64 + Sync), start: &[f64], cfg: &OptimizerConfig) -> Run {
    let dim = start.len();
    let spg = Spg { f, project: &project_simplex, nonnegative: true, max_iters: cfg.max_iters, tol: cfg.tol };
    let out = spg.run(start);
    let mut run = Run { x: out.x, f: out.f, iterations: out.iterations, converged: out.converged };
    if dim <= POLISH_MAX_PARAMS && run.f.is_finite() {
        let to_q = |y: &[f64]| -> Vec<f64> {
            let s: f64 = y.iter().map(|v| v * v).sum();
            y.iter().map(|v| v * v / s).collect()
        };
        let g = |y: &[f64]| f(&to_q(y));
        let y0: Vec<f64> = run.x.iter().map(|q| q.sqrt()).collect();
        let (y, fy, evals, conv) = polish(&g, y0, run.f, cfg);
        if fy < run.f {
            run.x = to_q(&y);
            run.f = fy;
        }
        run.iterations += evals;
        run.converged |= conv;
    }
    run
}

/// Repeated Nelder–Mead rounds from the incumbent with shrinking simplices.
fn polish(g: &dyn Fn(&[f64]) -> f64, y0: Vec<f64>, f0: f64, cfg: &OptimizerConfig) -> (Vec<f64>, f64, usize, bool) {
    let mut y = y0;
    let mut fy = f0;
    let mut evals = 0;
    let mut converged = false;
    let mut step = 1e-2;
    for _ in 0..4 {
        let out = nelder_mead(g, &y, step, 400 * y.len().max(1), cfg.tol.min(1e-14));
        evals += out.evals;
        converged = out.converged;
        if out.f < fy {
            let gain = fy - out.f;
            y = out.x;
            fy = out.f;
            if gain <= cfg.tol * (1.0 + fy.abs()) {
                break;
            }
        } else {
            step *= 0.1;
        }
    }
    (y, fy, evals, converged)
}

/// Minimizes `objective(σ)` over `dim × dim` density matrices.
///
/// `σ` is passed as a Hermitian operator; while differentiating it may be off
/// the unit-trace slice or marginally indefinite, in which case the objective
/// is free to return `+∞`.
pub fn minimize_over_density<F>(objective: F, dim: usize, cfg: &OptimizerConfig) -> Result<OptResult>
where
    F: Fn(&HermitianMatrix) -> ExtReal + Sync,
{
    minimize_over_density_from(objective, dim, &[], cfg)
}

pub fn minimize_over_density_from<F>(
    objective: F,
    dim: usize,
    hints: &[CMatrix],
    cfg: &OptimizerConfig,
) -> Result<OptResult>
where
    F: Fn(&HermitianMatrix) -> ExtReal + Sync,
{
    minimize_over_density_with(objective, dim, hints, cfg, Execution::default())
}

pub fn minimize_over_density_with<F>(
    objective: F,
    dim: usize,
    hints: &[CMatrix],
    cfg: &OptimizerConfig,
    exec: Execution,
) -> Result<OptResult>
where
    F: Fn(&HermitianMatrix) -> ExtReal + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(invalid("matrix dimension must be positive"));
    }
    if hints.iter().any(|h| h.nrows() != dim || h.ncols() != dim) {
        return Err(invalid("starting point has the wrong shape"));
    }
    let f = |x: &[f64]| objective(&HermitianMatrix::from_raw(hermitian_from_coords(x, dim))).to_f64();
    let project = |x: &[f64]| project_density(x, dim);
    let n_starts = cfg.restarts.max(1 + hints.len());
    let runs = exec.map(n_starts, |i| {
        let start = match i {
            0 => coords_from_hermitian(&CMatrix::identity(dim, dim).unscale(dim as f64)),
            i if i <= hints.len() => project_density(&coords_from_hermitian(&hints[i - 1]), dim),
            _ => coords_from_hermitian(&random_state_matrix(dim, &mut restart_rng(cfg.seed, i))),
        };
        density_run(&f, &project, &start, dim, cfg)
    });
    merge(runs)
}

fn random_state_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m.unscale(t)
}

fn density_run(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    project: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    start: &[f64],
    dim: usize,
    cfg: &OptimizerConfig,
) -> Run {
    let spg = Spg { f, project, nonnegative: false, max_iters: cfg.max_iters, tol: cfg.tol };
    let out = spg.run(start);
    let mut run = Run { x: out.x, f: out.f, iterations: out.iterations, converged: out.converged };
    if dim * dim <= POLISH_MAX_PARAMS && run.f.is_finite() {
        let to_sigma = |y: &[f64]| -> Vec<f64> {
            let m = hermitian_from_coords(y, dim);
            let sq = &m * &m;
            let t = sq.trace().re;
            coords_from_hermitian(&sq.unscale(t))
        };
        let g = |y: &[f64]| f(&to_sigma(y));
        let root = HermitianMatrix::from_raw(hermitian_from_coords(&run.x, dim)).power_on_support(0.5);
        let y0 = coords_from_hermitian(root.matrix());
        let (y, fy, evals, conv) = polish(&g, y0, run.f, cfg);
        if fy < run.f {
            run.x = to_sigma(&y);
            run.f = fy;
        }
        run.iterations += evals;
        run.converged |= conv;
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn squared_distance_on_simplex() {
        let f = |q: &[f64]| ExtReal::Finite((q[0] - 0.3).powi(2) + (q[1] - 0.7).powi(2));
        let r = minimize_over_simplex(f, 2, &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.minimizer[0], 0.3, epsilon = 1e-7);
        assert!(r.value < 1e-12);
    }

    #[test]
    fn linear_on_simplex() {
        let p = [0.1, 0.6, 0.3];
        let f = |q: &[f64]| ExtReal::Finite(-q.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>());
        let r = minimize_over_simplex(f, 3, &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.minimizer[1], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn everywhere_infinite() {
        let f = |_: &[f64]| ExtReal::PosInf;
        assert!(matches!(minimize_over_simplex(f, 3, &OptimizerConfig::default()), Err(Error::NoFeasiblePoint)));
    }

    #[test]
    fn frobenius_distance_on_states() {
        let tau = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.7, 0.0), C64::new(0.1, -0.2), C64::new(0.1, 0.2), C64::new(0.3, 0.0)],
        );
        let f = |s: &HermitianMatrix| ExtReal::Finite((s.matrix() - &tau).norm_squared());
        let r = minimize_over_density(f, 2, &OptimizerConfig::default()).unwrap();
        assert!(r.value < 1e-12, "{}", r.value);
        let s = hermitian_from_coords(&r.minimizer, 2);
        assert_abs_diff_eq!((s - &tau).norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn deterministic_given_seed() {
        let f = |q: &[f64]| ExtReal::Finite(q.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum());
        let cfg = OptimizerConfig::with_seed(9);
        let a = minimize_over_simplex(f, 4, &cfg).unwrap();
        let b = minimize_over_simplex(f, 4, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
