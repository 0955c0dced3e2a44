//! Spectral projected gradient over a closed convex set.
//!
//! Barzilai–Borwein steps with the nonmonotone line search of Grippo,
//! Lampariello and Lucidi. Gradients come from central differences, falling
//! back to a one-sided quotient where one side of the stencil is infeasible.

pub(crate) struct SpgOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Spg<'a> {
    pub f: &'a dyn Fn(&[f64]) -> f64,
    pub project: &'a dyn Fn(&[f64]) -> Vec<f64>,
    /// Coordinates that must stay nonnegative (difference quotients never
    /// step below zero on them).
    pub nonnegative: bool,
    pub max_iters: usize,
    pub tol: f64,
}

const FD_STEP: f64 = 1e-6;
const MEMORY: usize = 10;
const SUFFICIENT: f64 = 1e-4;
const LAMBDA_MIN: f64 = 1e-10;
const LAMBDA_MAX: f64 = 1e10;
const STALL_ROUNDS: usize = 5;

impl Spg<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn gradient(&self, x: &[f64], fx: f64) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        let mut y = x.to_vec();
        for i in 0..x.len() {
            let h = FD_STEP;
            let xi = x[i];
            let back_ok = !self.nonnegative || xi >= h;
            y[i] = xi + h;
            let fp = self.eval(&y);
            let fm = if back_ok {
                y[i] = xi - h;
                self.eval(&y)
            } else {
                f64::INFINITY
            };
            y[i] = xi;
            g[i] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - fx) / h,
                (false, true) => (fx - fm) / h,
                (false, false) => 0.0,
            };
        }
        g
    }

    pub fn run(&self, x0: &[f64]) -> SpgOutcome {
        let mut x = (self.project)(x0);
        let mut fx = self.eval(&x);
        if !fx.is_finite() {
            return SpgOutcome { x, f: fx, iterations: 0, converged: false };
        }
        let mut g = self.gradient(&x, fx);
        let mut history = vec![fx];
        let pg = projected_step(self, &x, &g, 1.0);
        let pg_norm = inf_norm(&pg);
        let mut lambda = if pg_norm > 0.0 { (1.0 / pg_norm).clamp(LAMBDA_MIN, LAMBDA_MAX) } else { 1.0 };
        let mut stall = 0usize;
        let mut converged = false;
        let mut iterations = 0usize;

        while iterations < self.max_iters {
            iterations += 1;
            let d = projected_step(self, &x, &g, lambda);
            if inf_norm(&d) < 1e-12 {
                converged = true;
                break;
            }
            let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let fmax = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut t = 1.0;
            let (x_new, f_new) = loop {
                let step: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let trial = (self.project)(&step);
                let ft = self.eval(&trial);
                if ft <= fmax + SUFFICIENT * t * slope.min(0.0) {
                    break (trial, ft);
                }
                t *= 0.5;
                if t < 1e-14 {
                    break (x.clone(), fx);
                }
            };
            if t < 1e-14 {
                // no acceptable step along the current direction
                converged = inf_norm(&d) < 1e-8;
                break;
            }
            let g_new = self.gradient(&x_new, f_new);
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            lambda = if sy > 0.0 { (ss / sy).clamp(LAMBDA_MIN, LAMBDA_MAX) } else { LAMBDA_MAX.min(1e3) };

            if (fx - f_new).abs() <= self.tol * (1.0 + fx.abs()) {
                stall += 1;
            } else {
                stall = 0;
            }
            x = x_new;
            fx = f_new;
            g = g_new;
            history.push(fx);
            if history.len() > MEMORY {
                history.remove(0);
            }
            if stall >= STALL_ROUNDS {
                converged = true;
                break;
            }
        }
        SpgOutcome { x, f: fx, iterations, converged }
    }
}

fn projected_step(p: &Spg<'_>, x: &[f64], g: &[f64], lambda: f64) -> Vec<f64> {
    let y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - lambda * b).collect();
    let py = (p.project)(&y);
    py.iter().zip(x).map(|(a, b)| a - b).collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::projection::project_simplex;

    #[test]
    fn quadratic_on_simplex() {
        let f = |q: &[f64]| (q[0] - 0.3).powi(2) + (q[1] - 0.7).powi(2);
        let spg = Spg { f: &f, project: &project_simplex, nonnegative: true, max_iters: 200, tol: 1e-15 };
        let r = spg.run(&[0.5, 0.5]);
        assert!((r.x[0] - 0.3).abs() < 1e-8, "{:?}", r.x);
        assert!(r.f < 1e-14);
    }

    #[test]
    fn linear_goes_to_vertex() {
        let p = [0.2, 0.5, 0.3];
        let f = |q: &[f64]| -q.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>();
        let spg = Spg { f: &f, project: &project_simplex, nonnegative: true, max_iters: 200, tol: 1e-15 };
        let r = spg.run(&[1.0 / 3.0; 3]);
        assert!((r.x[1] - 1.0).abs() < 1e-10, "{:?}", r.x);
    }
}
