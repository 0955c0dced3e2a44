//! Randomized property suites over every identity and inequality the library
//! relies on.
//!
//! A suite runs `trials` independent trials; trial `i` draws its states from
//! the seed `seed + i`, so any failure is reproduced by rerunning that seed
//! with one trial. Each trial emits named margins: an inequality `lo <= hi`
//! has margin `hi - lo`, an identity `a = b` has margin `-|a - b|`, and a
//! check passes when its margin is at least `-tolerance`. Aggregation keeps
//! only counters and extrema, so the summary does not depend on the order in
//! which trials finish.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::coherence;
use crate::conditional::{cond_entropy_with, renyi_entropy, CondEntropyKind};
use crate::distill;
use crate::divergence::{self, AlphaGrid};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::io::{random_density, random_pure, random_tripartite_pure, random_unitary, seeded_rng};
use crate::linalg::{reduce, symmetrize, BipartiteState, CMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::mc::{self, EntanglementMeasure};
use crate::optimize::OptimizerConfig;
use crate::par::Execution;
use crate::probability::ProbabilityVector;

/// Tolerances shared by the suites.
pub mod tol {
    /// Identities between closed forms.
    pub const EXACT: f64 = 1e-9;
    /// Identities that pass through an eigendecomposition of a larger operator.
    pub const CLOSED: f64 = 1e-8;
    /// Identities between closed forms involving several matrix powers.
    pub const DUALITY: f64 = 1e-6;
    /// Anything computed by the optimizer.
    pub const OPTIMIZER: f64 = 1e-4;
    /// Inequalities between closed forms.
    pub const ORDER: f64 = 1e-9;
    /// Monotonicity in the order, where optimizer values are involved.
    pub const MONOTONE: f64 = 1e-8;
    /// Spread over the grid below which a family counts as constant.
    pub const CONSTANT: f64 = 1e-7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Divergences,
    Conditional,
    Coherence,
    Mc,
    Distill,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [Self::Divergences, Self::Conditional, Self::Coherence, Self::Mc, Self::Distill];

    pub fn name(self) -> &'static str {
        match self {
            Self::Divergences => "divergences",
            Self::Conditional => "conditional",
            Self::Coherence => "coherence",
            Self::Mc => "mc",
            Self::Distill => "distill",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::PARTS
            .into_iter()
            .chain([Self::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Deliberate defects for testing that the suites catch errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Negates the closed form of the Petz up-entropy.
    PetzUpSign,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "petz-up-sign" => Ok(Self::PetzUpSign),
            _ => Err(Error::Parse(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub exec: Execution,
    pub fault: Option<Fault>,
    pub optimizer: OptimizerConfig,
}

impl VerifyConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self { dim, trials, seed, exec: Execution::default(), fault: None, optimizer: OptimizerConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub tolerance: f64,
    pub worst_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl CheckSummary {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckSummary::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckSummary> {
        self.checks.iter().filter(|c| !c.ok())
    }

    pub fn get(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Number of individual comparisons made by checks whose name starts with `prefix`.
    pub fn comparisons(&self, prefix: &str) -> usize {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).map(|c| c.total).sum()
    }

    pub fn worst_slack(&self, prefix: &str) -> f64 {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).map(|c| c.worst_slack).fold(f64::INFINITY, f64::min)
    }
}

struct Entry {
    name: &'static str,
    margin: f64,
    tol: f64,
    message: Option<String>,
}

/// Margins recorded by one trial.
#[derive(Default)]
struct Trial {
    entries: Vec<Entry>,
}

impl Trial {
    fn push(&mut self, name: &'static str, margin: f64, tol: f64) {
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.entries.push(Entry { name, margin, tol, message: None });
    }

    fn le(&mut self, name: &'static str, lo: f64, hi: f64, tol: f64) {
        let m = if lo == hi { 0.0 } else { hi - lo };
        self.push(name, m, tol);
    }

    fn le_ext(&mut self, name: &'static str, lo: ExtReal, hi: ExtReal, tol: f64) {
        match (lo, hi) {
            (_, ExtReal::PosInf) => self.push(name, f64::INFINITY, tol),
            (ExtReal::PosInf, ExtReal::Finite(_)) => self.push(name, f64::NEG_INFINITY, tol),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => self.le(name, a, b, tol),
        }
    }

    fn eq(&mut self, name: &'static str, a: f64, b: f64, tol: f64) {
        let m = if a == b { 0.0 } else { -(a - b).abs() };
        self.push(name, m, tol);
    }

    fn eq_ext(&mut self, name: &'static str, a: ExtReal, b: ExtReal, tol: f64) {
        match (a, b) {
            (ExtReal::PosInf, ExtReal::PosInf) => self.push(name, 0.0, tol),
            (ExtReal::Finite(x), ExtReal::Finite(y)) => self.eq(name, x, y, tol),
            _ => self.push(name, f64::NEG_INFINITY, tol),
        }
    }

    fn holds(&mut self, name: &'static str, ok: bool) {
        self.push(name, if ok { 0.0 } else { -1.0 }, 0.0);
    }

    fn error(&mut self, name: &'static str, e: &Error) {
        self.entries.push(Entry { name, margin: f64::NEG_INFINITY, tol: 0.0, message: Some(e.to_string()) });
    }
}

type TrialFn = fn(&Ctx, &mut Trial) -> Result<()>;

struct Ctx {
    dim: usize,
    index: usize,
    seed: u64,
    fault: Option<Fault>,
    cfg: OptimizerConfig,
}

impl Ctx {
    fn rng(&self) -> rand_chacha::ChaCha8Rng {
        seeded_rng(self.seed)
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.dim < 2 {
        return Err(crate::error::invalid("verification needs dim >= 2"));
    }
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for part in parts {
        checks.extend(run_part(part, cfg));
    }
    Ok(VerifyReport { suite, dim: cfg.dim, trials: cfg.trials, seed: cfg.seed, checks })
}

fn run_part(part: Suite, cfg: &VerifyConfig) -> Vec<CheckSummary> {
    let f: TrialFn = match part {
        Suite::Divergences => divergence_trial,
        Suite::Conditional => conditional_trial,
        Suite::Coherence => coherence_trial,
        Suite::Mc => mc_trial,
        Suite::Distill => distill_trial,
        Suite::All => unreachable!("expanded by the caller"),
    };
    let name: &'static str = part.name();
    let trials = cfg.exec.map(cfg.trials, |i| {
        let seed = cfg.seed.wrapping_add(i as u64);
        let ctx = Ctx { dim: cfg.dim, index: i, seed, fault: cfg.fault, cfg: OptimizerConfig { seed, ..cfg.optimizer } };
        let mut t = Trial::default();
        if let Err(e) = f(&ctx, &mut t) {
            t.error(leak_name(name), &e);
        }
        (seed, t)
    });
    let mut map: BTreeMap<&'static str, CheckSummary> = BTreeMap::new();
    for (seed, t) in trials {
        for e in t.entries {
            let s = map.entry(e.name).or_insert_with(|| CheckSummary {
                name: e.name.to_string(),
                passed: 0,
                total: 0,
                tolerance: e.tol,
                worst_slack: f64::INFINITY,
                first_failing_seed: None,
                message: None,
            });
            s.total += 1;
            s.tolerance = s.tolerance.max(e.tol);
            s.worst_slack = s.worst_slack.min(e.margin);
            if e.margin >= -e.tol {
                s.passed += 1;
            } else if s.first_failing_seed.is_none_or(|f| seed < f) {
                s.first_failing_seed = Some(seed);
                s.message = e.message;
            }
        }
    }
    map.into_values().collect()
}

fn leak_name(suite: &'static str) -> &'static str {
    match suite {
        "divergences" => "divergences-evaluation-error",
        "conditional" => "conditional-evaluation-error",
        "coherence" => "coherence-evaluation-error",
        "mc" => "mc-evaluation-error",
        _ => "distill-evaluation-error",
    }
}

fn random_rank<R: Rng>(d: usize, rng: &mut R) -> usize {
    rng.random_range(1..=d)
}

fn pos_grid() -> Vec<f64> {
    AlphaGrid::standard().iter().filter(|&a| a > 0.0).collect()
}

fn max_gap(values: &[ExtReal]) -> f64 {
    if values.iter().any(|v| !v.is_finite()) {
        return if values.iter().all(|v| !v.is_finite()) { 0.0 } else { f64::INFINITY };
    }
    let f: Vec<f64> = values.iter().map(|v| v.to_f64()).collect();
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

// ---------------------------------------------------------------- divergences

/// A pair satisfying the equality condition: `σ = kρ ⊕ τ` with `τ` supported
/// off the support of `ρ`, in a random basis.
fn alpha_independent_pair<R: Rng>(d: usize, rng: &mut R) -> Result<(DensityMatrix, HermitianMatrix, f64)> {
    let r = rng.random_range(1..d);
    let k: f64 = rng.random_range(0.3..3.0);
    let u = random_unitary(d, rng);
    let mut p: Vec<f64> = (0..r).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let mut rd = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for i in 0..d {
        if i < r {
            rd[i] = p[i];
            sd[i] = k * p[i];
        } else {
            sd[i] = rng.random_range(0.05..1.0);
        }
    }
    let rot = |v: &[f64]| -> CMatrix {
        let m = HermitianMatrix::from_real_diagonal(v).into_matrix();
        symmetrize(&(&u * m * u.adjoint()))
    };
    let rho = DensityMatrix::from_psd(HermitianMatrix::from_raw(rot(&rd)))?;
    Ok((rho, HermitianMatrix::from_raw(rot(&sd)), k))
}

fn divergence_trial(ctx: &Ctx, t: &mut Trial) -> Result<()> {
    let d = ctx.dim;
    let mut rng = ctx.rng();
    let rho = random_density(d, random_rank(d, &mut rng), &mut rng)?;
    let sigma_rank = if ctx.index % 4 == 3 { random_rank(d, &mut rng) } else { d };
    let scale: f64 = rng.random_range(0.5..2.0);
    let sigma = HermitianMatrix::from_raw(random_density(d, sigma_rank, &mut rng)?.matrix() * C64::new(scale, 0.0));

    let grid = AlphaGrid::standard();
    let petz: Vec<ExtReal> = grid.iter().map(|a| divergence::petz_renyi(&rho, &sigma, a)).collect::<Result<_>>()?;
    let pos = pos_grid();
    let sand: Vec<ExtReal> = pos.iter().map(|&a| divergence::sandwiched_renyi(&rho, &sigma, a)).collect::<Result<_>>()?;
    for w in petz.windows(2) {
        t.le_ext("monotone-petz-in-alpha", w[0], w[1], tol::MONOTONE);
    }
    for w in sand.windows(2) {
        t.le_ext("monotone-sandwiched-in-alpha", w[0], w[1], tol::MONOTONE);
    }
    for (i, &a) in pos.iter().enumerate() {
        let pi = grid.values().iter().position(|&x| x == a).expect("positive grid is a subset");
        t.le_ext("ordering-petz-above-sandwiched", sand[i], petz[pi], tol::ORDER);
    }

    let drho = divergence::dephase(&rho);
    let dsigma = sigma.dephased();
    for a in grid.iter() {
        if a <= 2.0 {
            let before = divergence::petz_renyi(&rho, &sigma, a)?;
            let after = divergence::petz_renyi(&drho, &dsigma, a)?;
            t.le_ext("data-processing-petz", after, before, tol::ORDER);
        }
        if a >= 0.5 {
            let before = divergence::sandwiched_renyi(&rho, &sigma, a)?;
            let after = divergence::sandwiched_renyi(&drho, &dsigma, a)?;
            t.le_ext("data-processing-sandwiched", after, before, tol::ORDER);
        }
    }

    // smooth quantities need a faithful second argument
    let full = HermitianMatrix::from_raw(random_density(d, d, &mut rng)?.into_hermitian().into_matrix());
    let s1 = divergence::relative_entropy(&rho, &full)?.to_f64();
    for a in [1.0 - 1e-4, 1.0 + 1e-4] {
        t.eq("limit-petz-at-one", divergence::petz_renyi(&rho, &full, a)?.to_f64(), s1, 1e-3);
        t.eq("limit-sandwiched-at-one", divergence::sandwiched_renyi(&rho, &full, a)?.to_f64(), s1, 1e-3);
    }
    let h = 1e-3;
    let deriv = (divergence::petz_renyi(&rho, &full, 1.0 + h)?.to_f64()
        - divergence::petz_renyi(&rho, &full, 1.0 - h)?.to_f64())
        / (2.0 * h);
    t.eq("varentropy-derivative", divergence::relative_varentropy(&rho, &full)?, 2.0 * deriv, tol::OPTIMIZER);

    // equality condition on a generic pair and on a constructed pair
    equality_condition_checks(t, &rho, &sigma)?;
    let (r2, s2, k) = alpha_independent_pair(d, &mut rng)?;
    let constant = equality_condition_checks(t, &r2, &s2)?;
    t.holds("alpha-independent-constructed-pair-detected", constant);
    t.eq("alpha-independent-value", divergence::relative_entropy(&r2, &s2)?.to_f64(), -k.ln(), tol::CLOSED);
    t.eq("varentropy-zero-when-alpha-independent", divergence::relative_varentropy(&r2, &s2)?, 0.0, 1e-10);
    Ok(())
}

/// Records predicate ⇔ constancy for both families; returns the predicate.
fn equality_condition_checks(t: &mut Trial, rho: &DensityMatrix, sigma: &HermitianMatrix) -> Result<bool> {
    let pred = divergence::alpha_independent(rho, sigma)?;
    let petz: Vec<ExtReal> =
        AlphaGrid::standard().iter().map(|a| divergence::petz_renyi(rho, sigma, a)).collect::<Result<_>>()?;
    let sand: Vec<ExtReal> =
        pos_grid().iter().map(|&a| divergence::sandwiched_renyi(rho, sigma, a)).collect::<Result<_>>()?;
    t.holds("equality-condition-iff-petz-constant", pred == (max_gap(&petz) <= tol::CONSTANT));
    t.holds("equality-condition-iff-sandwiched-constant", pred == (max_gap(&sand) <= tol::CONSTANT));
    Ok(pred)
}

// ---------------------------------------------------------------- conditional

struct CondCache<'a> {
    state: &'a BipartiteState,
    cfg: OptimizerConfig,
    fault: Option<Fault>,
}

impl CondCache<'_> {
    fn h(&self, kind: CondEntropyKind, alpha: f64) -> Result<f64> {
        let v = cond_entropy_with(self.state, alpha, kind, &self.cfg)?.value;
        let flip = kind == CondEntropyKind::PETZ_UP && alpha != 1.0 && self.fault == Some(Fault::PetzUpSign);
        Ok(if flip { -v } else { v })
    }
}

fn tripartite_marginals(psi: &DensityMatrix, dims: [usize; 3]) -> Result<(BipartiteState, BipartiteState)> {
    let ab = DensityMatrix::from_trusted(symmetrize(&reduce(psi.matrix(), &dims, &[0, 1])));
    let ae = DensityMatrix::from_trusted(symmetrize(&reduce(psi.matrix(), &dims, &[0, 2])));
    Ok((BipartiteState::new(ab, dims[0], dims[1])?, BipartiteState::new(ae, dims[0], dims[2])?))
}

const CHAIN_ORDERS: [f64; 4] = [0.6, 1.0, 2.0, 5.0];

fn conditional_trial(ctx: &Ctx, t: &mut Trial) -> Result<()> {
    use CondEntropyKind as K;
    let mut rng = ctx.rng();

    let dims = if ctx.index.is_multiple_of(2) { [2, 2, 2] } else { [2, 3, 2] };
    let psi = random_tripartite_pure(dims, &mut rng)?;
    let (ab, ae) = tripartite_marginals(&psi, dims)?;
    let b = CondCache { state: &ab, cfg: ctx.cfg, fault: ctx.fault };
    let e = CondCache { state: &ae, cfg: ctx.cfg, fault: ctx.fault };
    for (a, be) in [(0.5, 1.5), (1.2, 0.8), (2.0, 0.0)] {
        t.eq("duality-petz-down", e.h(K::PETZ_DOWN, a)?, -b.h(K::PETZ_DOWN, be)?, tol::DUALITY);
    }
    for (a, be) in [(1.0, 1.0), (2.0, 2.0 / 3.0)] {
        t.eq("duality-sandwiched-up", e.h(K::SANDWICHED_UP, a)?, -b.h(K::SANDWICHED_UP, be)?, tol::OPTIMIZER);
    }
    for (a, be) in [(2.0, 0.5), (4.0, 0.25)] {
        t.eq("duality-sandwiched-down-petz-up", e.h(K::SANDWICHED_DOWN, a)?, -b.h(K::PETZ_UP, be)?, tol::DUALITY);
    }

    let kind = ctx.index % 3;
    let state = match kind {
        0 => BipartiteState::new(random_density(4, random_rank(4, &mut rng), &mut rng)?, 2, 2)?,
        1 => BipartiteState::new(random_pure(4, &mut rng)?, 2, 2)?,
        _ => {
            let a = random_density(2, random_rank(2, &mut rng), &mut rng)?;
            let bb = random_density(2, random_rank(2, &mut rng), &mut rng)?;
            BipartiteState::product(&a, &bb)
        }
    };
    let pure = kind == 1;
    let c = CondCache { state: &state, cfg: ctx.cfg, fault: ctx.fault };
    let rho_a = state.partial_trace(crate::linalg::Subsystem::B);
    let s_a = |a: f64| renyi_entropy(&rho_a, a);
    let sat = |t: &mut Trial, name, lo: f64, hi: f64, tol: f64| {
        if pure {
            t.eq(name, lo, hi, tol);
        }
    };

    for alpha in CHAIN_ORDERS {
        let g = 2.0 - 1.0 / alpha;
        let pd = c.h(K::PETZ_DOWN, alpha)?;
        let pu = c.h(K::PETZ_UP, alpha)?;
        let sd = c.h(K::SANDWICHED_DOWN, alpha)?;
        let su = c.h(K::SANDWICHED_UP, alpha)?;
        let pd_g = c.h(K::PETZ_DOWN, g)?;
        let sd_g = c.h(K::SANDWICHED_DOWN, g)?;
        let pu_g = c.h(K::PETZ_UP, g)?;
        t.le("chain-petz-down-below-up", pd, pu, tol::OPTIMIZER);
        t.le("chain-petz-up-below-down-at-2-minus-inverse", pu, pd_g, tol::ORDER);
        t.le("chain-sandwiched-down-below-up", sd, su, tol::OPTIMIZER);
        t.le("chain-sandwiched-up-below-down-at-2-minus-inverse", su, sd_g, tol::OPTIMIZER);
        t.le("chain-petz-down-below-sandwiched-down", pd, sd, tol::ORDER);
        t.le("chain-sandwiched-down-below-petz-down-at-2-minus-inverse", sd, pd_g, tol::ORDER);
        t.le("chain-petz-up-below-sandwiched-up", pu, su, tol::OPTIMIZER);
        t.le("chain-sandwiched-up-below-petz-up-at-2-minus-inverse", su, pu_g, tol::OPTIMIZER);
        sat(t, "chain-saturation-pure-closed-form", pu, pd_g, tol::DUALITY);
        sat(t, "chain-saturation-pure-closed-form", sd, pd_g, tol::DUALITY);
        sat(t, "chain-saturation-pure-optimizer", su, sd_g, tol::DUALITY);
        sat(t, "chain-saturation-pure-optimizer", su, pu_g, tol::DUALITY);

        // upper bounds by the marginal entropy
        let sa = s_a(alpha)?;
        t.le("upper-bound-petz-up-by-marginal", pu, sa, tol::ORDER);
        t.le("upper-bound-sandwiched-up-by-marginal", su, sa, tol::OPTIMIZER);
        if kind == 2 {
            for (v, name) in [(pd, "product-collapse-closed-form"), (pu, "product-collapse-closed-form"), (sd, "product-collapse-closed-form")] {
                t.eq(name, v, sa, tol::DUALITY);
            }
            t.eq("product-collapse-optimizer", su, sa, tol::OPTIMIZER);
        }

        // lower bounds by minus a marginal entropy
        let inv = 1.0 / alpha;
        t.le("lower-bound-sandwiched-down", -s_a(inv)?, sd, tol::ORDER);
        sat(t, "lower-bound-saturation-pure", -s_a(inv)?, sd, tol::DUALITY);
        let s_up = s_a(alpha / (2.0 * alpha - 1.0))?;
        t.le("lower-bound-sandwiched-up", -s_up, su, tol::OPTIMIZER);
        sat(t, "lower-bound-saturation-pure-optimizer", -s_up, su, tol::DUALITY);
        if alpha <= 2.0 {
            t.le("lower-bound-petz-down", -s_a(2.0 - alpha)?, pd, tol::ORDER);
            t.le("lower-bound-petz-up", -s_a(inv)?, pu, tol::ORDER);
            sat(t, "lower-bound-saturation-pure", -s_a(2.0 - alpha)?, pd, tol::DUALITY);
            sat(t, "lower-bound-saturation-pure", -s_a(inv)?, pu, tol::DUALITY);
        }
    }
    for alpha in [0.0, 0.3] {
        let pu = c.h(K::PETZ_UP, alpha)?;
        t.le("chain-petz-down-below-up", c.h(K::PETZ_DOWN, alpha)?, pu, tol::ORDER);
        t.le("upper-bound-petz-up-by-marginal", pu, s_a(alpha)?, tol::ORDER);
    }
    Ok(())
}

// ---------------------------------------------------------------- coherence

/// Maximally coherent blocks on the given index ranges with random phases.
fn coherent_blocks<R: Rng>(d: usize, sizes: &[usize], rng: &mut R) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros(d, d);
    let mut start = 0;
    for &len in sizes {
        let w: f64 = rng.random_range(0.2..1.0);
        let phases: Vec<C64> = (0..len).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
        for i in 0..len {
            for j in 0..len {
                m[(start + i, start + j)] = phases[i] * phases[j].conj() * (w / len as f64);
            }
        }
        start += len;
    }
    DensityMatrix::from_psd(HermitianMatrix::from_raw(m))
}

fn petz_pure(p: &[f64], alpha: f64) -> f64 {
    if alpha == 1.0 {
        return -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>();
    }
    alpha / (alpha - 1.0) * p.iter().map(|x| x.powf(1.0 / alpha)).sum::<f64>().ln()
}

fn sandwiched_pure(p: &[f64], alpha: f64) -> f64 {
    if alpha == 0.5 {
        return -p.iter().copied().fold(0.0, f64::max).ln();
    }
    if alpha.is_infinite() {
        return 2.0 * p.iter().map(|x| x.sqrt()).sum::<f64>().ln();
    }
    let e = alpha / (2.0 * alpha - 1.0);
    (2.0 * alpha - 1.0) / (alpha - 1.0) * p.iter().map(|x| x.powf(e)).sum::<f64>().ln()
}

fn coherence_trial(ctx: &Ctx, t: &mut Trial) -> Result<()> {
    let d = ctx.dim;
    let mut rng = ctx.rng();
    let cfg = &ctx.cfg;
    let rho = random_density(d, random_rank(d, &mut rng), &mut rng)?;

    for a in [0.3, 0.7, 1.5, 2.0] {
        let closed = coherence::c_renyi_petz(&rho, a)?;
        let opt = coherence::c_renyi_petz_optimized(&rho, a, cfg)?.value;
        t.eq("petz-closed-form-matches-optimizer", opt, closed, 1e-5);
    }

    let grid = AlphaGrid::standard();
    let petz: Vec<f64> = grid.iter().map(|a| coherence::c_renyi_petz(&rho, a)).collect::<Result<_>>()?;
    let sand_grid: Vec<f64> = grid.iter().filter(|&a| a >= 0.5).collect();
    let sand: Vec<f64> =
        sand_grid.iter().map(|&a| coherence::c_renyi_sandwiched(&rho, a, cfg).map(|e| e.value)).collect::<Result<_>>()?;
    for w in petz.windows(2) {
        t.le("monotone-petz-coherence-in-alpha", w[0], w[1], tol::MONOTONE);
    }
    for w in sand.windows(2) {
        t.le("monotone-sandwiched-coherence-in-alpha", w[0], w[1], tol::OPTIMIZER);
    }
    for (i, &a) in sand_grid.iter().enumerate() {
        let pi = grid.values().iter().position(|&x| x == a).expect("subset of the grid");
        t.le("ordering-petz-coherence-above-sandwiched", sand[i], petz[pi], tol::OPTIMIZER);
    }

    let cl = coherence::c_l1_log(&rho);
    // Petz orders above 2 are not coherence measures and may exceed the ceiling
    let petz_measures = grid.iter().zip(&petz).filter(|(a, _)| *a <= 2.0).map(|(_, v)| *v);
    let ceiling = petz_measures.chain(sand.iter().copied()).chain([coherence::c_log_robustness(&rho)]);
    for v in ceiling {
        t.le("ceiling-log-l1", v, cl, 1e-6);
    }

    let bounds = coherence::coherence_bound_suite(&rho, &grid, cfg)?;
    for b in &bounds.checks {
        t.le("bound-suite", b.lower, b.upper, tol::OPTIMIZER);
    }

    let cr = coherence::robustness_of_coherence(&rho);
    let l1 = coherence::c_l1(&rho);
    t.le("robustness-window-lower", l1 / (d as f64 - 1.0), cr, 1e-6);
    t.le("robustness-window-upper", cr, l1, 1e-6);

    // pure states
    let psi = random_pure(d, &mut rng)?;
    let p = psi.diagonal();
    for a in [0.5, 0.8, 2.0, 5.0, f64::INFINITY] {
        let v = coherence::c_renyi_sandwiched(&psi, a, cfg)?.value;
        t.eq("pure-state-sandwiched-formula", v, sandwiched_pure(&p, a), tol::OPTIMIZER);
    }
    for a in [0.25, 0.5, 1.0, 2.0] {
        t.eq("pure-state-petz-formula", coherence::c_renyi_petz(&psi, a)?, petz_pure(&p, a), tol::EXACT);
    }
    t.eq("pure-state-robustness-equals-l1", coherence::robustness_of_coherence(&psi), coherence::c_l1(&psi), tol::OPTIMIZER);

    // dephasing removes all coherence
    let inc = divergence::dephase(&rho);
    let mut worst: f64 = 0.0;
    for a in [0.5, 2.0] {
        worst = worst.max(coherence::c_renyi_petz(&inc, a)?).max(coherence::c_renyi_sandwiched(&inc, a, cfg)?.value);
    }
    worst = worst.max(coherence::c_rel_entropy(&inc)).max(coherence::c_log_robustness(&inc)).max(coherence::c_l1(&inc));
    t.eq("dephased-state-is-incoherent", worst, 0.0, 1e-9);

    // additivity on small products
    let d2 = if ctx.index.is_multiple_of(2) { 2 } else { 3 };
    let r1 = random_density(2, random_rank(2, &mut rng), &mut rng)?;
    let r2 = random_density(d2, random_rank(d2, &mut rng), &mut rng)?;
    let prod = r1.kron(&r2);
    for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let lhs = coherence::c_renyi_petz(&prod, a)?;
        t.eq("additivity-petz", lhs, coherence::c_renyi_petz(&r1, a)? + coherence::c_renyi_petz(&r2, a)?, tol::EXACT);
    }
    for a in [0.75, 2.0] {
        let s = |r: &DensityMatrix| coherence::c_renyi_sandwiched(r, a, cfg).map(|e| e.value);
        t.eq("additivity-sandwiched", s(&prod)?, s(&r1)? + s(&r2)?, tol::OPTIMIZER);
    }
    let lr = coherence::c_log_robustness;
    t.eq("additivity-log-robustness", lr(&prod), lr(&r1) + lr(&r2), tol::OPTIMIZER);

    // the equality condition on a curated family
    let (state, expect) = match ctx.index % 4 {
        0 => (rho.clone(), Some(false)),
        1 => (coherent_blocks(d, &[d], &mut rng)?, Some(true)),
        2 => (coherent_blocks(d, &[d / 2, d / 2], &mut rng)?, Some(true)),
        _ if d >= 3 => (coherent_blocks(d, &[1, d - 1], &mut rng)?, Some(false)),
        _ => (coherent_blocks(d, &[1, 1], &mut rng)?, Some(true)),
    };
    let pred = coherence::alpha_independent(&state)?;
    let vals: Vec<f64> = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]
        .into_iter()
        .map(|a| coherence::c_renyi_petz(&state, a))
        .collect::<Result<_>>()?;
    let spread = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - vals.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = (coherence::c_log_robustness(&state) - coherence::c_rel_entropy(&state)).abs();
    t.holds("equality-condition-iff-alpha-constant", pred == (spread <= 1e-6));
    t.holds("equality-condition-iff-log-robustness-equals-relative-entropy", pred == (gap <= 1e-5));
    if let Some(e) = expect {
        t.holds("equality-condition-curated-class", pred == e);
    }
    if let Some(c) = coherence::proportionality_constant(&state)? {
        t.eq("equality-condition-value", coherence::c_rel_entropy(&state), -c.ln(), tol::CLOSED);
    }
    Ok(())
}

// ---------------------------------------------------------------- mc

fn mc_trial(ctx: &Ctx, t: &mut Trial) -> Result<()> {
    let d = ctx.dim;
    let mut rng = ctx.rng();
    let rho = random_density(d, random_rank(d, &mut rng), &mut rng)?;
    let m = mc::make_mc(&rho);

    for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let out = mc::e_measure_mc(&m, EntanglementMeasure::Petz, a, &ctx.cfg)?;
        t.eq("mc-bridge-petz", out.value.value, out.conditional, tol::CLOSED);
    }
    for a in [0.75, 2.0] {
        let out = mc::e_measure_mc(&m, EntanglementMeasure::Sandwiched, a, &ctx.cfg)?;
        t.eq("mc-bridge-sandwiched", out.value.value, out.conditional, tol::OPTIMIZER);
    }
    let out = mc::e_measure_mc(&m, EntanglementMeasure::RelativeEntropy, 1.0, &ctx.cfg)?;
    t.eq("mc-bridge-relative-entropy", out.value.value, out.conditional, tol::CLOSED);

    let n = mc::negativity(m.embedded());
    t.eq("mc-negativity-equals-l1", n, coherence::c_l1(&rho), tol::EXACT);
    let er = coherence::robustness_of_coherence(&rho);
    t.le("mc-robustness-window-lower", n / (d as f64 - 1.0), er, 1e-6);
    t.le("mc-robustness-window-upper", er, n, 1e-6);

    let q = random_density(d, d, &mut rng)?.diagonal();
    let qd = HermitianMatrix::from_real_diagonal(&q);
    let lifted = HermitianMatrix::identity(d).kron(&qd);
    let embedded = m.embedded().state();
    for a in AlphaGrid::standard().iter() {
        let lhs = divergence::petz_renyi(embedded, &lifted, a)?;
        t.eq_ext("mc-divergence-identity-petz", lhs, divergence::petz_renyi(&rho, &qd, a)?, tol::CLOSED);
        if a > 0.0 {
            let lhs = divergence::sandwiched_renyi(embedded, &lifted, a)?;
            t.eq_ext("mc-divergence-identity-sandwiched", lhs, divergence::sandwiched_renyi(&rho, &qd, a)?, tol::CLOSED);
        }
    }
    let diag = rho.dephased_state();
    for a in [0.0, 0.5, 2.0, 3.0] {
        let h = cond_entropy_with(m.embedded(), a, CondEntropyKind::PETZ_DOWN, &ctx.cfg)?.value;
        let s = divergence::petz_renyi(&rho, diag.as_hermitian(), a)?.to_f64();
        t.eq("mc-petz-down-equals-divergence-to-diagonal", h, -s, tol::CLOSED);
    }
    Ok(())
}

// ---------------------------------------------------------------- distill

fn random_probability<R: Rng>(d: usize, rng: &mut R) -> Result<ProbabilityVector> {
    let rho = random_density(d, d, rng)?;
    ProbabilityVector::new(rho.diagonal())
}

fn distill_trial(ctx: &Ctx, t: &mut Trial) -> Result<()> {
    let d = ctx.dim;
    let mut rng = ctx.rng();
    let psi = random_pure(d, &mut rng)?;
    let r = distill::exact_distill_pure(&psi)?;
    let p_max = coherence::diag_part(&psi).max();
    t.holds("distill-length-is-floor", r.length == (1.0 / p_max).floor() as u64 || (1.0 / p_max).fract() < 1e-9);
    t.eq("distill-rate-is-min-entropy-of-diagonal", r.rate_nats, -p_max.ln(), 0.0);
    t.eq("distill-rate-equals-petz-order-0", r.rate_nats, coherence::c_renyi_petz(&psi, 0.0)?, tol::EXACT);
    let bounds = distill::distill_rate_bounds(&psi, &AlphaGrid::standard(), &ctx.cfg)?;
    for b in &bounds.bounds {
        let tol = if b.name == "petz" { tol::EXACT } else { tol::OPTIMIZER };
        t.le("distill-rate-below-bounds", r.rate_nats, b.value, tol);
    }
    let two = distill::exact_distill_pure(&psi.kron(&psi))?;
    t.eq("distill-p-max-multiplicative", two.p_max, p_max * p_max, 1e-15);
    t.eq("distill-rate-additive", two.rate_nats, 2.0 * r.rate_nats, tol::EXACT);

    let mixed = random_density(d, random_rank(d, &mut rng), &mut rng)?;
    let grid = AlphaGrid::standard();
    let bounds = distill::distill_rate_bounds(&mixed, &grid, &ctx.cfg)?;
    for fam in ["petz", "sandwiched"] {
        let vals: Vec<f64> = bounds.bounds.iter().filter(|b| b.name == fam).map(|b| b.value).collect();
        for w in vals.windows(2) {
            t.le("distill-bounds-monotone-in-alpha", w[0], w[1], tol::OPTIMIZER);
        }
    }
    t.holds("distill-best-bound-is-petz-order-0", {
        let b = bounds.best();
        b.name == "petz" && b.alpha == 0.0 || (b.value - coherence::c_renyi_petz(&mixed, 0.0)?).abs() < tol::OPTIMIZER
    });

    let x = random_probability(d, &mut rng)?;
    let y = random_probability(d, &mut rng)?;
    let z = random_probability(d, &mut rng)?;
    t.holds("majorization-reflexive", distill::majorizes(&x, &x));
    t.holds("majorization-uniform-is-bottom", distill::majorizes(&x, &ProbabilityVector::uniform(d)));
    let chain = distill::majorizes(&x, &y) && distill::majorizes(&y, &z);
    t.holds("majorization-transitive", !chain || distill::majorizes(&x, &z));
    let sorted = {
        let mut v = vec![x.clone(), y.clone(), z.clone()];
        v.sort_by(|a, b| b.max().total_cmp(&a.max()));
        v
    };
    let top = ProbabilityVector::new(sorted[0].sorted_desc().iter().enumerate().map(|(i, _)| if i == 0 { 1.0 } else { 0.0 }).collect())?;
    t.holds("majorization-point-mass-is-top", distill::majorizes(&top, &sorted[0]));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: Suite, dim: usize, trials: usize) -> VerifyReport {
        let mut cfg = VerifyConfig::new(dim, trials, 11);
        cfg.exec = Execution::Sequential;
        run_suite(suite, &cfg).unwrap()
    }

    fn assert_passes(r: &VerifyReport) {
        if let Some(c) = r.failures().next() {
            panic!("{} failed: {:?}", c.name, c);
        }
    }

    #[test]
    fn divergence_suite_passes() {
        assert_passes(&quick(Suite::Divergences, 3, 8));
    }

    #[test]
    fn distill_suite_passes() {
        assert_passes(&quick(Suite::Distill, 3, 4));
    }

    #[test]
    fn mc_suite_passes() {
        assert_passes(&quick(Suite::Mc, 2, 3));
    }

    #[test]
    fn coherence_suite_passes() {
        assert_passes(&quick(Suite::Coherence, 3, 4));
    }

    #[test]
    fn conditional_suite_passes() {
        assert_passes(&quick(Suite::Conditional, 2, 3));
    }

    #[test]
    fn injected_fault_is_caught() {
        let mut cfg = VerifyConfig::new(2, 2, 5);
        cfg.exec = Execution::Sequential;
        cfg.fault = Some(Fault::PetzUpSign);
        let r = run_suite(Suite::Conditional, &cfg).unwrap();
        let c = r.get("duality-sandwiched-down-petz-up").unwrap();
        assert!(!c.ok());
        assert_eq!(c.first_failing_seed, Some(5));
    }

    #[test]
    fn summaries_do_not_depend_on_execution() {
        let mut a = VerifyConfig::new(3, 4, 2);
        a.exec = Execution::Sequential;
        let mut b = a;
        b.exec = Execution::Parallel;
        assert_eq!(run_suite(Suite::Divergences, &a).unwrap(), run_suite(Suite::Divergences, &b).unwrap());
    }
}
