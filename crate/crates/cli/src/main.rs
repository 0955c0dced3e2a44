//! `cohx`: coherence and entanglement measures from the command line.
//!
//! Exit codes: 0 success, 1 failed verification, 2 bad flags, 3 invalid state
//! file, 4 measure not defined for the input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cohx::coherence;
use cohx::conditional::{cond_entropy_with, CondEntropyKind};
use cohx::distill;
use cohx::divergence::{self, parse_alpha};
use cohx::io::{self, LoadedState};
use cohx::mc::{self, EntanglementMeasure, MaximallyCorrelated};
use cohx::optimize::OptimizerConfig;
use cohx::par::Execution;
use cohx::report::{Estimate, MeasureReport, Method};
use cohx::verify::{self, tol, Fault, Suite, VerifyConfig};
use cohx::{BipartiteState, DensityMatrix, Error, ExtReal};

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(name = "cohx", version, about = "Rényi coherence and entanglement measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one measure of a state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// c_r, c_r_alpha, c_sand_alpha, c_l1, c_log_robustness, robustness, geometric,
        /// e_mc_{relative_entropy,petz,sandwiched,log_robustness,geometric}, negativity,
        /// log_negativity, cond_entropy_{pd,pu,sd,su}, varentropy, distill
        #[arg(long)]
        measure: String,
        /// Order; the token `inf` stands for infinity.
        #[arg(long, value_parser = alpha_arg)]
        alpha: Option<f64>,
        #[arg(long, env = "COHX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Unitary `U` in the state-file format; the state becomes `UρU†`.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Second argument of the varentropy (default: the dephased state).
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// Evaluate a coherence family over a list of orders.
    Sweep {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        family: SweepFamily,
        /// Comma-separated orders, e.g. `0,0.5,1,2,inf`.
        #[arg(long, value_delimiter = ',', value_parser = alpha_arg, required = true)]
        alphas: Vec<f64>,
        #[arg(long, env = "COHX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Run randomized property suites.
    Verify {
        #[arg(long, value_parser = suite_arg, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, env = "COHX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
        /// Deliberately break a formula to check that the suites notice.
        #[arg(long, value_parser = fault_arg, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Write a state file.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Rank of a random mixed state (default: full).
        #[arg(long)]
        rank: Option<usize>,
        /// Subsystem dimensions of a tripartite state, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Angle in degrees of `cos θ|0⟩ + sin θ|1⟩`.
        #[arg(long)]
        theta: Option<f64>,
        /// Bell-basis weights, four comma-separated numbers.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long, env = "COHX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFamily {
    Petz,
    Sandwiched,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    /// Random mixed state from a Ginibre factor.
    Density,
    /// Haar-random pure state.
    Pure,
    /// Haar-random pure state on three subsystems.
    Tripartite,
    /// Maximally correlated state built from a random `dim`-dimensional state.
    Mc,
    /// Mixture of the four Bell states.
    BellDiagonal,
    /// Uniform superposition of the basis states.
    MaximallyCoherent,
    /// Real qubit pure state at angle `--theta`.
    Qubit,
}

fn alpha_arg(s: &str) -> Result<f64, String> {
    parse_alpha(s).map_err(|e| e.to_string())
}

fn suite_arg(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fault_arg(s: &str) -> Result<Fault, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn invalid_state(e: Error) -> Self {
        Self { code: 3, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::NotPsd(_) | Error::TraceMismatch(_) | Error::Io(_) => 3,
            _ => 4,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure { state, measure, alpha, seed, basis, sigma } => {
            cmd_measure(&state, &measure, alpha, seed, basis.as_deref(), sigma.as_deref())
        }
        Command::Sweep { state, family, alphas, seed, basis } => cmd_sweep(&state, family, &alphas, seed, basis.as_deref()),
        Command::Verify { suite, dim, trials, seed, sequential, inject_fault } => {
            cmd_verify(suite, dim, trials, seed, sequential, inject_fault)
        }
        Command::Generate { kind, dim, rank, dims, theta, weights, seed, out } => {
            cmd_generate(kind, dim, rank, &dims, theta, &weights, seed, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cohx: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path, basis: Option<&Path>) -> CliResult<LoadedState> {
    let state = io::load_state(path).map_err(Failure::invalid_state)?;
    let Some(b) = basis else { return Ok(state) };
    let u = io::load_unitary(b).map_err(Failure::invalid_state)?;
    let rho = state.density();
    if u.nrows() != rho.dim() {
        return Err(Failure::invalid_state(Error::InvalidInput(format!(
            "basis matrix is {0}x{0} but the state has dimension {1}",
            u.nrows(),
            rho.dim()
        ))));
    }
    let rotated = rho.rotate(&u);
    Ok(match state {
        LoadedState::Single(_) => LoadedState::Single(rotated),
        LoadedState::Bipartite(b) => {
            LoadedState::Bipartite(BipartiteState::new(rotated, b.dim_a(), b.dim_b()).map_err(Failure::invalid_state)?)
        }
    })
}

fn need_alpha(alpha: Option<f64>, measure: &str) -> CliResult<f64> {
    alpha.ok_or_else(|| Failure::usage(format!("measure {measure} needs --alpha")))
}

fn need_bipartite<'a>(state: &'a LoadedState, measure: &str) -> CliResult<&'a BipartiteState> {
    state.bipartite().ok_or_else(|| {
        Failure::from(Error::InvalidInput(format!("measure {measure} needs a state file with \"dims\"")))
    })
}

fn maximally_correlated(state: &LoadedState) -> CliResult<MaximallyCorrelated> {
    match state {
        LoadedState::Single(rho) => Ok(mc::make_mc(rho)),
        LoadedState::Bipartite(b) => {
            if let Some(m) = MaximallyCorrelated::detect(b) {
                return Ok(m);
            }
            MaximallyCorrelated::from_pure(b).map_err(|_| {
                Failure::from(Error::InvalidInput(
                    "entanglement measures need a maximally correlated or pure bipartite state".into(),
                ))
            })
        }
    }
}

fn sdp_estimate(value: f64, rho: &DensityMatrix) -> Estimate {
    let cert = coherence::robustness_certificate(rho);
    Estimate { value, method: Method::Optimizer, converged: cert.gap() <= 1e-7, config: None }
}

fn cmd_measure(
    path: &Path,
    measure: &str,
    alpha: Option<f64>,
    seed: u64,
    basis: Option<&Path>,
    sigma: Option<&Path>,
) -> CliResult<()> {
    let state = load(path, basis)?;
    let rho = state.density();
    let cfg = OptimizerConfig::with_seed(seed);
    let report = match measure {
        "c_r" => MeasureReport::new(measure, None, Estimate::closed(coherence::c_rel_entropy(rho))),
        "c_r_alpha" => {
            let a = need_alpha(alpha, measure)?;
            MeasureReport::new(measure, Some(a), coherence::c_renyi_petz_estimate(rho, a)?)
        }
        "c_sand_alpha" => {
            let a = need_alpha(alpha, measure)?;
            MeasureReport::new(measure, Some(a), coherence::c_renyi_sandwiched(rho, a, &cfg)?)
        }
        "c_l1" => MeasureReport::new(measure, None, Estimate::closed(coherence::c_l1(rho))),
        "c_log_robustness" => MeasureReport::new(measure, None, sdp_estimate(coherence::c_log_robustness(rho), rho)),
        "robustness" => MeasureReport::new(measure, None, sdp_estimate(coherence::robustness_of_coherence(rho), rho)),
        "geometric" => {
            let g = coherence::geometric_coherence(rho, &cfg)?;
            MeasureReport::new(measure, None, g.log).with_details(json!({ "linear": g.linear }))
        }
        "negativity" => MeasureReport::new(measure, None, Estimate::closed(mc::negativity(need_bipartite(&state, measure)?))),
        "log_negativity" => {
            MeasureReport::new(measure, None, Estimate::closed(mc::log_negativity(need_bipartite(&state, measure)?)))
        }
        "varentropy" => {
            let s = match sigma {
                Some(p) => io::load_state(p).map_err(Failure::invalid_state)?.density().clone(),
                None => rho.dephased_state(),
            };
            let v = divergence::relative_varentropy(rho, s.as_hermitian())?;
            MeasureReport::new(measure, None, Estimate::closed(v))
        }
        "distill" => {
            let r = distill::exact_distill_pure(rho)?;
            MeasureReport::new(measure, None, Estimate::closed(r.rate_nats))
                .with_details(json!({ "p_max": r.p_max, "length": r.length, "bounds": r.bounds }))
        }
        m if m.starts_with("cond_entropy_") => {
            let kind: CondEntropyKind = m["cond_entropy_".len()..].parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
            let a = need_alpha(alpha, measure)?;
            MeasureReport::new(measure, Some(a), cond_entropy_with(need_bipartite(&state, measure)?, a, kind, &cfg)?)
        }
        m if m.starts_with("e_mc_") => {
            let which: EntanglementMeasure =
                m["e_mc_".len()..].parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
            let a = if which.needs_alpha() { need_alpha(alpha, measure)? } else { f64::NAN };
            let out = mc::e_measure_mc(&maximally_correlated(&state)?, which, a, &cfg)?;
            let reported = which.needs_alpha().then_some(a);
            MeasureReport::new(measure, reported, out.value)
                .with_details(json!({ "minus_conditional_entropy": out.conditional, "residual": out.residual }))
        }
        other => return Err(Failure::usage(format!("unknown measure {other:?}"))),
    };
    println!("{}", report.to_json());
    Ok(())
}

fn cmd_sweep(path: &Path, family: SweepFamily, alphas: &[f64], seed: u64, basis: Option<&Path>) -> CliResult<()> {
    let state = load(path, basis)?;
    let rho = state.density();
    let cfg = OptimizerConfig::with_seed(seed);
    let mut reports = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let r = match family {
            SweepFamily::Petz => MeasureReport::new("c_r_alpha", Some(a), coherence::c_renyi_petz_estimate(rho, a)?),
            SweepFamily::Sandwiched => MeasureReport::new("c_sand_alpha", Some(a), coherence::c_renyi_sandwiched(rho, a, &cfg)?),
        };
        reports.push(r);
    }
    let tolerance = match family {
        SweepFamily::Petz => tol::MONOTONE,
        SweepFamily::Sandwiched => tol::OPTIMIZER,
    };
    let mut order: Vec<(f64, f64)> = alphas.iter().copied().zip(reports.iter().map(|r| r.value.to_f64())).collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let violation = order.windows(2).find(|w| w[1].1 < w[0].1 - tolerance);
    println!("{}", serde_json::to_string(&reports).expect("reports serialize"));
    if let Some(w) = violation {
        return Err(Failure {
            code: 1,
            message: format!("values decrease from alpha = {} to alpha = {}", ExtReal::from_f64(w[0].0), ExtReal::from_f64(w[1].0)),
        });
    }
    Ok(())
}

fn cmd_verify(suite: Suite, dim: usize, trials: usize, seed: u64, sequential: bool, fault: Option<Fault>) -> CliResult<()> {
    let mut cfg = VerifyConfig::new(dim, trials, seed);
    if sequential {
        cfg.exec = Execution::Sequential;
    }
    cfg.fault = fault;
    let report = verify::run_suite(suite, &cfg).map_err(|e| Failure::usage(e.to_string()))?;
    for c in &report.checks {
        println!("{}", serde_json::to_string(c).expect("summary serializes"));
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    println!(
        "{}",
        json!({ "suite": suite, "dim": dim, "trials": trials, "seed": seed, "passed": failed.is_empty(), "failed": failed })
    );
    if failed.is_empty() {
        return Ok(());
    }
    let detail: Vec<String> = report
        .failures()
        .map(|c| match c.first_failing_seed {
            Some(s) => format!("{} (seed {s})", c.name),
            None => c.name.clone(),
        })
        .collect();
    Err(Failure { code: 1, message: format!("failed: {}", detail.join(", ")) })
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    kind: GenerateKind,
    dim: usize,
    rank: Option<usize>,
    dims: &[usize],
    theta: Option<f64>,
    weights: &[f64],
    seed: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    let mut rng = io::seeded_rng(seed);
    let (rho, split): (DensityMatrix, Option<(usize, usize)>) = match kind {
        GenerateKind::Density => (io::random_density(dim, rank.unwrap_or(dim), &mut rng)?, None),
        GenerateKind::Pure => (io::random_pure(dim, &mut rng)?, None),
        GenerateKind::Tripartite => {
            let d: [usize; 3] = dims.try_into().map_err(|_| Failure::usage("--dims needs three values"))?;
            (io::random_tripartite_pure(d, &mut rng)?, Some((d[0], d[1] * d[2])))
        }
        GenerateKind::Mc => {
            let base = io::random_density(dim, rank.unwrap_or(dim), &mut rng)?;
            (mc::make_mc(&base).embedded().state().clone(), Some((dim, dim)))
        }
        GenerateKind::BellDiagonal => {
            let p: [f64; 4] = weights.try_into().map_err(|_| Failure::usage("--weights needs four values"))?;
            (mc::bell_diagonal(p)?.state().clone(), Some((2, 2)))
        }
        GenerateKind::MaximallyCoherent => (DensityMatrix::maximally_coherent(dim), None),
        GenerateKind::Qubit => {
            let t = theta.ok_or_else(|| Failure::usage("--kind qubit needs --theta"))?.to_radians();
            (DensityMatrix::pure_real(&[t.cos(), t.sin()])?, None)
        }
    };
    let text = io::StateFile::from_matrix(rho.matrix(), split).to_json();
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::from(Error::Io(e)))?,
        None => println!("{text}"),
    }
    Ok(())
}
