//! Subcommand implementations. Each writes one output file (JSON or CSV) and
//! prints a one-line summary to stdout.

use std::path::{Path, PathBuf};

use clap::Args;
use rootpsi::basis::{BasisSet, StateVector};
use rootpsi::energy::{estimate_mean_energy, solve_constrained};
use rootpsi::exec::Execution;
use rootpsi::experiment::{run_experiment, ExperimentConfig, OUTPUT_DIR_ENV};
use rootpsi::io::{self, pairs, ConstrainedJson, EstimateJson, MixtureJson};
use rootpsi::mixture::{info_report, quasi_bayes_divide, DivideConfig};
use rootpsi::mle::{chisq_fidelity, retrieve_from_samples, solve_mle, EstimateResult};
use rootpsi::potential::Harmonic;
use rootpsi::sampler::{random_directions, rng_from_seed, sample_complementary, sample_spin_with};
use rootpsi::spin::{solve_spin_general, solve_spin_half, Spinor};
use rootpsi::stats::{goodness_of_fit, HalfChiSquared};
use rootpsi::Error;
use serde::{Deserialize, Serialize};

use crate::settings::{is_false, output_path, require, BasisArgs, SolverArgs};
use crate::CliError;

pub struct Context {
    pub output_dir: Option<PathBuf>,
    pub strict: bool,
    pub sequential: bool,
}

impl Context {
    /// `--output-dir`, else `$ROOTPSI_OUTPUT_DIR`, else the working directory.
    pub fn dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Turns a non-convergence into exit code 3 under `--strict`, otherwise
    /// into a warning and the best iterate.
    fn settle<T>(&self, r: rootpsi::Result<T>) -> Result<Result<T, NotConverged>, CliError> {
        match r {
            Ok(v) => Ok(Ok(v)),
            Err(Error::NonConvergence {
                iterations,
                last_step,
                best,
            }) => {
                let msg = format!("solver did not converge after {iterations} iterations (last step {last_step:.3e})");
                if self.strict {
                    return Err(CliError::NonConvergence(msg));
                }
                log::warn!("{msg}; writing the best iterate");
                Ok(Err(NotConverged {
                    c: pairs(&best),
                    converged: false,
                    iterations,
                    last_step,
                }))
            }
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Debug, Serialize)]
struct NotConverged {
    c: Vec<[f64; 2]>,
    converged: bool,
    iterations: usize,
    last_step: f64,
}

fn build_basis(args: &BasisArgs, default_s: usize) -> Result<BasisSet, CliError> {
    Ok(args.descriptor(default_s)?.build()?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    io::write_json(path, value).map_err(CliError::from)
}

// ---------------------------------------------------------------- sample

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    /// State JSON (`{"c": [[re, im], ...]}`).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Draw a random state of this dimension instead of reading one.
    #[arg(long, conflicts_with = "state")]
    pub random_state: Option<usize>,
    /// Write spin projection counts instead of coordinate/momentum samples.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub spin: bool,
    /// Coordinate samples.
    #[arg(short, long)]
    pub n: Option<usize>,
    /// Momentum samples.
    #[arg(short, long)]
    pub m: Option<usize>,
    /// Spin measurement directions.
    #[arg(long)]
    pub directions: Option<usize>,
    /// Shots per direction.
    #[arg(long)]
    pub shots: Option<u64>,
    /// RNG seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub basis: BasisArgs,
    /// Output CSV [default: samples.csv or counts.csv].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

pub fn sample(ctx: &Context, a: SampleArgs) -> Result<(), CliError> {
    let seed = a.seed.unwrap_or(0);
    let mut rng = rng_from_seed(seed);
    let state = match (&a.state, a.random_state) {
        (Some(p), _) => io::read_state(p)?,
        (None, Some(s)) if s >= 1 => StateVector::random(s, &mut rng),
        (None, Some(_)) => return Err(CliError::Usage("--random-state must be at least 1".into())),
        (None, None) => return Err(CliError::Usage("missing --state or --random-state".into())),
    };
    if a.spin {
        let dirs = random_directions(a.directions.unwrap_or(200), &mut rng);
        let counts = sample_spin_with(state.coeffs(), &dirs, a.shots.unwrap_or(50), &mut rng)?;
        let path = output_path(&ctx.dir(), a.out.as_ref(), "counts.csv");
        io::write_spin_counts(&path, &counts)?;
        println!("wrote {} directions x {} shots to {}", dirs.len(), a.shots.unwrap_or(50), path.display());
        return Ok(());
    }
    let s = a.basis.s.unwrap_or(state.len());
    if state.len() > s {
        return Err(CliError::Usage(format!("state has {} components but --s is {s}", state.len())));
    }
    let basis = build_basis(&a.basis, s)?;
    let mut c = state.into_coeffs();
    c.resize(s, rootpsi::C64::new(0.0, 0.0));
    let state = StateVector::new(c)?;
    let set = sample_complementary(&basis, &state, a.n.unwrap_or(200), a.m.unwrap_or(200), seed)?;
    let path = output_path(&ctx.dir(), a.out.as_ref(), "samples.csv");
    io::write_samples(&path, &set)?;
    println!("wrote n={} m={} to {}", set.n(), set.m(), path.display());
    Ok(())
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Sample CSV (`space,value`).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Output JSON [default: estimate.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn summary_line(est: &EstimateResult, path: &Path) {
    println!(
        "converged in {} iterations, loglik {:.6}, residual {:.3e}; wrote {}",
        est.iterations,
        est.loglik,
        est.residual,
        path.display()
    );
}

pub fn estimate(ctx: &Context, a: EstimateArgs) -> Result<(), CliError> {
    let data = io::read_samples(&require(a.samples.clone(), "samples")?)?;
    let basis = build_basis(&a.basis, 3)?;
    let cfg = a.solver.config()?;
    let path = output_path(&ctx.dir(), a.out.as_ref(), "estimate.json");
    match ctx.settle(solve_mle(&data, &basis, &cfg))? {
        Ok(est) => {
            write_json(&path, &EstimateJson::from(&est))?;
            summary_line(&est, &path);
        }
        Err(best) => write_json(&path, &best)?,
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConstrainedArgs {
    /// Sample CSV (`space,value`).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Target mean energy [default: estimated from the samples].
    #[arg(long)]
    pub e_bar: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Output JSON [default: constrained.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

pub fn estimate_constrained(ctx: &Context, a: ConstrainedArgs) -> Result<(), CliError> {
    let data = io::read_samples(&require(a.samples.clone(), "samples")?)?;
    let basis = build_basis(&a.basis, 3)?;
    let cfg = a.solver.config()?;
    let e_bar = match a.e_bar {
        Some(e) => e,
        None => estimate_mean_energy(&data, &Harmonic::default())?,
    };
    let path = output_path(&ctx.dir(), a.out.as_ref(), "constrained.json");
    match ctx.settle(solve_constrained(&data, &basis, e_bar, &cfg))? {
        Ok(est) => {
            write_json(&path, &ConstrainedJson::from(&est))?;
            println!(
                "e_bar {:.6}, lambda1 {:.6}, lambda2 {:.6}, {} iterations; wrote {}",
                est.e_bar,
                est.lambda1,
                est.lambda2,
                est.iterations,
                path.display()
            );
        }
        Err(best) => write_json(&path, &best)?,
    }
    Ok(())
}

// ---------------------------------------------------------------- phase-retrieve

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhaseArgs {
    /// Sample CSV (`space,value`).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Grid points; the spacing is sqrt(2 pi / points).
    #[arg(long)]
    pub points: Option<usize>,
    /// Projection rounds
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output JSON [default: phase.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PhaseJson {
    grid: Vec<f64>,
    psi: Vec<[f64; 2]>,
    errors: Vec<f64>,
}

pub fn phase_retrieve(ctx: &Context, a: PhaseArgs) -> Result<(), CliError> {
    let data = io::read_samples(&require(a.samples.clone(), "samples")?)?;
    let points = a.points.unwrap_or(64);
    if points < 4 {
        return Err(CliError::Usage("--points must be at least 4".into()));
    }
    let (grid, out) = retrieve_from_samples(&data, points, a.max_iter.unwrap_or(500))?;
    let path = output_path(&ctx.dir(), a.out.as_ref(), "phase.json");
    let last = out.errors.last().copied().unwrap_or(0.0);
    write_json(
        &path,
        &PhaseJson {
            grid,
            psi: pairs(&out.psi),
            errors: out.errors,
        },
    )?;
    println!("final momentum mismatch {last:.3e}; wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------- spin-estimate

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpinEstimateArgs {
    /// Count CSV (`theta,phi,outcome,count`).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Output JSON [default: spin_estimate.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SpinEstimateJson {
    j: f64,
    #[serde(flatten)]
    estimate: EstimateJson,
}

pub fn spin_estimate(ctx: &Context, a: SpinEstimateArgs) -> Result<(), CliError> {
    let counts = io::read_spin_counts(&require(a.counts.clone(), "counts")?)?;
    let cfg = a.solver.config()?;
    let fit = if counts.two_j == 1 {
        solve_spin_half(&counts, &cfg)
    } else {
        solve_spin_general(&counts, &cfg)
    };
    let path = output_path(&ctx.dir(), a.out.as_ref(), "spin_estimate.json");
    match ctx.settle(fit)? {
        Ok(est) => {
            let spinor = Spinor::new(est.state.coeffs().to_vec())?;
            write_json(
                &path,
                &SpinEstimateJson {
                    j: spinor.j(),
                    estimate: EstimateJson::from(&est),
                },
            )?;
            summary_line(&est, &path);
        }
        Err(best) => write_json(&path, &best)?,
    }
    Ok(())
}

// ---------------------------------------------------------------- mixture-divide

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MixtureArgs {
    /// Sample CSV (`space,value`).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Number of components.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Seed of the random division vector [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Division rounds before giving up on a fixed point.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Draw a new random vector every round.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub fresh_randomness: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Output JSON [default: mixture.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

pub fn mixture_divide(ctx: &Context, a: MixtureArgs) -> Result<(), CliError> {
    let data = io::read_samples(&require(a.samples.clone(), "samples")?)?;
    let basis = build_basis(&a.basis, 3)?;
    let k = a.k.unwrap_or(2);
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let mut cfg = DivideConfig {
        seed: a.seed.unwrap_or(0),
        fresh_randomness: a.fresh_randomness,
        solver: a.solver.config()?,
        exec: ctx.exec(),
        ..Default::default()
    };
    if let Some(r) = a.max_rounds {
        cfg.max_rounds = r;
    }
    let model = quasi_bayes_divide(&data, k, &basis, &cfg)?;
    if !model.converged {
        let msg = format!("division did not settle in {} rounds", model.rounds);
        if ctx.strict {
            return Err(CliError::NonConvergence(msg));
        }
        log::warn!("{msg}; writing the best round");
    }
    let info = info_report(&model, &basis)?;
    let mut doc = serde_json::to_value(MixtureJson::from(&model)).map_err(Error::from)?;
    doc["info"] = serde_json::to_value(info).map_err(Error::from)?;
    let path = output_path(&ctx.dir(), a.out.as_ref(), "mixture.json");
    write_json(&path, &doc)?;
    println!(
        "weights {:?}, {} rounds, I_mix {:.4}; wrote {}",
        model.weights,
        model.rounds,
        info.i_mix,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- chisq

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ChisqArgs {
    /// Estimated state (any JSON with a `c` field).
    #[arg(long, requires = "truth")]
    pub estimate: Option<PathBuf>,
    /// Reference state.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Sample size N in N (1 - F) [default: read from `--samples`].
    #[arg(long)]
    pub particles: Option<f64>,
    /// Sample CSV whose size gives N.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Aggregate CSV to test against the half chi-square law instead.
    #[arg(long, conflicts_with = "estimate")]
    pub aggregate: Option<PathBuf>,
    /// Degrees of freedom of the doubled statistic for `--aggregate`.
    #[arg(long)]
    pub dof: Option<usize>,
    /// Equiprobable cells for `--aggregate`.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Output JSON [default: chisq.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn read_statistics(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = io::read_text(path)?;
    let parse = |line: u64, message: String| {
        CliError::Data(Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })
    };
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| parse(1, e.to_string()))?.clone();
    let col = headers
        .iter()
        .position(|h| h == "statistic")
        .ok_or_else(|| parse(1, "missing column `statistic`".into()))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = rec.get(col).unwrap_or("");
        if field.is_empty() {
            continue; // failed replicate
        }
        out.push(field.parse().map_err(|e| parse(line, format!("statistic {field:?}: {e}")))?);
    }
    Ok(out)
}

pub fn chisq(ctx: &Context, a: ChisqArgs) -> Result<(), CliError> {
    let path = output_path(&ctx.dir(), a.out.as_ref(), "chisq.json");
    if let Some(agg) = &a.aggregate {
        let dof = require(a.dof, "dof")?;
        if dof == 0 {
            return Err(CliError::Usage("--dof must be at least 1".into()));
        }
        let stats = read_statistics(agg)?;
        let law = HalfChiSquared::new(dof);
        let fit = goodness_of_fit(&stats, a.bins.unwrap_or(6), |q| law.quantile(q))?;
        let mean = rootpsi::stats::mean(&stats);
        let doc = serde_json::json!({
            "count": stats.len(),
            "mean": mean,
            "expected_mean": law.mean(),
            "goodness_of_fit": fit,
        });
        write_json(&path, &doc)?;
        println!(
            "mean {mean:.4} (expected {:.4}); Pearson {:.3} on {} dof, p = {:.4}",
            law.mean(),
            fit.statistic,
            fit.dof,
            fit.pvalue
        );
        return Ok(());
    }
    let est = io::read_state(&require(a.estimate.clone(), "estimate or --aggregate")?)?;
    let truth = io::read_state(&require(a.truth.clone(), "truth")?)?;
    let n = match (a.particles, &a.samples) {
        (Some(n), _) => n,
        (None, Some(p)) => io::read_samples(p)?.total() as f64,
        (None, None) => return Err(CliError::Usage("missing --particles or --samples".into())),
    };
    let report = chisq_fidelity(&est, &truth, n)?;
    write_json(&path, &report)?;
    println!(
        "statistic {:.4} on {} dof, p = {:.4}",
        report.statistic, report.dof, report.pvalue
    );
    Ok(())
}

// ---------------------------------------------------------------- dynamics-check

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DynamicsArgs {
    /// Oscillator frequency of the potential.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Residual below which the check passes.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub basis: BasisArgs,
    /// Output JSON [default: dynamics.json].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

pub fn dynamics_check(ctx: &Context, a: DynamicsArgs) -> Result<(), CliError> {
    let basis = build_basis(&a.basis, 20)?;
    let omega = a.omega.unwrap_or(1.0);
    let tol = a.tolerance.unwrap_or(1e-6);
    let report = rootpsi::dynamics::dynamics_report(&basis, &Harmonic { omega }, &format!("harmonic(omega={omega})"))?;
    let passes = report.residual < tol;
    let mut doc = serde_json::to_value(&report).map_err(Error::from)?;
    doc["tolerance"] = serde_json::json!(tol);
    doc["passes"] = serde_json::json!(passes);
    let path = output_path(&ctx.dir(), a.out.as_ref(), "dynamics.json");
    write_json(&path, &doc)?;
    println!(
        "residual {:.3e} ({}); wrote {}",
        report.residual,
        if passes { "pass" } else { "fail" },
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- experiment

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExperimentArgs {
    /// Experiment description (TOML).
    pub file: Option<PathBuf>,
    /// Replicate count, overriding the file
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Base seed, overriding the file; replicate r uses seed + r
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn experiment(ctx: &Context, a: ExperimentArgs) -> Result<(), CliError> {
    let file = require(a.file.clone(), "file")?;
    let mut cfg = ExperimentConfig::load(&file).map_err(|e| match e {
        Error::Io { .. } => CliError::Usage(e.to_string()),
        other => other.into(),
    })?;
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(dir) = &ctx.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    let report = run_experiment(&cfg, ctx.exec())?;
    let s = &report.summary;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    println!(
        "{} replicates, {} failed; mean statistic {} (expected {}); wrote {}",
        s.replicates,
        s.failures,
        fmt(s.mean_statistic),
        fmt(s.expected_mean),
        report.output_dir.display()
    );
    if ctx.strict && s.nonconverged > 0 {
        return Err(CliError::NonConvergence(format!("{} replicates did not converge", s.nonconverged)));
    }
    Ok(())
}
