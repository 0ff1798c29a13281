//! Seeded replicate sweeps with plot-ready output.
//!
//! A sweep is described by a TOML file:
//!
//! ```toml
//! scenario = "complementary"   # constrained | spin | mixture | phase_retrieval | dynamics
//! replicates = 100
//! seed = 7                     # replicate r uses seed + r
//! output_dir = "runs/fig3"     # optional
//!
//! [state]
//! c = [[0.6, 0.0], [0.0, 0.48], [0.64, 0.0]]   # [re, im] pairs, normalized on load
//! # file = "truth.json"      # or a state file, relative to this config
//!
//! [basis]
//! kind = "oscillator"          # or "histogram"
//! s = 3                        # fitting basis; the true state is zero-padded to it
//!
//! [samples]
//! n = 200                      # coordinate samples
//! m = 200                      # momentum samples
//! directions = 200             # spin only
//! shots = 50                   # spin only
//!
//! [solver]                     # all optional
//! tol = 1e-9
//! max_iter = 10000
//! gamma = 0.5
//!
//! [constrained]
//! e_bar = 1.2                  # omit to estimate from each replicate's data
//!
//! [mixture]
//! components = [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]
//! weights = [0.5, 0.5]
//! known_division = false
//! fresh_randomness = false
//! max_rounds = 200
//!
//! [phase]
//! points = 64
//! max_iter = 500
//! ```
//!
//! Output tree (every file is a pure function of the configuration):
//!
//! * `config.toml`: the resolved configuration, without `output_dir`;
//! * `aggregate.csv`: `replicate,seed,statistic,fidelity,iterations,status`;
//! * `replicates/NNNN.json`: the estimate of each replicate;
//! * `density/NNNN_x.csv`, `density/NNNN_p.csv`: `point,true_density,estimated_density`;
//! * `summary.json`: means, medians, failure counts and the theoretical mean
//!   of the statistic where one exists.
//!
//! A replicate that fails is recorded in `aggregate.csv` and the sweep goes on;
//! only I/O errors abort it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{BasisDescriptor, BasisKind, BasisSet, Space, StateVector};
use crate::energy::{estimate_mean_energy, solve_constrained, time_gauge_fix};
use crate::exec::{self, Execution};
use crate::io::{self, pairs, EstimateJson, MixtureJson};
use crate::linalg::C64;
use crate::mixture::{
    assemble_density, density_deviation, fit_known_division, match_labels, mixture_density_on_grid,
    quasi_bayes_divide, sample_mixture, DivideConfig,
};
use crate::mle::{retrieve_from_samples, solve_mle, SolverConfig};
use crate::potential::Harmonic;
use crate::sampler::{random_directions, rng_from_seed, sample_complementary, sample_spin_with};
use crate::spin::{solve_spin_general, solve_spin_half, Spinor};
use crate::stats;
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "ROOTPSI_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Complementary,
    Constrained,
    Spin,
    Mixture,
    PhaseRetrieval,
    Dynamics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub c: Option<Vec<[f64; 2]>>,
    /// State JSON file, resolved against the config file's directory and
    /// read into `c` at load time.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub s: usize,
    pub grid_halfwidth: Option<f64>,
    pub grid_points: Option<usize>,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            kind: BasisKind::Oscillator,
            s: 3,
            grid_halfwidth: None,
            grid_points: None,
        }
    }
}

impl BasisSpec {
    pub fn descriptor(&self) -> BasisDescriptor {
        let mut d = match self.kind {
            BasisKind::Oscillator => BasisDescriptor::oscillator(self.s),
            BasisKind::Histogram => BasisDescriptor::histogram(self.s, 4.0, 1024),
        };
        if let Some(l) = self.grid_halfwidth {
            d.grid_halfwidth = l;
        }
        if let Some(g) = self.grid_points {
            d.grid_points = g;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSpec {
    pub n: usize,
    pub m: usize,
    pub directions: usize,
    pub shots: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            n: 200,
            m: 200,
            directions: 200,
            shots: 50,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub gamma: Option<f64>,
}

impl SolverSpec {
    pub fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if let Some(m) = self.max_iter {
            c.max_iter = m;
        }
        if let Some(g) = self.gamma {
            c.gamma = g;
        }
        c
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstrainedSpec {
    pub e_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixtureSpec {
    pub components: Vec<Vec<[f64; 2]>>,
    pub weights: Vec<f64>,
    pub known_division: bool,
    pub fresh_randomness: bool,
    pub max_rounds: usize,
}

impl Default for MixtureSpec {
    fn default() -> Self {
        MixtureSpec {
            components: Vec::new(),
            weights: Vec::new(),
            known_division: false,
            fresh_randomness: false,
            max_rounds: DivideConfig::default().max_rounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseSpec {
    pub points: usize,
    pub max_iter: usize,
}

impl Default for PhaseSpec {
    fn default() -> Self {
        PhaseSpec {
            points: 64,
            max_iter: 500,
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub constrained: ConstrainedSpec,
    #[serde(default)]
    pub mixture: MixtureSpec,
    #[serde(default)]
    pub phase: PhaseSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&io::read_text(path)?).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let Some(file) = cfg.state.file.take() {
            if cfg.state.c.is_some() {
                return Err(Error::Config("state.c and state.file are exclusive".into()));
            }
            let file = path.parent().map_or(file.clone(), |d| d.join(&file));
            cfg.state.c = Some(pairs(io::read_state(&file)?.coeffs()));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Explicit directory, else `$ROOTPSI_OUTPUT_DIR`, else the working directory.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.state.file.is_some() {
            return Err(Error::Config("state.file is only resolved by ExperimentConfig::load".into()));
        }
        if self.basis.s == 0 {
            return Err(Error::Config("basis.s must be at least 1".into()));
        }
        self.solver.config().validate().map_err(|e| Error::Config(e.to_string()))?;
        let need_state = matches!(
            self.scenario,
            Scenario::Complementary | Scenario::Constrained | Scenario::Spin | Scenario::PhaseRetrieval
        );
        if need_state {
            let c = self.state.c.as_ref().ok_or_else(|| Error::Config("state.c is required".into()))?;
            if self.scenario != Scenario::Spin && c.len() > self.basis.s {
                return Err(Error::Config(format!(
                    "state has {} components but basis.s is {}",
                    c.len(),
                    self.basis.s
                )));
            }
        }
        if self.scenario == Scenario::Mixture {
            let m = &self.mixture;
            if m.components.is_empty() || m.components.len() != m.weights.len() {
                return Err(Error::Config("mixture needs matching components and weights".into()));
            }
            if m.components.iter().any(|c| c.len() > self.basis.s) {
                return Err(Error::Config("a mixture component is longer than basis.s".into()));
            }
        }
        if self.scenario == Scenario::PhaseRetrieval && self.phase.points < 4 {
            return Err(Error::Config("phase.points must be at least 4".into()));
        }
        Ok(())
    }
}

/// One line of `aggregate.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub seed: u64,
    pub statistic: Option<f64>,
    pub fidelity: Option<f64>,
    pub iterations: Option<usize>,
    pub status: String,
}

impl ReplicateRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: Scenario,
    pub replicates: usize,
    pub failures: usize,
    pub nonconverged: usize,
    pub mean_statistic: Option<f64>,
    pub median_statistic: Option<f64>,
    /// Large-sample mean of the statistic, where the theory gives one.
    pub expected_mean: Option<f64>,
    pub mean_fidelity: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub rows: Vec<ReplicateRow>,
    pub summary: Summary,
}

type DensityTable = Vec<[f64; 3]>;

struct Outcome {
    row: ReplicateRow,
    result: Option<serde_json::Value>,
    densities: Option<(DensityTable, DensityTable)>,
    nonconverged: bool,
}

fn padded(c: &[[f64; 2]], s: usize) -> Result<StateVector> {
    let mut v = io::from_pairs(c);
    v.resize(s, C64::new(0.0, 0.0));
    StateVector::new(v)
}

fn density_table(basis: &BasisSet, truth: &[f64], est: &[f64]) -> DensityTable {
    basis
        .grid()
        .iter()
        .zip(truth.iter().zip(est))
        .map(|(&x, (&t, &e))| [x, t, e])
        .collect()
}

fn state_densities(basis: &BasisSet, truth: &StateVector, est: &StateVector) -> Result<(DensityTable, DensityTable)> {
    let tx = basis.density_on_grid(truth, Space::Coordinate)?;
    let ex = basis.density_on_grid(est, Space::Coordinate)?;
    let tp = basis.density_on_grid(truth, Space::Momentum)?;
    let ep = basis.density_on_grid(est, Space::Momentum)?;
    Ok((density_table(basis, &tx, &ex), density_table(basis, &tp, &ep)))
}

struct Context {
    cfg: ExperimentConfig,
    basis: Option<BasisSet>,
    solver: SolverConfig,
}

fn run_replicate(ctx: &Context, r: usize) -> Outcome {
    let seed = ctx.cfg.seed.wrapping_add(r as u64);
    let mut row = ReplicateRow {
        replicate: r,
        seed,
        statistic: None,
        fidelity: None,
        iterations: None,
        status: "ok".into(),
    };
    match replicate_body(ctx, seed, &mut row) {
        Ok((result, densities)) => Outcome {
            row,
            result: Some(result),
            densities,
            nonconverged: false,
        },
        Err(e) => {
            let nonconverged = matches!(e, Error::NonConvergence { .. });
            row.status = format!("error: {e}");
            Outcome {
                row,
                result: None,
                densities: None,
                nonconverged,
            }
        }
    }
}

type Body = (serde_json::Value, Option<(DensityTable, DensityTable)>);

fn replicate_body(ctx: &Context, seed: u64, row: &mut ReplicateRow) -> Result<Body> {
    let cfg = &ctx.cfg;
    let s = cfg.basis.s;
    let state_c = || cfg.state.c.as_deref().unwrap_or(&[]);
    match cfg.scenario {
        Scenario::Complementary | Scenario::Constrained => {
            let basis = ctx.basis.as_ref().expect("basis built for this scenario");
            let truth = padded(state_c(), s)?;
            let data = sample_complementary(basis, &truth, cfg.samples.n, cfg.samples.m, seed)?;
            let total = data.total() as f64;
            if cfg.scenario == Scenario::Complementary {
                let est = solve_mle(&data, basis, &ctx.solver)?;
                let f = est.state.fidelity(&truth);
                row.fidelity = Some(f);
                row.statistic = Some(total * (1.0 - f));
                row.iterations = Some(est.iterations);
                let dens = state_densities(basis, &truth, &est.state)?;
                Ok((serde_json::to_value(EstimateJson::from(&est))?, Some(dens)))
            } else {
                let e_bar = match cfg.constrained.e_bar {
                    Some(e) => e,
                    None => estimate_mean_energy(&data, &Harmonic::default())?,
                };
                let est = solve_constrained(&data, basis, e_bar, &ctx.solver)?;
                let (aligned, _) = time_gauge_fix(&est.state, &truth, basis.energies())?;
                let f = aligned.fidelity(&truth);
                row.fidelity = Some(f);
                row.statistic = Some(total * (1.0 - f));
                row.iterations = Some(est.iterations);
                let dens = state_densities(basis, &truth, &est.state)?;
                Ok((serde_json::to_value(io::ConstrainedJson::from(&est))?, Some(dens)))
            }
        }
        Scenario::Spin => {
            let truth = Spinor::new(io::from_pairs(state_c()))?;
            let mut rng = rng_from_seed(seed);
            let dirs = random_directions(cfg.samples.directions, &mut rng);
            let counts = sample_spin_with(&truth.c, &dirs, cfg.samples.shots, &mut rng)?;
            let est = if truth.two_j == 1 {
                solve_spin_half(&counts, &ctx.solver)?
            } else {
                solve_spin_general(&counts, &ctx.solver)?
            };
            let f = est.state.fidelity(&truth.state());
            row.fidelity = Some(f);
            row.statistic = Some(counts.total() as f64 * (1.0 - f));
            row.iterations = Some(est.iterations);
            let spinor = Spinor::new(est.state.coeffs().to_vec())?;
            let mut v = serde_json::to_value(EstimateJson::from(&est))?;
            v["j"] = serde_json::json!(spinor.j());
            Ok((v, None))
        }
        Scenario::Mixture => {
            let basis = ctx.basis.as_ref().expect("basis built for this scenario");
            let m = &cfg.mixture;
            let comps = m.components.iter().map(|c| padded(c, s)).collect::<Result<Vec<_>>>()?;
            let (data, labels) = sample_mixture(basis, &comps, &m.weights, cfg.samples.n, cfg.samples.m, seed)?;
            let dcfg = DivideConfig {
                seed,
                max_rounds: m.max_rounds,
                fresh_randomness: m.fresh_randomness,
                solver: ctx.solver.clone(),
                exec: Execution::Sequential,
                ..Default::default()
            };
            let model = if m.known_division {
                fit_known_division(&data, &labels, comps.len(), basis, &dcfg)?
            } else {
                quasi_bayes_divide(&data, comps.len(), basis, &dcfg)?
            };
            let truth_rho = assemble_density(&comps, &m.weights)?;
            let est_rho = model.density()?;
            let perm = match_labels(&model.components, &comps)?;
            let mean_f = perm
                .iter()
                .enumerate()
                .map(|(i, &e)| model.components[e].fidelity(&comps[i]))
                .sum::<f64>()
                / comps.len() as f64;
            row.statistic = Some(density_deviation(&est_rho.rho, &truth_rho.rho)?);
            row.fidelity = Some(mean_f);
            row.iterations = Some(model.rounds);
            let truth_model = crate::mixture::MixtureModel {
                components: comps.clone(),
                weights: m.weights.clone(),
                assignment: Vec::new(),
                history: Vec::new(),
                rounds: 0,
                converged: true,
                cycle: None,
                loglik: 0.0,
            };
            let table = |space| -> Result<DensityTable> {
                let t = mixture_density_on_grid(&truth_model, basis, space)?;
                let e = mixture_density_on_grid(&model, basis, space)?;
                Ok(density_table(basis, &t, &e))
            };
            let dens = (table(Space::Coordinate)?, table(Space::Momentum)?);
            Ok((serde_json::to_value(MixtureJson::from(&model))?, Some(dens)))
        }
        Scenario::PhaseRetrieval => {
            let basis = ctx.basis.as_ref().expect("basis built for this scenario");
            let truth = padded(state_c(), s)?;
            let data = sample_complementary(basis, &truth, cfg.samples.n, cfg.samples.m, seed)?;
            let (grid, out) = retrieve_from_samples(&data, cfg.phase.points, cfg.phase.max_iter)?;
            let dx = grid[1] - grid[0];
            let mut t: Vec<C64> = grid
                .iter()
                .map(|&x| crate::basis::contract(&basis.coord_row(x), truth.coeffs()))
                .collect();
            crate::linalg::normalize(&mut t);
            // The conjugate mirror image has the same two moduli; score the better twin.
            let twin: Vec<C64> = out.psi.iter().rev().map(|z| z.conj()).collect();
            let f = crate::linalg::fidelity(&t, &out.psi).max(crate::linalg::fidelity(&t, &twin));
            row.fidelity = Some(f);
            row.statistic = out.errors.last().copied();
            row.iterations = Some(out.errors.len());
            let tx: Vec<f64> = t.iter().map(|z| z.norm_sqr() / dx).collect();
            let ex: Vec<f64> = out.psi.iter().map(|z| z.norm_sqr() / dx).collect();
            let table: DensityTable = grid.iter().zip(tx.iter().zip(&ex)).map(|(&x, (&a, &b))| [x, a, b]).collect();
            let tp: Vec<f64> = grid
                .iter()
                .map(|&p| crate::basis::contract(&basis.mom_row(p), truth.coeffs()).norm_sqr())
                .collect();
            let ep: Vec<f64> = crate::basis::centered_fourier(&out.psi)
                .iter()
                .map(|z| z.norm_sqr() / dx)
                .collect();
            let ptable: DensityTable = grid.iter().zip(tp.iter().zip(&ep)).map(|(&x, (&a, &b))| [x, a, b]).collect();
            let v = serde_json::json!({ "psi": pairs(&out.psi), "errors": out.errors });
            Ok((v, Some((table, ptable))))
        }
        Scenario::Dynamics => {
            let basis = ctx.basis.as_ref().expect("basis built for this scenario");
            let rep = crate::dynamics::dynamics_report(basis, &Harmonic::default(), "harmonic")?;
            row.statistic = Some(rep.residual);
            row.iterations = Some(0);
            Ok((serde_json::to_value(rep)?, None))
        }
    }
}

fn expected_mean(cfg: &ExperimentConfig) -> Option<f64> {
    let s = cfg.basis.s as f64;
    match cfg.scenario {
        Scenario::Complementary => Some(s - 1.0),
        Scenario::Constrained => Some(s - 2.0),
        Scenario::Spin => cfg.state.c.as_ref().map(|c| (c.len() - 1) as f64),
        Scenario::Mixture => Some(crate::mixture::expected_density_deviation(
            cfg.basis.s,
            (cfg.samples.n + cfg.samples.m) as f64,
        )),
        Scenario::PhaseRetrieval | Scenario::Dynamics => None,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn write_table(path: &Path, table: &DensityTable) -> Result<()> {
    let mut out = String::from("point,true_density,estimated_density\n");
    for [x, t, e] in table {
        out.push_str(&format!("{x},{t},{e}\n"));
    }
    io::write_text(path, &out)
}

fn aggregate_csv(rows: &[ReplicateRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(["replicate", "seed", "statistic", "fidelity", "iterations", "status"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.replicate.to_string(),
            r.seed.to_string(),
            opt(r.statistic),
            opt(r.fidelity),
            r.iterations.map_or(String::new(), |i| i.to_string()),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs every replicate and writes the output tree.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let basis = match cfg.scenario {
        Scenario::Spin => None,
        _ => Some(cfg.basis.descriptor().build()?),
    };
    let ctx = Context {
        cfg: cfg.clone(),
        basis,
        solver: cfg.solver.config(),
    };
    let outcomes = exec::map_indexed(cfg.replicates, exec, |r| run_replicate(&ctx, r));

    let dir = cfg.resolved_output_dir();
    // The tree location is left out so that relocated runs compare equal.
    let echo = ExperimentConfig {
        output_dir: None,
        ..cfg.clone()
    };
    io::write_text(&dir.join("config.toml"), &echo.to_toml()?)?;
    for o in &outcomes {
        let r = o.row.replicate;
        let mut doc = serde_json::json!({
            "replicate": r,
            "seed": o.row.seed,
            "status": o.row.status,
        });
        if let Some(v) = &o.result {
            doc["result"] = v.clone();
        }
        io::write_json(&dir.join(format!("replicates/{r:04}.json")), &doc)?;
        if let Some((x, p)) = &o.densities {
            write_table(&dir.join(format!("density/{r:04}_x.csv")), x)?;
            write_table(&dir.join(format!("density/{r:04}_p.csv")), p)?;
        }
    }
    let rows: Vec<ReplicateRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    io::write_text(&dir.join("aggregate.csv"), &aggregate_csv(&rows)?)?;

    let stat: Vec<f64> = rows.iter().filter_map(|r| r.statistic).collect();
    let fid: Vec<f64> = rows.iter().filter_map(|r| r.fidelity).collect();
    let summary = Summary {
        scenario: cfg.scenario,
        replicates: cfg.replicates,
        failures: rows.iter().filter(|r| !r.is_ok()).count(),
        nonconverged: outcomes.iter().filter(|o| o.nonconverged).count(),
        mean_statistic: (!stat.is_empty()).then(|| stats::mean(&stat)),
        median_statistic: (!stat.is_empty()).then(|| stats::median(&stat)),
        expected_mean: expected_mean(cfg),
        mean_fidelity: (!fid.is_empty()).then(|| stats::mean(&fid)),
    };
    io::write_json(&dir.join("summary.json"), &summary)?;
    Ok(ExperimentReport {
        output_dir: dir,
        rows,
        summary,
    })
}
