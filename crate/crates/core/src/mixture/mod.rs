//! Division of an inhomogeneous sample into pure components.
//!
//! The sample is modelled as `p(x) = sum_i f_i p_i(x)` with every `p_i` a root
//! density. [`quasi_bayes_divide`] alternates three steps:
//!
//! 1. each point goes to component `i` at random with posterior probability
//!    `f_i p_i(x) / sum_j f_j p_j(x)`;
//! 2. `f_i = n_i / n`;
//! 3. every component is re-estimated by maximum likelihood on its own points.
//!
//! With `fresh_randomness = false` the uniform variate of each point is drawn
//! once and reused, so the assignment is a deterministic function of the model
//! and the iteration settles on an exactly repeating configuration (a fixed
//! point or a short cycle, detected by comparing whole assignments). With fresh
//! draws every round the model keeps fluctuating at the sampling-noise level and
//! the run stops on the weight/fidelity criterion or after `max_rounds`.
//!
//! Points are indexed coordinate samples first, then momentum samples.

mod density;
mod info;

pub use density::{
    assemble_density, density_deviation, density_from_rho, density_loglik, expected_density_deviation,
    pauli_decompose, pauli_matrices, psi_row_density, DensityMatrix, PauliCoefficients, WEIGHT_TOL,
};
pub use info::{
    info_from_densities, info_report, info_report_in, pointwise_mixing_gap, shannon_entropy, InfoReport,
};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisSet, Space, StateVector};
use crate::exec::{self, Execution};
use crate::linalg::CMatrix;
use crate::mle::{solve_design, DesignModel, Init, SolverConfig};
use crate::sampler::{rng_from_seed, InverseCdf, SampleSet};
use crate::{Error, Result};

/// Largest `k` supported by exhaustive label matching.
pub const MAX_MATCH_COMPONENTS: usize = 5;

/// Fraction of worst-explained points handed to a starved component.
const RESEED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct DivideConfig {
    pub seed: u64,
    pub max_rounds: usize,
    pub fresh_randomness: bool,
    /// Largest weight change across a round that counts as settled.
    pub weight_tol: f64,
    /// Largest per-component `1 - F(old, new)` that counts as settled.
    pub fidelity_tol: f64,
    pub solver: SolverConfig,
    pub exec: Execution,
}

impl Default for DivideConfig {
    fn default() -> Self {
        DivideConfig {
            seed: 0,
            max_rounds: 200,
            fresh_randomness: false,
            weight_tol: 1e-4,
            fidelity_tol: 1e-6,
            solver: SolverConfig::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub weights: Vec<f64>,
    pub loglik: f64,
}

#[derive(Debug, Clone)]
pub struct MixtureModel {
    pub components: Vec<StateVector>,
    pub weights: Vec<f64>,
    /// Component of every point, coordinate samples first.
    pub assignment: Vec<usize>,
    pub history: Vec<RoundRecord>,
    pub rounds: usize,
    pub converged: bool,
    /// Period of the repeating assignment, when one was detected (1 = fixed point).
    pub cycle: Option<usize>,
    /// Mixture log-likelihood `sum_k ln sum_i f_i p_i(x_k)`.
    pub loglik: f64,
}

impl MixtureModel {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        assemble_density(&self.components, &self.weights)
    }

    /// Point counts per component.
    pub fn counts(&self) -> Vec<usize> {
        counts(&self.assignment, self.k())
    }
}

fn counts(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut n = vec![0; k];
    for &a in assignment {
        n[a] += 1;
    }
    n
}

fn weights_of(n: &[usize]) -> Vec<f64> {
    let total: usize = n.iter().sum();
    n.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Component densities `|a_k . c_i|^2`, one vector per component.
fn point_densities(rows: &CMatrix, components: &[StateVector]) -> Vec<Vec<f64>> {
    components
        .iter()
        .map(|c| {
            let v = rows * nalgebra::DVector::from_column_slice(c.coeffs());
            v.iter().map(|a| a.norm_sqr()).collect()
        })
        .collect()
}

fn mixture_loglik(dens: &[Vec<f64>], weights: &[f64]) -> f64 {
    let n = dens.first().map_or(0, Vec::len);
    (0..n)
        .map(|t| {
            let p: f64 = weights.iter().zip(dens).map(|(f, d)| f * d[t]).sum();
            p.max(f64::MIN_POSITIVE).ln()
        })
        .sum()
}

/// Maximum-likelihood fit on the rows selected by `mask`, warm-started at `prev`.
fn fit_component(rows: &CMatrix, mask: Vec<f64>, prev: Option<&StateVector>, cfg: &SolverConfig) -> Result<StateVector> {
    let model = DesignModel::new(rows.clone(), mask)?;
    let attempt = |init: Init| -> Result<StateVector> {
        let cfg = cfg.clone().with_init(init);
        match solve_design(&model, &cfg) {
            Ok(r) => Ok(r.state),
            Err(Error::NonConvergence { best, .. }) => {
                log::warn!("component fit stopped at the iteration limit; using the best iterate");
                StateVector::new(best)
            }
            Err(e) => Err(e),
        }
    };
    match prev {
        Some(p) => attempt(Init::Given(p.coeffs().to_vec())).or_else(|_| attempt(Init::Auto)),
        None => attempt(Init::Auto),
    }
}

fn fit_all(
    rows: &CMatrix,
    assignment: &[usize],
    prev: Option<&[StateVector]>,
    cfg: &DivideConfig,
    k: usize,
) -> Result<Vec<StateVector>> {
    exec::map_indexed(k, cfg.exec, |i| {
        let mask: Vec<f64> = assignment.iter().map(|&a| if a == i { 1.0 } else { 0.0 }).collect();
        fit_component(rows, mask, prev.map(|p| &p[i]), &cfg.solver)
    })
    .into_iter()
    .collect()
}

/// Hands the worst-explained points to every empty component.
fn reseed_starved(assignment: &mut [usize], dens: &[Vec<f64>], weights: &[f64], k: usize) {
    let n = assignment.len();
    let take = ((n as f64 * RESEED_FRACTION).ceil() as usize).max(1);
    for i in 0..k {
        if counts(assignment, k)[i] > 0 {
            continue;
        }
        let mut order: Vec<usize> = (0..n).collect();
        let lik = |t: usize| -> f64 { weights.iter().zip(dens).map(|(f, d)| f * d[t]).sum() };
        order.sort_by(|&a, &b| lik(a).total_cmp(&lik(b)));
        let mut n_now = counts(assignment, k);
        let mut moved = 0;
        for &t in &order {
            if moved == take {
                break;
            }
            // Never empty another component while feeding this one.
            if n_now[assignment[t]] > 1 {
                n_now[assignment[t]] -= 1;
                assignment[t] = i;
                moved += 1;
            }
        }
        log::warn!("component {i} lost all points; reseeded from {moved} worst-explained points");
    }
}

/// Fits every component on its a-priori-known points; weights are the point fractions.
pub fn fit_known_division(
    samples: &SampleSet,
    labels: &[usize],
    k: usize,
    basis: &BasisSet,
    cfg: &DivideConfig,
) -> Result<MixtureModel> {
    if labels.len() != samples.total() {
        return Err(Error::DimensionMismatch {
            expected: samples.total(),
            got: labels.len(),
        });
    }
    if k == 0 || labels.iter().any(|&l| l >= k) {
        return Err(Error::invalid("labels must lie in 0..k with k >= 1"));
    }
    let n = counts(labels, k);
    if n.contains(&0) {
        return Err(Error::InsufficientData("a component has no points".into()));
    }
    let design = DesignModel::from_samples(samples, basis)?;
    let rows = design.rows();
    let components = fit_all(rows, labels, None, cfg, k)?;
    let weights = weights_of(&n);
    let loglik = mixture_loglik(&point_densities(rows, &components), &weights);
    Ok(MixtureModel {
        components,
        weights: weights.clone(),
        assignment: labels.to_vec(),
        history: vec![RoundRecord { weights, loglik }],
        rounds: 0,
        converged: true,
        cycle: None,
        loglik,
    })
}

pub fn quasi_bayes_divide(samples: &SampleSet, k: usize, basis: &BasisSet, cfg: &DivideConfig) -> Result<MixtureModel> {
    if k == 0 {
        return Err(Error::invalid("need at least one component"));
    }
    if cfg.max_rounds == 0 {
        return Err(Error::invalid("max_rounds must be positive"));
    }
    let total = samples.total();
    if total < k {
        return Err(Error::InsufficientData(format!("{total} points cannot feed {k} components")));
    }
    if total < k * basis.size() {
        log::warn!("{total} points for {k} components of size {}; components may be underdetermined", basis.size());
    }
    let design = DesignModel::from_samples(samples, basis)?;
    if design.rows().nrows() != total {
        return Err(Error::invalid("every sample must carry unit weight"));
    }
    let rows = design.rows();
    let mut rng = rng_from_seed(cfg.seed);

    // Uniform multinomial start, topped up so no component begins empty.
    let mut assignment: Vec<usize> = (0..total).map(|_| rng.random_range(0..k)).collect();
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    for i in 0..k {
        if !assignment.contains(&i) {
            assignment[order[i]] = i;
        }
    }
    let fixed_u: Vec<f64> = (0..total).map(|_| rng.random::<f64>()).collect();

    let mut weights = weights_of(&counts(&assignment, k));
    let mut components = fit_all(rows, &assignment, None, cfg, k)?;
    let mut dens = point_densities(rows, &components);
    let mut loglik = mixture_loglik(&dens, &weights);
    let mut history = vec![RoundRecord {
        weights: weights.clone(),
        loglik,
    }];
    let mut seen: Vec<Vec<usize>> = vec![assignment.clone()];
    let mut best: Option<(f64, Vec<StateVector>, Vec<f64>, Vec<usize>)> = None;

    for round in 1..=cfg.max_rounds {
        let mut next = Vec::with_capacity(total);
        for t in 0..total {
            let u = if cfg.fresh_randomness { rng.random::<f64>() } else { fixed_u[t] };
            let post: Vec<f64> = (0..k).map(|i| weights[i] * dens[i][t]).collect();
            let z: f64 = post.iter().sum();
            let mut acc = 0.0;
            let mut pick = k - 1;
            for (i, p) in post.iter().enumerate() {
                acc += if z > 0.0 { p / z } else { weights[i] };
                if u < acc {
                    pick = i;
                    break;
                }
            }
            next.push(pick);
        }
        if counts(&next, k).contains(&0) {
            reseed_starved(&mut next, &dens, &weights, k);
        }

        let new_weights = weights_of(&counts(&next, k));
        let new_components = fit_all(rows, &next, Some(&components), cfg, k)?;
        let dw = new_weights
            .iter()
            .zip(&weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let df = new_components
            .iter()
            .zip(&components)
            .map(|(a, b)| 1.0 - a.fidelity(b))
            .fold(0.0, f64::max);

        assignment = next;
        weights = new_weights;
        components = new_components;
        dens = point_densities(rows, &components);
        loglik = mixture_loglik(&dens, &weights);
        history.push(RoundRecord {
            weights: weights.clone(),
            loglik,
        });
        if best.as_ref().is_none_or(|b| loglik > b.0) {
            best = Some((loglik, components.clone(), weights.clone(), assignment.clone()));
        }

        let cycle = if cfg.fresh_randomness {
            None
        } else {
            seen.iter().rposition(|a| *a == assignment).map(|r| seen.len() - r)
        };
        if cycle.is_some() || (dw < cfg.weight_tol && df < cfg.fidelity_tol) {
            return Ok(MixtureModel {
                components,
                weights,
                assignment,
                history,
                rounds: round,
                converged: true,
                cycle,
                loglik,
            });
        }
        if !cfg.fresh_randomness {
            seen.push(assignment.clone());
        }
    }

    log::warn!("mixture division did not settle in {} rounds; returning the best round", cfg.max_rounds);
    let (loglik, components, weights, assignment) = best.expect("at least one round ran");
    Ok(MixtureModel {
        components,
        weights,
        assignment,
        history,
        rounds: cfg.max_rounds,
        converged: false,
        cycle: None,
        loglik,
    })
}

/// Permutation `perm` maximizing `sum_i F(estimates[perm[i]], truth[i])`,
/// found by exhaustive search.
pub fn match_labels(estimates: &[StateVector], truth: &[StateVector]) -> Result<Vec<usize>> {
    let k = truth.len();
    if estimates.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: estimates.len(),
        });
    }
    if k > MAX_MATCH_COMPONENTS {
        return Err(Error::invalid(format!("label matching supports at most {MAX_MATCH_COMPONENTS} components")));
    }
    let fid: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| estimates.iter().map(|e| e.fidelity(t)).collect())
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = (f64::NEG_INFINITY, perm.clone());
    permute(&mut perm, 0, &mut |p| {
        let score: f64 = p.iter().enumerate().map(|(i, &e)| fid[i][e]).sum();
        if score > best.0 {
            best = (score, p.to_vec());
        }
    });
    Ok(best.1)
}

fn permute(v: &mut [usize], at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == v.len() {
        visit(v);
        return;
    }
    for i in at..v.len() {
        v.swap(at, i);
        permute(v, at + 1, visit);
        v.swap(at, i);
    }
}

/// Draws a labelled sample: every point picks a component by weight, then a
/// position from that component's density. Labels follow the point order of
/// [`SampleSet`] (coordinate first).
pub fn sample_mixture(
    basis: &BasisSet,
    components: &[StateVector],
    weights: &[f64],
    n: usize,
    m: usize,
    seed: u64,
) -> Result<(SampleSet, Vec<usize>)> {
    density::check_simplex(weights)?;
    if components.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: components.len(),
        });
    }
    let cdfs = |space: Space, grid: &[f64]| -> Result<Vec<InverseCdf>> {
        components
            .iter()
            .map(|c| InverseCdf::new(grid, &basis.density_on_grid(c, space)?))
            .collect()
    };
    let cx = cdfs(Space::Coordinate, basis.grid())?;
    let cp = cdfs(Space::Momentum, basis.momentum_grid())?;
    let mut rng = rng_from_seed(seed);
    let mut labels = Vec::with_capacity(n + m);
    let mut draw = |table: &[InverseCdf], count: usize, labels: &mut Vec<usize>| -> Vec<f64> {
        (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = weights.len() - 1;
                for (i, f) in weights.iter().enumerate() {
                    acc += f;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                labels.push(pick);
                table[pick].quantile(rng.random::<f64>())
            })
            .collect()
    };
    let coord = draw(&cx, n, &mut labels);
    let mom = draw(&cp, m, &mut labels);
    let mut set = SampleSet::new(coord, mom);
    set.meta.seed = Some(seed);
    Ok((set, labels))
}

/// Mixture density `sum_i f_i |psi_i|^2` on the tabulation grid.
pub fn mixture_density_on_grid(model: &MixtureModel, basis: &BasisSet, space: Space) -> Result<Vec<f64>> {
    let mut out = vec![0.0; basis.grid().len()];
    for (c, f) in model.components.iter().zip(&model.weights) {
        for (o, d) in out.iter_mut().zip(basis.density_on_grid(c, space)?) {
            *o += f * d;
        }
    }
    Ok(out)
}
