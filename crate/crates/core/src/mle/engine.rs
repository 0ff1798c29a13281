//! Damped fixed-point iteration on the unit sphere.
//!
//! Every estimator in the crate is an instance of the same loop:
//!
//! ```text
//! c <- normalize((1 - gamma) c + gamma F(c))
//! ```
//!
//! where `F` is the likelihood-equation map. The objective (log-likelihood, or
//! the penalized log-likelihood for the energy constraint) may not decrease by
//! more than [`MONOTONE_SLACK`] along accepted steps. On a violation `gamma` is
//! halved (down to `gamma_floor`) and the step retried; at the floor the step
//! is backtracked locally so the accepted sequence stays monotone. Any decrease,
//! even one inside the slack, also halves `gamma`; after a run of clean ascent
//! steps it doubles back toward its configured value.
//!
//! Convergence is declared when the undamped update is small,
//! `||F(c) - c|| < tol` (for constrained maps, its component tangent to the
//! feasible set); this bounds every damped step and makes
//! `||R c - (n + m) c|| < (n + m) tol` a certificate of the fixed point.

use crate::linalg::{distance, normalize, C64};
use crate::{Error, Result};

pub const MONOTONE_SLACK: f64 = 1e-9;

/// Relative objective change treated as rounding noise.
const ROUNDING: f64 = 1e-13;

/// Clean ascent steps before `gamma` is allowed to grow again.
const REGROW_AFTER: usize = 10;

/// A likelihood equation written as a fixed point `c = F(c)` on the unit sphere.
pub trait FixedPointMap {
    fn dim(&self) -> usize;

    /// Quantity that must not decrease along accepted iterates.
    fn objective(&self, c: &[C64]) -> f64;

    /// `F(c)`; need not be normalized.
    fn map(&self, c: &[C64]) -> Vec<C64>;

    /// Maps a trial point back onto the feasible set. `None` rejects the step.
    fn retract(&self, mut v: Vec<C64>) -> Option<Vec<C64>> {
        if normalize(&mut v) {
            Some(v)
        } else {
            None
        }
    }

    /// Size of the undamped update; zero exactly at a fixed point.
    fn residual(&self, c: &[C64], f: &[C64]) -> f64 {
        distance(f, c)
    }
}

/// A restart replaces the incumbent only if it is better by more than this.
const RESTART_MARGIN: f64 = 1e-9;

fn conjugate(c: &[C64]) -> Vec<C64> {
    c.iter().map(|z| z.conj()).collect()
}

/// Runs `solve` from `config.init` and, under `Init::Auto`, from the restarts
/// configured in `config`, keeping the highest objective. `parts` exposes the
/// solution vector and objective of a result. Failed restarts are skipped.
pub(crate) fn best_of_starts<T>(
    config: &SolverConfig,
    dim: usize,
    solve: impl Fn(&SolverConfig) -> Result<T>,
    parts: impl Fn(&T) -> (&[C64], f64),
) -> Result<T> {
    let mut best = solve(config)?;
    if config.init != Init::Auto {
        return Ok(best);
    }
    let mut starts = Vec::new();
    if config.twin_restart {
        starts.push(conjugate(parts(&best).0));
    }
    for k in 0..config.random_starts {
        starts.push(crate::basis::StateVector::random(dim, &mut crate::sampler::rng_from_seed(k as u64)).into_coeffs());
    }
    for start in starts {
        if let Ok(other) = solve(&config.clone().with_init(Init::Given(start))) {
            if parts(&other).1 > parts(&best).1 + RESTART_MARGIN {
                best = other;
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Estimator-specific data-driven start.
    Auto,
    /// `1/sqrt(s)` in every component.
    Uniform,
    Given(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop when `||F(c) - c|| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial mixing weight.
    pub gamma: f64,
    pub gamma_floor: f64,
    pub init: Init,
    /// With `Init::Auto`, also start from the complex conjugate of the first
    /// solution and keep the better one. The conjugate leaves coordinate
    /// densities unchanged and mirrors momentum densities, so it is the usual
    /// competing maximum.
    pub twin_restart: bool,
    /// With `Init::Auto`, also start from this many fixed random states. The
    /// likelihood can have further local maxima besides the conjugate pair.
    pub random_starts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_iter: 10_000,
            gamma: 0.5,
            gamma_floor: 0.01,
            init: Init::Auto,
            twin_restart: true,
            random_starts: 8,
        }
    }
}

impl SolverConfig {
    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::invalid("tol must be positive and max_iter nonzero"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) || !(self.gamma_floor > 0.0) {
            return Err(Error::invalid("gamma must lie in (0, 1] with a positive floor"));
        }
        Ok(())
    }

    /// Resolves `init` against a data-driven default.
    pub(crate) fn start(&self, dim: usize, auto: impl FnOnce() -> Vec<C64>) -> Result<Vec<C64>> {
        let mut c = match &self.init {
            Init::Auto => auto(),
            Init::Uniform => vec![C64::new(1.0, 0.0); dim],
            Init::Given(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                v.clone()
            }
        };
        if !normalize(&mut c) {
            c = vec![C64::new(1.0, 0.0); dim];
            normalize(&mut c);
        }
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointOutcome {
    pub c: Vec<C64>,
    pub iterations: usize,
    /// Size of the last accepted step.
    pub step: f64,
    pub objective: f64,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

fn damped<M: FixedPointMap + ?Sized>(model: &M, c: &[C64], f: &[C64], gamma: f64) -> Option<Vec<C64>> {
    let next: Vec<C64> = c
        .iter()
        .zip(f)
        .map(|(a, b)| a * (1.0 - gamma) + b * gamma)
        .collect();
    model.retract(next)
}

/// Runs the damped iteration from `start` (assumed feasible).
pub fn solve<M: FixedPointMap + ?Sized>(
    model: &M,
    start: Vec<C64>,
    cfg: &SolverConfig,
) -> Result<FixedPointOutcome> {
    cfg.validate()?;
    let mut c = start;
    let mut obj = model.objective(&c);
    let mut gamma = cfg.gamma;
    let mut trace = vec![obj];
    let mut step = f64::INFINITY;
    let mut best = (obj, c.clone());
    let mut clean = 0;

    for iter in 1..=cfg.max_iter {
        let f = model.map(&c);
        let residual = model.residual(&c, &f);
        if residual < cfg.tol {
            return Ok(FixedPointOutcome {
                c,
                iterations: iter,
                step,
                objective: obj,
                trace,
            });
        }
        let mut g = gamma;
        let accepted = loop {
            if let Some(next) = damped(model, &c, &f, g) {
                let next_obj = model.objective(&next);
                if next_obj >= obj - MONOTONE_SLACK {
                    break Some((next, next_obj));
                }
            }
            g *= 0.5;
            gamma = (gamma * 0.5).max(cfg.gamma_floor);
            if g < 1e-12 {
                break None;
            }
        };
        let Some((next, next_obj)) = accepted else {
            // No ascent is possible at machine precision: the iterate is stationary.
            return Ok(FixedPointOutcome {
                c,
                iterations: iter,
                step: 0.0,
                objective: obj,
                trace,
            });
        };
        // A decrease inside the slack still signals overshoot: damp harder, and
        // relax again only after a run of clean ascent steps.
        if next_obj < obj - ROUNDING * obj.abs() {
            gamma = (gamma * 0.5).max(cfg.gamma_floor);
            clean = 0;
        } else {
            clean += 1;
            if clean >= REGROW_AFTER {
                gamma = (gamma * 2.0).min(cfg.gamma);
                clean = 0;
            }
        }
        step = distance(&next, &c);
        c = next;
        obj = next_obj;
        trace.push(obj);
        if obj > best.0 {
            best = (obj, c.clone());
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        last_step: step,
        best: best.1,
    })
}
