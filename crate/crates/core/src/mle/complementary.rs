//! Likelihood equation for mutually complementing measurements.
//!
//! Every observation contributes a row `a_k` with `psi_k = a_k . c`: for a
//! coordinate sample `a_k = (phi_0(x_k), ..., phi_{s-1}(x_k))`, for a momentum
//! sample the momentum functions, for a register outcome a unit vector or a row
//! of the conjugating unitary. The R matrix is
//!
//! ```text
//! R = sum_k w_k conj(a_k) a_k^T / |psi_k|^2
//! ```
//!
//! and the likelihood equation `R c = W c`, `W = sum_k w_k`, is solved as the
//! fixed point of `F(c) = R c / W`.

use nalgebra::DVector;

use super::engine::{self, FixedPointMap, SolverConfig};
use super::fisher::fisher_and_covariance;
use crate::basis::BasisSet;
use crate::linalg::{canonical_phase, hermiticity_residual, CMatrix, C64};
use crate::sampler::SampleSet;
use crate::{Error, Result};

/// Relative floor on densities in the likelihood denominators.
pub const DENSITY_CLAMP: f64 = 1e-12;

/// Weighted design rows of a root likelihood.
#[derive(Debug, Clone)]
pub struct DesignModel {
    rows: CMatrix,
    weights: Vec<f64>,
    total: f64,
}

impl DesignModel {
    /// Rows with zero weight are dropped.
    pub fn new(rows: CMatrix, weights: Vec<f64>) -> Result<Self> {
        if rows.nrows() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.nrows(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid("observation weights must be nonnegative"));
        }
        let keep: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
        let rows = if keep.len() == weights.len() {
            rows
        } else {
            rows.select_rows(keep.iter())
        };
        let weights: Vec<f64> = keep.iter().map(|&k| weights[k]).collect();
        let total = weights.iter().sum();
        Ok(DesignModel {
            rows,
            weights,
            total,
        })
    }

    /// Coordinate rows followed by momentum rows, unit weights.
    pub fn from_samples(samples: &SampleSet, basis: &BasisSet) -> Result<Self> {
        let s = basis.size();
        let k = samples.total();
        let mut rows = CMatrix::zeros(k, s);
        for (r, &x) in samples.coord.iter().enumerate() {
            for (j, v) in basis.coord_row(x).into_iter().enumerate() {
                rows[(r, j)] = v;
            }
        }
        let off = samples.n();
        for (r, &p) in samples.mom.iter().enumerate() {
            for (j, v) in basis.mom_row(p).into_iter().enumerate() {
                rows[(off + r, j)] = v;
            }
        }
        DesignModel::new(rows, vec![1.0; k])
    }

    pub fn rows(&self) -> &CMatrix {
        &self.rows
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total weight `n + m`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn amplitudes(&self, c: &[C64]) -> DVector<C64> {
        &self.rows * DVector::from_column_slice(c)
    }

    fn clamped(&self, amps: &DVector<C64>) -> Vec<f64> {
        let max = amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
        let floor = DENSITY_CLAMP * max;
        amps.iter().map(|a| a.norm_sqr().max(floor)).collect()
    }

    /// Fails when every observation sits where the state has zero density.
    pub fn check_support(&self, c: &[C64]) -> Result<()> {
        let amps = self.amplitudes(c);
        if amps.iter().all(|a| a.norm_sqr() == 0.0) {
            return Err(Error::DegenerateData(
                "all observations fall in the zero-density region of the state".into(),
            ));
        }
        Ok(())
    }

    /// `ln L = sum_k w_k ln |psi_k|^2`, with clamped densities.
    pub fn loglik(&self, c: &[C64]) -> f64 {
        let amps = self.amplitudes(c);
        self.clamped(&amps)
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * d.ln())
            .sum()
    }

    pub fn r_matrix(&self, c: &[C64]) -> CMatrix {
        let amps = self.amplitudes(c);
        let dens = self.clamped(&amps);
        let s = self.rows.ncols();
        let scaled = CMatrix::from_fn(self.rows.nrows(), s, |k, j| {
            self.rows[(k, j)] * (self.weights[k] / dens[k])
        });
        self.rows.adjoint() * scaled
    }

    /// `||R c - W c||`.
    pub fn residual(&self, c: &[C64]) -> f64 {
        let f = self.map(c);
        self.total
            * f.iter()
                .zip(c)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
    }

    /// Start with `c_i ~ sqrt(sum_k w_k |a_ki|^2)`, zero phases.
    pub fn mass_start(&self) -> Vec<C64> {
        (0..self.rows.ncols())
            .map(|j| {
                let mass: f64 = (0..self.rows.nrows())
                    .map(|k| self.weights[k] * self.rows[(k, j)].norm_sqr())
                    .sum();
                C64::new(mass.sqrt(), 0.0)
            })
            .collect()
    }
}

impl FixedPointMap for DesignModel {
    fn dim(&self) -> usize {
        self.rows.ncols()
    }

    fn objective(&self, c: &[C64]) -> f64 {
        self.loglik(c)
    }

    fn map(&self, c: &[C64]) -> Vec<C64> {
        let amps = self.amplitudes(c);
        let dens = self.clamped(&amps);
        // w_k / conj(psi_k) = w_k psi_k / |psi_k|^2
        let ratios = DVector::from_iterator(
            amps.len(),
            amps.iter()
                .zip(&dens)
                .zip(&self.weights)
                .map(|((a, d), w)| a * (w / d)),
        );
        let f = self.rows.adjoint() * ratios;
        f.iter().map(|x| x / self.total).collect()
    }
}

/// R matrix with its sample counts.
#[derive(Debug, Clone)]
pub struct RMatrix {
    pub entries: CMatrix,
    pub n: usize,
    pub m: usize,
}

impl RMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.entries)
    }

    /// `||R c - (n + m) c||`.
    pub fn eigen_residual(&self, c: &[C64]) -> f64 {
        let v = DVector::from_column_slice(c);
        let lambda = (self.n + self.m) as f64;
        (&self.entries * &v - v * C64::new(lambda, 0.0)).norm()
    }
}

/// R matrix of coordinate/momentum samples at `state`.
pub fn build_r(samples: &SampleSet, basis: &BasisSet, state: &crate::basis::StateVector) -> Result<RMatrix> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    if state.len() != basis.size() {
        return Err(Error::DimensionMismatch {
            expected: basis.size(),
            got: state.len(),
        });
    }
    let model = DesignModel::from_samples(samples, basis)?;
    model.check_support(state.coeffs())?;
    Ok(RMatrix {
        entries: model.r_matrix(state.coeffs()),
        n: samples.n(),
        m: samples.m(),
    })
}

/// Estimate with convergence diagnostics and the asymptotic error model.
#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub state: crate::basis::StateVector,
    pub iterations: usize,
    /// `||R c - (n + m) c||` at the estimate.
    pub residual: f64,
    pub loglik: f64,
    pub fisher: CMatrix,
    pub covariance: CMatrix,
    /// Log-likelihood after each accepted step.
    pub trace: Vec<f64>,
}

/// Packages a converged iterate of any likelihood map whose total weight is `total`.
pub(crate) fn finish<M: FixedPointMap + ?Sized>(
    model: &M,
    total: f64,
    out: engine::FixedPointOutcome,
) -> Result<EstimateResult> {
    let mut c = out.c;
    canonical_phase(&mut c);
    let fc = fisher_and_covariance(&c, total);
    let f = model.map(&c);
    let residual = total * f.iter().zip(&c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(EstimateResult {
        residual,
        loglik: model.objective(&c),
        state: crate::basis::StateVector::new(c)?,
        iterations: out.iterations,
        fisher: fc.fisher,
        covariance: fc.covariance,
        trace: out.trace,
    })
}

/// Solves a prepared design model with the damped fixed-point iteration.
pub fn solve_design(model: &DesignModel, config: &SolverConfig) -> Result<EstimateResult> {
    engine::best_of_starts(
        config,
        model.dim(),
        |cfg| solve_design_once(model, cfg),
        |r| (r.state.coeffs(), r.loglik),
    )
}

fn solve_design_once(model: &DesignModel, config: &SolverConfig) -> Result<EstimateResult> {
    let start = config.start(model.dim(), || model.mass_start())?;
    model.check_support(&start)?;
    let out = engine::solve(model, start, config)?;
    finish(model, model.total(), out)
}

/// Maximum-likelihood state from coordinate and momentum samples.
pub fn solve_mle(samples: &SampleSet, basis: &BasisSet, config: &SolverConfig) -> Result<EstimateResult> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("need at least one sample".into()));
    }
    if basis.size() > samples.total() {
        log::warn!(
            "basis size {} exceeds sample count {}; the estimate is underdetermined",
            basis.size(),
            samples.total()
        );
    }
    let model = DesignModel::from_samples(samples, basis)?;
    solve_design(&model, config)
}

/// `ln L(c)` of coordinate/momentum samples.
pub fn loglik(samples: &SampleSet, basis: &BasisSet, state: &[C64]) -> Result<f64> {
    Ok(DesignModel::from_samples(samples, basis)?.loglik(state))
}
