//! Spin-state reconstruction from projection counts.
//!
//! A detector oriented along `(theta, phi)` sees the amplitudes
//! `psi~ = D(phi, theta, 0)^dagger psi`, with `D` from [`wigner`]; outcome `k`
//! has projection `m = j - k` and probability `|psi~_k|^2`.
//!
//! Spin 1/2 has a second, independent route: the outcome probabilities are the
//! Hermitian forms `P+- = c^dagger M+- c` with
//! `M+ = 1/2 [[1 + cos t, sin t e^{-i phi}], [sin t e^{i phi}, 1 - cos t]]` and
//! `M- = E - M+`, and the likelihood equation reads
//! `c = (1/N) sum N+- M+- c / P+-`.

pub mod wigner;

pub use wigner::{wigner_d, WignerD};

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector2, Vector3};

use crate::basis::StateVector;
use crate::linalg::{CMatrix, C64};
use crate::mle::complementary::{finish, DesignModel, EstimateResult, DENSITY_CLAMP};
use crate::mle::engine::{self, FixedPointMap, SolverConfig};
use crate::sampler::{Direction, SpinCounts};
use crate::stats::{ChiSqReport, HalfChiSquared};
use crate::{Error, Result};

/// Singular-value threshold for the direction-rank check.
pub const COPLANAR_TOL: f64 = 1e-8;

/// Normalized spin state with `2j + 1` components ordered `m = j, j-1, ..., -j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    pub two_j: u32,
    pub c: Vec<C64>,
}

impl Spinor {
    pub fn new(c: Vec<C64>) -> Result<Self> {
        if c.len() < 2 {
            return Err(Error::invalid("a spinor needs at least two components"));
        }
        let state = StateVector::new(c)?;
        Ok(Spinor {
            two_j: (state.len() - 1) as u32,
            c: state.into_coeffs(),
        })
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_normalized(self.c.clone())
    }
}

fn check_spin_state(state: &[C64]) -> Result<u32> {
    if state.len() < 2 {
        return Err(Error::invalid("spin state needs 2j + 1 >= 2 components"));
    }
    Ok((state.len() - 1) as u32)
}

/// Rows `a` of the returned matrix give `psi~_a = row_a . psi`.
pub fn detector_rows(two_j: u32, dir: Direction) -> Result<CMatrix> {
    Ok(wigner_d(two_j, dir.phi, dir.theta, 0.0)?.entries.adjoint())
}

/// Probabilities of the `2j + 1` projections along `dir`.
pub fn outcome_probabilities(state: &[C64], dir: Direction) -> Result<Vec<f64>> {
    let two_j = check_spin_state(state)?;
    let rows = detector_rows(two_j, dir)?;
    let amps = rows * nalgebra::DVector::from_column_slice(state);
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

fn half_forms(theta: f64, phi: f64) -> (Matrix2<C64>, Matrix2<C64>) {
    let (ct, st) = (theta.cos(), theta.sin());
    let plus = Matrix2::new(
        C64::new(0.5 * (1.0 + ct), 0.0),
        C64::from_polar(0.5 * st, -phi),
        C64::from_polar(0.5 * st, phi),
        C64::new(0.5 * (1.0 - ct), 0.0),
    );
    (plus, Matrix2::identity() - plus)
}

fn form(m: &Matrix2<C64>, c: &Vector2<C64>) -> f64 {
    (c.adjoint() * m * c)[(0, 0)].re
}

/// Closed-form `(P+, P-)` for a spin-1/2 state along `(theta, phi)`.
pub fn spin_half_probs(c: &[C64], theta: f64, phi: f64) -> (f64, f64) {
    let (c1, c2) = (c[0], c[1]);
    let cross = C64::from_polar(theta.sin(), -phi) * c1.conj() * c2;
    let plus = 0.5 * ((1.0 + theta.cos()) * c1.norm_sqr() + 2.0 * cross.re + (1.0 - theta.cos()) * c2.norm_sqr());
    let minus = 0.5 * ((1.0 - theta.cos()) * c1.norm_sqr() - 2.0 * cross.re + (1.0 + theta.cos()) * c2.norm_sqr());
    (plus, minus)
}

/// Fails unless the direction unit vectors span three dimensions.
pub fn check_noncoplanar(directions: &[Direction]) -> Result<()> {
    if directions.len() < 3 {
        return Err(Error::Unidentifiable(format!(
            "{} directions cannot span three dimensions",
            directions.len()
        )));
    }
    let m = DMatrix::from_fn(3, directions.len(), |i, d| directions[d].unit_vector()[i]);
    let sv = m.singular_values();
    let max = sv.max();
    if sv.iter().filter(|&&v| v > COPLANAR_TOL * max.max(1.0)).count() < 3 {
        return Err(Error::Unidentifiable("measurement directions are coplanar".into()));
    }
    Ok(())
}

fn check_frequencies(dim: usize, directions: &[Direction], freqs: &[Vec<f64>]) -> Result<f64> {
    if directions.len() != freqs.len() {
        return Err(Error::DimensionMismatch {
            expected: directions.len(),
            got: freqs.len(),
        });
    }
    if let Some(bad) = freqs.iter().find(|f| f.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    if freqs.iter().flatten().any(|w| !(*w >= 0.0)) {
        return Err(Error::invalid("counts must be nonnegative"));
    }
    let total: f64 = freqs.iter().flatten().sum();
    if total <= 0.0 {
        return Err(Error::InsufficientData("no spin counts".into()));
    }
    Ok(total)
}

fn as_frequencies(counts: &SpinCounts) -> Vec<Vec<f64>> {
    counts
        .counts
        .iter()
        .map(|c| c.iter().map(|&k| k as f64).collect())
        .collect()
}

/// Least-squares Bloch vector of spin-1/2 data, projected to the sphere.
fn bloch_start(directions: &[Direction], freqs: &[Vec<f64>]) -> Vec<C64> {
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for (d, f) in directions.iter().zip(freqs) {
        let w = f[0] + f[f.len() - 1];
        if w == 0.0 {
            continue;
        }
        let n = Vector3::from(d.unit_vector());
        a += n * n.transpose() * w;
        b += n * (f[0] - f[f.len() - 1]);
    }
    let r = a.try_inverse().map(|inv| inv * b).unwrap_or(Vector3::z());
    let len = r.norm();
    let r = if len > 0.0 { r / len } else { Vector3::z() };
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]);
    vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Spin-1/2 likelihood written through the closed-form probabilities.
struct SpinHalfModel {
    forms: Vec<(Matrix2<C64>, Matrix2<C64>)>,
    weights: Vec<(f64, f64)>,
    total: f64,
}

impl SpinHalfModel {
    fn probabilities(&self, c: &Vector2<C64>) -> Vec<(f64, f64)> {
        let raw: Vec<(f64, f64)> = self.forms.iter().map(|(p, m)| (form(p, c), form(m, c))).collect();
        let max = raw.iter().fold(0.0f64, |acc, (a, b)| acc.max(*a).max(*b));
        let floor = DENSITY_CLAMP * max;
        raw.into_iter().map(|(a, b)| (a.max(floor), b.max(floor))).collect()
    }
}

impl FixedPointMap for SpinHalfModel {
    fn dim(&self) -> usize {
        2
    }

    fn objective(&self, c: &[C64]) -> f64 {
        let v = Vector2::new(c[0], c[1]);
        self.probabilities(&v)
            .iter()
            .zip(&self.weights)
            .map(|((pp, pm), (wp, wm))| {
                let mut l = 0.0;
                if *wp > 0.0 {
                    l += wp * pp.ln();
                }
                if *wm > 0.0 {
                    l += wm * pm.ln();
                }
                l
            })
            .sum()
    }

    fn map(&self, c: &[C64]) -> Vec<C64> {
        let v = Vector2::new(c[0], c[1]);
        let probs = self.probabilities(&v);
        let mut acc = Vector2::zeros();
        for (((mp, mm), (pp, pm)), (wp, wm)) in self.forms.iter().zip(&probs).zip(&self.weights) {
            acc += mp * v * C64::new(wp / pp, 0.0) + mm * v * C64::new(wm / pm, 0.0);
        }
        vec![acc[0] / self.total, acc[1] / self.total]
    }
}

/// Spin-1/2 estimate through the closed-form probabilities.
pub fn solve_spin_half(counts: &SpinCounts, config: &SolverConfig) -> Result<EstimateResult> {
    if counts.two_j != 1 {
        return Err(Error::invalid("solve_spin_half needs spin 1/2 counts"));
    }
    solve_spin_half_frequencies(&counts.directions, &as_frequencies(counts), config)
}

/// As [`solve_spin_half`] with real-valued (possibly expected) counts.
pub fn solve_spin_half_frequencies(
    directions: &[Direction],
    freqs: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<EstimateResult> {
    let total = check_frequencies(2, directions, freqs)?;
    check_noncoplanar(directions)?;
    let model = SpinHalfModel {
        forms: directions.iter().map(|d| half_forms(d.theta, d.phi)).collect(),
        weights: freqs.iter().map(|f| (f[0], f[1])).collect(),
        total,
    };
    let start = config.start(2, || bloch_start(directions, freqs))?;
    let out = engine::solve(&model, start, config)?;
    finish(&model, total, out)
}

/// Design model of spin-`j` projection data through the D-matrix route.
pub fn spin_design(two_j: u32, directions: &[Direction], freqs: &[Vec<f64>]) -> Result<DesignModel> {
    let dim = two_j as usize + 1;
    check_frequencies(dim, directions, freqs)?;
    let mut rows = CMatrix::zeros(directions.len() * dim, dim);
    for (d, dir) in directions.iter().enumerate() {
        let block = detector_rows(two_j, *dir)?;
        rows.view_mut((d * dim, 0), (dim, dim)).copy_from(&block);
    }
    DesignModel::new(rows, freqs.iter().flatten().copied().collect())
}

/// Spin-`j` estimate through the D-matrix route.
pub fn solve_spin_general(counts: &SpinCounts, config: &SolverConfig) -> Result<EstimateResult> {
    solve_spin_general_frequencies(counts.two_j, &counts.directions, &as_frequencies(counts), config)
}

pub fn solve_spin_general_frequencies(
    two_j: u32,
    directions: &[Direction],
    freqs: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<EstimateResult> {
    if two_j == 0 {
        return Err(Error::invalid("spin must be a positive multiple of 1/2"));
    }
    check_noncoplanar(directions)?;
    if directions.len() < two_j as usize + 1 {
        log::warn!(
            "{} directions for spin {}; at least {} are advisable",
            directions.len(),
            two_j as f64 / 2.0,
            two_j + 1
        );
    }
    let model = spin_design(two_j, directions, freqs)?;
    let start = config.start(model.dim(), || {
        if two_j == 1 {
            bloch_start(directions, freqs)
        } else {
            model.mass_start()
        }
    })?;
    model.check_support(&start)?;
    let out = engine::solve(&model, start, config)?;
    finish(&model, model.total(), out)
}

/// `sum N_k ln P_k` of projection counts at `state`.
pub fn spin_loglik(counts: &SpinCounts, state: &[C64]) -> Result<f64> {
    Ok(spin_design(counts.two_j, &counts.directions, &as_frequencies(counts))?.loglik(state))
}

/// Fidelity statistic `N (1 - |<c^, c0>|^2) ~ chi^2_{4j} / 2`.
pub fn spin_chisq(estimate: &StateVector, truth: &StateVector, n: f64) -> Result<ChiSqReport> {
    crate::mle::chisq_fidelity(estimate, truth, n)
}

#[derive(Debug, Clone)]
pub struct SpinHomogeneity {
    pub reject: bool,
    pub report: ChiSqReport,
    /// Critical value of the half statistic at level `alpha`.
    pub quantile: f64,
    pub alpha: f64,
}

/// Two samples are incoherent when the homogeneity statistic exceeds the
/// upper `alpha` point of `chi^2_{4j} / 2`.
pub fn spin_homogeneity(c1: &StateVector, n1: f64, c2: &StateVector, n2: f64, alpha: f64) -> Result<SpinHomogeneity> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let report = crate::mle::homogeneity_test(c1, n1, c2, n2)?;
    let quantile = HalfChiSquared::new(report.dof).upper_critical(alpha);
    Ok(SpinHomogeneity {
        reject: report.statistic > quantile,
        report,
        quantile,
        alpha,
    })
}
