//! Estimation under norm and mean-energy constraints.
//!
//! In the energy representation the stationarity condition of
//! `ln L - lambda1 (|c|^2 - 1) - lambda2 (sum E_i |c_i|^2 - E)` is
//! `R c = (lambda1 + lambda2 E_i) c`, and contracting with `c^dagger` gives
//! `lambda1 + lambda2 E = n + m`.
//!
//! [`solve_constrained`] runs the shared damped iteration of the unconstrained
//! map `F(c) = R c / (n + m)` on the energy shell
//! `{ |c| = 1, sum E_i |c_i|^2 = E }`: each trial point is retracted onto the
//! shell by its nearest-point projection, and convergence is measured by the
//! part of `F(c) - c` tangent to the shell. At the fixed point the normal part
//! is `((lambda1 + lambda2 E_i) / (n + m) - 1) c_i`, from which both
//! multipliers are read off by least squares.
//!
//! [`solve_penalized`] solves the fixed-multiplier problem
//! `max ln L - lambda2 <E>` instead; at `lambda2 = 0` it is the unconstrained
//! estimator.

use nalgebra::{DVector, Matrix2, Vector2};

use crate::basis::{BasisSet, StateVector};
use crate::linalg::{canonical_phase, inner, CMatrix, C64};
use crate::mle::complementary::{finish, DesignModel, EstimateResult};
use crate::mle::engine::{self, FixedPointMap, SolverConfig};
use crate::potential::Potential;
use crate::sampler::SampleSet;
use crate::{Error, Result};

/// Energy variance below which time translations reduce to a global phase.
pub const VARIANCE_FLOOR: f64 = 1e-10;

/// `mean U(x_k) + mean p_l^2 / 2`.
pub fn estimate_mean_energy(samples: &SampleSet, potential: &dyn Potential) -> Result<f64> {
    if samples.n() == 0 || samples.m() == 0 {
        return Err(Error::InsufficientData(
            "mean energy needs both coordinate and momentum samples".into(),
        ));
    }
    let pot = samples.coord.iter().map(|&x| potential.value(x)).sum::<f64>() / samples.n() as f64;
    let kin = samples.mom.iter().map(|&p| 0.5 * p * p).sum::<f64>() / samples.m() as f64;
    Ok(pot + kin)
}

/// `(mean E, variance of E)` of a state in the energy representation.
pub fn energy_moments(state: &[C64], energies: &[f64]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (c, e) in state.iter().zip(energies) {
        let w = c.norm_sqr();
        m1 += w * e;
        m2 += w * e * e;
    }
    (m1, (m2 - m1 * m1).max(0.0))
}

#[derive(Debug, Clone)]
pub struct ConstrainedEstimate {
    pub state: StateVector,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Target mean energy.
    pub e_bar: f64,
    pub covariance: CMatrix,
    pub basis_size_used: usize,
    /// `||R c - (lambda1 + lambda2 E) c||`.
    pub residual: f64,
    /// `|<E>_c - e_bar|`.
    pub energy_residual: f64,
    pub loglik: f64,
    pub iterations: usize,
}

/// Relative tolerance for energies counted as equal to the target.
const LEVEL_TOL: f64 = 1e-12;

/// The set of normalized states with a given mean energy.
#[derive(Debug, Clone)]
pub struct EnergyShell<'a> {
    energies: &'a [f64],
    e_bar: f64,
}

impl<'a> EnergyShell<'a> {
    pub fn new(energies: &'a [f64], e_bar: f64) -> Result<Self> {
        let emin = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let emax = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if energies.is_empty() || !(e_bar >= emin && e_bar <= emax) {
            return Err(Error::ConstraintInfeasible(format!(
                "target energy {e_bar} outside the basis range [{emin}, {emax}]"
            )));
        }
        Ok(EnergyShell { energies, e_bar })
    }

    /// Nearest point of the shell, `c_i ~ v_i / (1 + mu (E_i - E))`.
    ///
    /// `None` when `v` has no weight on one side of the target energy; the
    /// shell is then out of reach of a positive rescaling of `v`.
    pub fn project(&self, v: &[C64]) -> Option<Vec<C64>> {
        let scale = self.e_bar.abs().max(1.0);
        let d: Vec<f64> = self
            .energies
            .iter()
            .map(|e| {
                let x = e - self.e_bar;
                if x.abs() <= LEVEL_TOL * scale {
                    0.0
                } else {
                    x
                }
            })
            .collect();
        let w: Vec<f64> = v.iter().map(|x| x.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 || !total.is_finite() {
            return None;
        }
        let above: f64 = d.iter().zip(&w).filter(|(d, _)| **d > 0.0).map(|(_, w)| w).sum();
        let below: f64 = d.iter().zip(&w).filter(|(d, _)| **d < 0.0).map(|(_, w)| w).sum();
        let extreme = d.iter().all(|d| *d >= 0.0) || d.iter().all(|d| *d <= 0.0);
        let mut out: Vec<C64> = if above == 0.0 && below == 0.0 {
            v.to_vec()
        } else if extreme {
            // the target is the lowest or highest level: keep only that level
            v.iter()
                .zip(&d)
                .map(|(x, d)| if *d == 0.0 { *x } else { C64::new(0.0, 0.0) })
                .collect()
        } else if above == 0.0 || below == 0.0 {
            return None;
        } else {
            let weighted = || d.iter().zip(&w).filter(|(_, w)| **w > 0.0).map(|(d, _)| *d);
            let dmax = weighted().fold(0.0, f64::max);
            let dmin = weighted().fold(0.0, f64::min);
            let g = |mu: f64| -> f64 {
                d.iter()
                    .zip(&w)
                    .map(|(d, w)| d * w / (1.0 + mu * d).powi(2))
                    .sum()
            };
            // g decreases from +inf to -inf on (-1/dmax, -1/dmin)
            let (mut lo, mut hi) = (-1.0 / dmax, -1.0 / dmin);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mu = 0.5 * (lo + hi);
            v.iter().zip(&d).map(|(x, d)| x / (1.0 + mu * d)).collect()
        };
        if crate::linalg::normalize(&mut out) {
            Some(out)
        } else {
            None
        }
    }

    /// Real least-squares coefficients `(a, b)` of `w ~ a c + b (E o c)` and
    /// the norm of the remainder.
    fn normal_split(&self, c: &[C64], w: &[C64]) -> (f64, f64, f64) {
        let ec: Vec<C64> = c.iter().zip(self.energies).map(|(x, e)| x * e).collect();
        let g11 = inner(c, c).re;
        let g12 = inner(c, &ec).re;
        let g22 = inner(&ec, &ec).re;
        let r1 = inner(c, w).re;
        let r2 = inner(&ec, w).re;
        let det = g11 * g22 - g12 * g12;
        let (a, b) = if det > VARIANCE_FLOOR * g11 * g11 {
            ((r1 * g22 - r2 * g12) / det, (g11 * r2 - g12 * r1) / det)
        } else {
            (r1 / g11, 0.0)
        };
        let rem = w
            .iter()
            .zip(c)
            .zip(&ec)
            .map(|((w, c), ec)| (w - c * a - ec * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (a, b, rem)
    }
}

struct ShellModel<'a> {
    design: &'a DesignModel,
    shell: EnergyShell<'a>,
}

impl FixedPointMap for ShellModel<'_> {
    fn dim(&self) -> usize {
        self.design.dim()
    }

    fn objective(&self, c: &[C64]) -> f64 {
        self.design.loglik(c)
    }

    fn map(&self, c: &[C64]) -> Vec<C64> {
        self.design.map(c)
    }

    fn retract(&self, v: Vec<C64>) -> Option<Vec<C64>> {
        self.shell.project(&v)
    }

    fn residual(&self, c: &[C64], f: &[C64]) -> f64 {
        let w: Vec<C64> = f.iter().zip(c).map(|(f, c)| f - c).collect();
        self.shell.normal_split(c, &w).2
    }
}

/// A feasible start: `start` projected on the shell, mixed with the uniform
/// vector when it misses one side of the target energy.
fn shell_start(shell: &EnergyShell, start: &[C64]) -> Result<Vec<C64>> {
    let s = start.len();
    let uniform = C64::new(1.0 / (s as f64).sqrt(), 0.0);
    let mut mix = 0.0;
    for _ in 0..60 {
        let v: Vec<C64> = start.iter().map(|x| x * (1.0 - mix) + uniform * mix).collect();
        if let Some(c) = shell.project(&v) {
            return Ok(c);
        }
        mix = if mix == 0.0 { 1e-6 } else { (mix * 4.0).min(1.0) };
    }
    Err(Error::ConstraintInfeasible("no feasible starting state".into()))
}

/// Maximum-likelihood state with `sum E_i |c_i|^2 = e_bar`.
pub fn solve_constrained(
    samples: &SampleSet,
    basis: &BasisSet,
    e_bar: f64,
    config: &SolverConfig,
) -> Result<ConstrainedEstimate> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("need at least one sample".into()));
    }
    let design = DesignModel::from_samples(samples, basis)?;
    solve_constrained_design(&design, basis.energies(), e_bar, config)
}

/// As [`solve_constrained`] on a prepared design model.
pub fn solve_constrained_design(
    design: &DesignModel,
    energies: &[f64],
    e_bar: f64,
    config: &SolverConfig,
) -> Result<ConstrainedEstimate> {
    // Restarts are projected onto the shell like any given start.
    engine::best_of_starts(
        config,
        design.dim(),
        |cfg| solve_constrained_once(design, energies, e_bar, cfg),
        |r| (r.state.coeffs(), r.loglik),
    )
}

fn solve_constrained_once(
    design: &DesignModel,
    energies: &[f64],
    e_bar: f64,
    config: &SolverConfig,
) -> Result<ConstrainedEstimate> {
    let s = design.dim();
    if energies.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: energies.len(),
        });
    }
    let shell = EnergyShell::new(energies, e_bar)?;
    let start = config.start(s, || design.mass_start())?;
    let start = shell_start(&shell, &start)?;
    design.check_support(&start)?;
    let model = ShellModel {
        design,
        shell: shell.clone(),
    };
    let out = engine::solve(&model, start, config)?;
    let mut c = out.c;
    canonical_phase(&mut c);
    let n = design.total();
    let rc: Vec<C64> = design.map(&c).iter().map(|x| x * n).collect();
    let (lambda1, lambda2, residual) = shell.normal_split(&c, &rc);
    let (mean, var) = energy_moments(&c, energies);
    let covariance = if s >= 2 && var > VARIANCE_FLOOR {
        constrained_covariance(&c, energies, n)?
    } else {
        crate::mle::covariance_matrix(&c, n)
    };
    Ok(ConstrainedEstimate {
        energy_residual: (mean - e_bar).abs(),
        loglik: design.loglik(&c),
        state: StateVector::new(c)?,
        lambda1,
        lambda2,
        e_bar,
        covariance,
        basis_size_used: s,
        residual,
        iterations: out.iterations,
    })
}

/// Maximizer of `ln L - lambda2 <E>` for a fixed multiplier.
pub fn solve_penalized(
    samples: &SampleSet,
    basis: &BasisSet,
    lambda2: f64,
    config: &SolverConfig,
) -> Result<EstimateResult> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("need at least one sample".into()));
    }
    let design = DesignModel::from_samples(samples, basis)?;
    let model = PenalizedModel {
        design: &design,
        energies: basis.energies(),
        lambda2,
    };
    let start = config.start(design.dim(), || design.mass_start())?;
    design.check_support(&start)?;
    let out = engine::solve(&model, start, config)?;
    finish(&model, design.total(), out)
}

struct PenalizedModel<'a> {
    design: &'a DesignModel,
    energies: &'a [f64],
    lambda2: f64,
}

impl FixedPointMap for PenalizedModel<'_> {
    fn dim(&self) -> usize {
        self.design.dim()
    }

    fn objective(&self, c: &[C64]) -> f64 {
        self.design.loglik(c) - self.lambda2 * energy_moments(c, self.energies).0
    }

    /// `F_i = ((R c)_i + k c_i) / (N + k + lambda2 (E_i - <E>_c))`, with the
    /// shift `k >= 0` chosen so every denominator is at least `N`. The penalty
    /// is treated implicitly, which keeps the iteration stable when its
    /// curvature dwarfs the likelihood's. At `lambda2 = 0` this is the plain
    /// likelihood map.
    fn map(&self, c: &[C64]) -> Vec<C64> {
        let f = self.design.map(c);
        if self.lambda2 == 0.0 {
            return f;
        }
        let n = self.design.total();
        let (mean, _) = energy_moments(c, self.energies);
        let shift = self
            .energies
            .iter()
            .map(|e| -self.lambda2 * (e - mean))
            .fold(0.0f64, f64::max);
        f.iter()
            .zip(c)
            .zip(self.energies)
            .map(|((fi, ci), e)| (fi * n + ci * shift) / (n + shift + self.lambda2 * (e - mean)))
            .collect()
    }
}

/// `(delta_ij - c_i c_j^* (1 + (E_i - E)(E_j - E) / sigma^2)) / N`.
pub fn constrained_covariance(state: &[C64], energies: &[f64], n_plus_m: f64) -> Result<CMatrix> {
    let (mean, var) = energy_moments(state, energies);
    if var <= VARIANCE_FLOOR {
        return Err(Error::DegenerateSpectrum(
            "energy variance of the state is zero".into(),
        ));
    }
    let s = state.len();
    Ok(CMatrix::from_fn(s, s, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        let corr = 1.0 + (energies[i] - mean) * (energies[j] - mean) / var;
        (C64::new(delta, 0.0) - state[i] * state[j].conj() * corr) / n_plus_m
    }))
}

/// Factor loadings `L` (`s x (s-2)`): the columns completing `c` and
/// `(E - E) o c / sigma` to an orthonormal basis.
pub fn factor_loadings(state: &[C64], energies: &[f64]) -> Result<CMatrix> {
    let (mean, var) = energy_moments(state, energies);
    if var <= VARIANCE_FLOOR {
        return Err(Error::DegenerateSpectrum(
            "energy variance of the state is zero".into(),
        ));
    }
    let s = state.len();
    let sigma = var.sqrt();
    let mut cols: Vec<DVector<C64>> = vec![
        DVector::from_column_slice(state),
        DVector::from_iterator(s, state.iter().zip(energies).map(|(c, e)| c * ((e - mean) / sigma))),
    ];
    for k in 0..s {
        if cols.len() == s {
            break;
        }
        let mut v = DVector::from_element(s, C64::new(0.0, 0.0));
        v[k] = C64::new(1.0, 0.0);
        // two Gram-Schmidt passes for stability
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / C64::new(norm, 0.0));
        }
    }
    let l = CMatrix::from_columns(&cols[2..]);
    Ok(l)
}

/// `L L^dagger / N`, the loadings route to the constrained covariance.
pub fn covariance_from_loadings(loadings: &CMatrix, n_plus_m: f64) -> CMatrix {
    loadings * loadings.adjoint() / C64::new(n_plus_m, 0.0)
}

/// Global phase and time translation separating the physical fluctuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGauge {
    pub alpha: f64,
    pub t0: f64,
}

/// Removes `e^{i (alpha + t0 E_j)}` from `estimate` so that
/// `sum_j delta c_j c_j^*` and `sum_j delta c_j E_j c_j^*` are real,
/// with `delta c = output - reference`.
///
/// The 2x2 system for `(alpha, t0)` is linear in the deviation; it is applied
/// repeatedly until the increments vanish so finite translations are removed
/// exactly.
pub fn time_gauge_fix(
    estimate: &StateVector,
    reference: &StateVector,
    energies: &[f64],
) -> Result<(StateVector, TimeGauge)> {
    if estimate.len() != reference.len() || energies.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            got: estimate.len().min(energies.len()),
        });
    }
    let r = reference.coeffs();
    let (mean, var) = energy_moments(r, energies);
    if var <= VARIANCE_FLOOR {
        let fixed = crate::mle::gauge_fix(estimate, reference);
        let alpha = inner(estimate.coeffs(), fixed.coeffs()).arg();
        return Ok((fixed, TimeGauge { alpha, t0: 0.0 }));
    }
    let m2 = var + mean * mean;
    let sys = Matrix2::new(1.0, mean, mean, m2);
    let inv = sys
        .try_inverse()
        .ok_or_else(|| Error::Singular("time-gauge system".into()))?;
    let rotate = |alpha: f64, t0: f64| -> Vec<C64> {
        estimate
            .coeffs()
            .iter()
            .zip(energies)
            .map(|(c, e)| c * C64::from_polar(1.0, -(alpha + t0 * e)))
            .collect()
    };
    let (mut alpha, mut t0) = (0.0, 0.0);
    for _ in 0..200 {
        let cur = rotate(alpha, t0);
        let mut eps = Vector2::zeros();
        for ((x, y), e) in cur.iter().zip(r).zip(energies) {
            let pair = (x - y) * y.conj();
            eps[0] += pair.im;
            eps[1] += pair.im * e;
        }
        let d = inv * eps;
        alpha += d[0];
        t0 += d[1];
        if d.norm() < 1e-15 * (1.0 + alpha.abs() + t0.abs()) {
            break;
        }
    }
    Ok((
        StateVector::from_normalized(rotate(alpha, t0)),
        TimeGauge { alpha, t0 },
    ))
}

/// `round((r f N)^{1/(r+1)})`, at least 1.
pub fn optimal_basis_size(r: f64, f: f64, n_plus_m: f64) -> Result<usize> {
    if !(r > 0.0) || !(f > 0.0) || !(n_plus_m > 0.0) {
        return Err(Error::invalid("r, f and the sample size must be positive"));
    }
    Ok(((r * f * n_plus_m).powf(1.0 / (r + 1.0)).round() as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisDescriptor;
    use crate::linalg::{c, distance, hermitian_eigenvalues, max_abs, trace};
    use crate::potential::Harmonic;
    use crate::sampler::{rng_from_seed, sample_complementary};

    fn energies(s: usize) -> Vec<f64> {
        (0..s).map(|k| k as f64 + 0.5).collect()
    }

    #[test]
    fn mean_energy_of_origin_samples() {
        let d = SampleSet::new(vec![0.0; 5], vec![0.0; 3]);
        assert_eq!(estimate_mean_energy(&d, &Harmonic::default()).unwrap(), 0.0);
        let none = SampleSet::new(vec![0.0], vec![]);
        assert!(matches!(
            estimate_mean_energy(&none, &Harmonic::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn mean_energy_converges() {
        let b = BasisDescriptor::oscillator(2).build().unwrap();
        for (k, want, tol) in [(0usize, 0.5, 0.01), (1, 1.5, 0.02)] {
            let st = StateVector::basis_state(2, k);
            let d = sample_complementary(&b, &st, 100_000, 100_000, 7).unwrap();
            let e = estimate_mean_energy(&d, &Harmonic::default()).unwrap();
            assert!((e - want).abs() < tol, "{k}: {e}");
        }
    }

    #[test]
    fn covariance_routes_agree() {
        let mut rng = rng_from_seed(3);
        for s in 3..8 {
            let st = StateVector::random(s, &mut rng);
            let e = energies(s);
            let a = constrained_covariance(st.coeffs(), &e, 100.0).unwrap();
            let l = factor_loadings(st.coeffs(), &e).unwrap();
            assert_eq!(l.ncols(), s - 2);
            let b = covariance_from_loadings(&l, 100.0);
            assert!(max_abs(&(&a - &b)) < 1e-10);
            let v = DVector::from_column_slice(st.coeffs());
            let ev = DVector::from_iterator(s, st.coeffs().iter().zip(&e).map(|(c, e)| c * e));
            assert!((&a * v).norm() < 1e-12);
            assert!((&a * ev).norm() < 1e-12);
            assert!((trace(&a).re - (s as f64 - 2.0) / 100.0).abs() < 1e-10);
            let eig = hermitian_eigenvalues(&(a * C64::new(100.0, 0.0)));
            assert!(eig[0].abs() < 1e-9 && eig[1].abs() < 1e-9);
            assert!(eig[2..].iter().all(|x| (x - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn zero_variance_rejected() {
        assert!(matches!(
            constrained_covariance(&[c(1.0, 0.0), c(0.0, 0.0)], &[0.5, 1.5], 10.0),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn recovers_time_translation() {
        let r = StateVector::new(vec![c(0.6, 0.1), c(0.5, -0.3), c(0.2, 0.4), c(0.1, 0.2)]).unwrap();
        let e = energies(4);
        let shifted = StateVector::new(
            r.coeffs().iter().zip(&e).map(|(x, en)| x * C64::from_polar(1.0, en * 0.3)).collect(),
        )
        .unwrap();
        let (out, g) = time_gauge_fix(&shifted, &r, &e).unwrap();
        assert!((g.t0 - 0.3).abs() < 1e-9, "{g:?}");
        assert!(distance(out.coeffs(), r.coeffs()) < 1e-9);
    }

    #[test]
    fn time_gauge_is_optimal_on_grid() {
        let r = StateVector::new(vec![c(0.6, 0.1), c(0.5, -0.3), c(0.2, 0.4)]).unwrap();
        let e = energies(3);
        let est = StateVector::new(vec![c(0.58, 0.15), c(0.52, -0.25), c(0.18, 0.43)]).unwrap();
        let (out, _) = time_gauge_fix(&est, &r, &e).unwrap();
        let best = distance(out.coeffs(), r.coeffs());
        for i in 0..100 {
            for j in 0..100 {
                let (a, t) = (-0.5 + i as f64 * 0.01, -0.5 + j as f64 * 0.01);
                let trial: Vec<C64> = est
                    .coeffs()
                    .iter()
                    .zip(&e)
                    .map(|(x, en)| x * C64::from_polar(1.0, a + t * en))
                    .collect();
                assert!(best <= distance(&trial, r.coeffs()) + 1e-12);
            }
        }
    }

    #[test]
    fn single_component_reduces_to_phase() {
        let r = StateVector::basis_state(3, 1);
        let est = r.with_phase(0.4);
        let (out, g) = time_gauge_fix(&est, &r, &energies(3)).unwrap();
        assert_eq!(g.t0, 0.0);
        assert!(distance(out.coeffs(), r.coeffs()) < 1e-12);
    }

    #[test]
    fn basis_size_rule() {
        assert_eq!(optimal_basis_size(1.0, 1.0, 100.0).unwrap(), 10);
        assert_eq!(optimal_basis_size(2.0, 1.0, 400.0).unwrap(), 9);
        assert_eq!(optimal_basis_size(1.0, 0.1, 1.0).unwrap(), 1);
        assert!(optimal_basis_size(0.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn constrained_solver() {
        let b = BasisDescriptor::oscillator(4).build().unwrap();
        let truth = StateVector::new(vec![c(0.8, 0.0), c(0.3, 0.3), c(0.2, -0.3), c(0.0, 0.0)]).unwrap();
        let d = sample_complementary(&b, &truth, 150, 150, 5).unwrap();
        let e_bar = estimate_mean_energy(&d, &Harmonic::default()).unwrap();
        let est = solve_constrained(&d, &b, e_bar, &SolverConfig::default()).unwrap();
        let n = 300.0;
        assert!((est.lambda1 + est.lambda2 * e_bar - n).abs() < 1e-6 * n);
        assert!(est.energy_residual < 1e-6 * e_bar);
        assert!(est.residual < 1e-5, "{}", est.residual);
        let free = crate::mle::solve_mle(&d, &b, &SolverConfig::default()).unwrap();
        assert!(est.loglik <= free.loglik + 1e-9);
    }

    #[test]
    fn unconstrained_energy_reproduces_free_estimate() {
        let b = BasisDescriptor::oscillator(3).build().unwrap();
        let truth = StateVector::new(vec![c(0.7, 0.0), c(0.4, 0.4), c(0.1, -0.4)]).unwrap();
        let d = sample_complementary(&b, &truth, 200, 200, 9).unwrap();
        let cfg = SolverConfig::default();
        let free = crate::mle::solve_mle(&d, &b, &cfg).unwrap();
        let pen = solve_penalized(&d, &b, 0.0, &cfg).unwrap();
        assert!(distance(free.state.coeffs(), pen.state.coeffs()) < 1e-12);
        let e = free.state.mean_diagonal(b.energies());
        let con = solve_constrained(&d, &b, e, &cfg).unwrap();
        assert!(distance(free.state.coeffs(), con.state.coeffs()) < 1e-6);
        assert!(con.lambda2.abs() < 1e-4 * 400.0);
    }

    #[test]
    fn penalized_stationary_point_is_constrained_optimum() {
        let b = BasisDescriptor::oscillator(3).build().unwrap();
        let truth = StateVector::new(vec![c(0.7, 0.0), c(0.4, 0.4), c(0.1, -0.4)]).unwrap();
        let d = sample_complementary(&b, &truth, 100, 100, 2).unwrap();
        let cfg = SolverConfig::default();
        let pen = solve_penalized(&d, &b, 40.0, &cfg).unwrap();
        let e = pen.state.mean_diagonal(b.energies());
        let con = solve_constrained(&d, &b, e, &cfg).unwrap();
        assert!(distance(pen.state.coeffs(), con.state.coeffs()) < 1e-5);
        assert!((con.lambda2 - 40.0).abs() < 1e-3);
    }

    #[test]
    fn shell_projection() {
        let e = energies(4);
        let shell = EnergyShell::new(&e, 1.2).unwrap();
        let v = vec![c(0.5, 0.1), c(0.2, 0.3), c(0.7, 0.0), c(0.1, -0.2)];
        let p = shell.project(&v).unwrap();
        let (m, _) = energy_moments(&p, &e);
        assert!((m - 1.2).abs() < 1e-12);
        // phases are preserved
        for (a, b) in v.iter().zip(&p) {
            assert!((a.arg() - b.arg()).abs() < 1e-12);
        }
        assert!(shell.project(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_none());
        let low = EnergyShell::new(&e, 0.5).unwrap();
        let q = low.project(&v).unwrap();
        assert!((q[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_function_constrained() {
        let b = BasisDescriptor::oscillator(1).build().unwrap();
        let d = sample_complementary(&b, &StateVector::basis_state(1, 0), 10, 10, 1).unwrap();
        let est = solve_constrained(&d, &b, 0.5, &SolverConfig::default()).unwrap();
        assert!((est.state.coeffs()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((est.lambda1 + est.lambda2 * 0.5 - 20.0).abs() < 1e-9);
        assert!(solve_constrained(&d, &b, 3.0, &SolverConfig::default()).is_err());
    }
}
