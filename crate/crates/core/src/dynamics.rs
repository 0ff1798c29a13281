//! Heisenberg matrix relation as a test of the expansion basis.
//!
//! If `c_j(t) = c_j exp(-i w_j t)` and the mean position obeys Newton's law on
//! average, `d^2 <x>/dt^2 = -<U'(x)>` (unit mass), then for every pair of
//! levels with generic amplitudes
//!
//! ```text
//! (w_j - w_k)^2 <k|x|j> = <k|U'|j>
//! ```
//!
//! The oscillator eigenbasis satisfies this identically; an arbitrary basis with
//! the same frequencies does not. [`ehrenfest_residual`] measures the violation
//! and [`averaged_newton_check`] checks the time-domain form on a state.

use serde::{Deserialize, Serialize};

use crate::basis::{derivative, BasisSet, StateVector};
use crate::linalg::{hermiticity_residual, CMatrix, C64};
use crate::potential::Potential;
use crate::{Error, Result};

/// Frequencies closer than this are treated as degenerate and their pair skipped.
const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MatrixElements {
    /// `<k|x|j>`.
    pub x: CMatrix,
    /// `<k|dU/dx|j>`.
    pub force: CMatrix,
    /// `<i|H|j>` with `H = -d^2/dx^2 / 2 + U`.
    pub h: CMatrix,
    /// Level frequencies `w_j = E_j`.
    pub frequencies: Vec<f64>,
}

impl MatrixElements {
    pub fn size(&self) -> usize {
        self.frequencies.len()
    }

    /// Largest Hermiticity residual of the three matrices.
    pub fn hermiticity(&self) -> f64 {
        hermiticity_residual(&self.x)
            .max(hermiticity_residual(&self.force))
            .max(hermiticity_residual(&self.h))
    }
}

/// `V^dagger diag(w f) V`, symmetrized.
fn sandwich(values: &CMatrix, weights: &[f64], f: &[f64]) -> CMatrix {
    let scaled = CMatrix::from_fn(values.nrows(), values.ncols(), |g, j| values[(g, j)] * (weights[g] * f[g]));
    let m = values.adjoint() * scaled;
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Quadrature matrix elements on the basis grid. The kinetic term uses the
/// symmetric form `(1/2) int conj(phi_i') phi_j'`, with eighth-order
/// differences for the derivatives.
pub fn build_matrix_elements(basis: &BasisSet, potential: &dyn Potential) -> Result<MatrixElements> {
    let grid = basis.grid();
    let w = basis.weights();
    let v = basis.coord_values();
    let s = basis.size();

    let x = sandwich(v, w, grid);
    let du: Vec<f64> = grid.iter().map(|&g| potential.derivative(g)).collect();
    let u: Vec<f64> = grid.iter().map(|&g| potential.value(g)).collect();
    if du.iter().chain(&u).any(|z| !z.is_finite()) {
        return Err(Error::invalid("potential is not finite on the grid"));
    }
    let force = sandwich(v, w, &du);

    let mut dv = CMatrix::zeros(grid.len(), s);
    for j in 0..s {
        let col: Vec<C64> = v.column(j).iter().copied().collect();
        for (g, d) in derivative(&col, basis.dx()).into_iter().enumerate() {
            dv[(g, j)] = d;
        }
    }
    let kinetic = sandwich(&dv, w, &vec![0.5; grid.len()]);
    let h = kinetic + sandwich(v, w, &u);

    Ok(MatrixElements {
        x,
        force,
        h,
        frequencies: basis.energies().to_vec(),
    })
}

/// `max |(w_j - w_k)^2 <k|x|j> - <k|U'|j>|` over the interior block.
///
/// The last level is excluded: its partner `<s-1|x|s>` lies outside the
/// truncated basis. Pairs of distinct levels with equal frequencies are skipped.
pub fn ehrenfest_residual(elems: &MatrixElements) -> f64 {
    let s = elems.size();
    let inner = s.saturating_sub(1).max(1).min(s);
    let w = &elems.frequencies;
    let mut worst: f64 = 0.0;
    for k in 0..inner {
        for j in 0..inner {
            if j != k && (w[j] - w[k]).abs() < DEGENERATE_GAP {
                continue;
            }
            let lhs = elems.x[(k, j)] * (w[j] - w[k]).powi(2);
            worst = worst.max((lhs - elems.force[(k, j)]).norm());
        }
    }
    worst
}

/// `c_j(t) = c_j exp(-i w_j t)`.
pub fn evolve(state: &StateVector, frequencies: &[f64], t: f64) -> Vec<C64> {
    state
        .coeffs()
        .iter()
        .zip(frequencies)
        .map(|(c, w)| c * C64::from_polar(1.0, -w * t))
        .collect()
}

/// `c(t)^dagger A c(t)`.
pub fn expectation_sandwich(state: &StateVector, a: &CMatrix, frequencies: &[f64], t: f64) -> f64 {
    let c = evolve(state, frequencies, t);
    let v = a * nalgebra::DVector::from_column_slice(&c);
    c.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().re
}

/// Frequency expansion `sum_kj conj(c_k) c_j A_kj exp(i (w_k - w_j) t)` and its
/// exact second time derivative.
pub fn expectation_spectral(state: &StateVector, a: &CMatrix, frequencies: &[f64], t: f64) -> (f64, f64) {
    let c = state.coeffs();
    let mut value = C64::new(0.0, 0.0);
    let mut second = C64::new(0.0, 0.0);
    for k in 0..c.len() {
        for j in 0..c.len() {
            let dw = frequencies[k] - frequencies[j];
            let term = c[k].conj() * c[j] * a[(k, j)] * C64::from_polar(1.0, dw * t);
            value += term;
            second -= term * (dw * dw);
        }
    }
    (value.re, second.re)
}

/// `max_t |d^2<x>/dt^2 + <U'>(t)|` over `t_grid`, unit mass.
pub fn averaged_newton_check(state: &StateVector, elems: &MatrixElements, t_grid: &[f64]) -> Result<f64> {
    if state.len() != elems.size() {
        return Err(Error::DimensionMismatch {
            expected: elems.size(),
            got: state.len(),
        });
    }
    let w = &elems.frequencies;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let (_, accel) = expectation_spectral(state, &elems.x, w, t);
            let (force, _) = expectation_spectral(state, &elems.force, w, t);
            (accel + force).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub s: usize,
    pub potential_name: String,
    pub residual: f64,
    /// Index of the excluded outermost level.
    pub excluded_band: usize,
}

pub fn dynamics_report(basis: &BasisSet, potential: &dyn Potential, potential_name: &str) -> Result<DynamicsReport> {
    let elems = build_matrix_elements(basis, potential)?;
    Ok(DynamicsReport {
        s: basis.size(),
        potential_name: potential_name.to_string(),
        residual: ehrenfest_residual(&elems),
        excluded_band: basis.size().saturating_sub(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisDescriptor;
    use crate::potential::Harmonic;

    fn oscillator(s: usize) -> MatrixElements {
        let b = BasisDescriptor::oscillator(s).build().unwrap();
        build_matrix_elements(&b, &Harmonic::default()).unwrap()
    }

    #[test]
    fn position_is_the_ladder_band() {
        let e = oscillator(5);
        for k in 0..5usize {
            for j in 0..5usize {
                let want = if k.abs_diff(j) == 1 { (k.max(j) as f64 / 2.0).sqrt() } else { 0.0 };
                assert!((e.x[(k, j)].re - want).abs() < 1e-6, "{k} {j}");
                assert!(e.x[(k, j)].im.abs() < 1e-12);
            }
        }
        assert!(e.hermiticity() < 1e-10);
    }

    #[test]
    fn hamiltonian_is_the_oscillator_spectrum() {
        let e = oscillator(8);
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { i as f64 + 0.5 } else { 0.0 };
                assert!((e.h[(i, j)].re - want).abs() < 1e-4, "{i} {j} {}", e.h[(i, j)]);
            }
        }
    }

    #[test]
    fn oscillator_basis_satisfies_the_relation() {
        assert!(ehrenfest_residual(&oscillator(20)) < 1e-6);
        assert!(ehrenfest_residual(&oscillator(2)) < 1e-8);
    }

    #[test]
    fn wrong_frequencies_break_it() {
        let mut e = oscillator(6);
        e.frequencies = (0..6).map(|j| (j * j) as f64).collect();
        assert!(ehrenfest_residual(&e) > 0.5);
    }

    #[test]
    fn histogram_basis_fails() {
        let b = BasisDescriptor::histogram(6, 4.0, 1024).build().unwrap();
        let e = build_matrix_elements(&b, &Harmonic::default()).unwrap();
        assert!(ehrenfest_residual(&e) > 0.1);
        let st = StateVector::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let t: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        assert!(averaged_newton_check(&st, &e, &t).unwrap() > 0.1);
    }

    #[test]
    fn newton_holds_on_oscillator_states() {
        let e = oscillator(4);
        let t: Vec<f64> = (0..50).map(|i| 0.13 * i as f64).collect();
        let ground = StateVector::basis_state(4, 0);
        assert!(averaged_newton_check(&ground, &e, &t).unwrap() < 1e-12);
        let sup = StateVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(averaged_newton_check(&sup, &e, &t).unwrap() < 1e-6);
        // <x>(t) = sqrt(1/2) cos t for (|0> + |1>)/sqrt 2.
        for &tt in &t {
            let (x, _) = expectation_spectral(&sup, &e.x, &e.frequencies, tt);
            assert!((x - tt.cos() / 2f64.sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn spectral_and_sandwich_routes_agree() {
        let e = oscillator(5);
        let mut rng = crate::sampler::rng_from_seed(4);
        let st = StateVector::random(5, &mut rng);
        for t in [0.0, 0.4, 2.1, 7.3] {
            let (a, _) = expectation_spectral(&st, &e.x, &e.frequencies, t);
            let b = expectation_sandwich(&st, &e.x, &e.frequencies, t);
            assert!((a - b).abs() < 1e-10);
            let (a, _) = expectation_spectral(&st, &e.force, &e.frequencies, t);
            let b = expectation_sandwich(&st, &e.force, &e.frequencies, t);
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn report_serializes() {
        let b = BasisDescriptor::oscillator(4).build().unwrap();
        let r = dynamics_report(&b, &Harmonic::default(), "harmonic").unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["s"], 4);
        assert_eq!(v["excluded_band"], 3);
    }
}
