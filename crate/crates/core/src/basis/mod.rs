//! Expansion bases, state evaluation and Fourier pairing.
//!
//! Units are `hbar = m = omega = 1`. A [`BasisSet`] is immutable after
//! construction and can be shared between threads.
//!
//! Two kinds exist:
//!
//! * `oscillator`: Hermite functions `phi_n`, energies `n + 1/2`, and the analytic
//!   momentum functions `(-i)^n phi_n(p)`. The momentum grid equals the coordinate
//!   grid because the oscillator is self-dual.
//! * `histogram`: `s` equal-width boxes `1/sqrt(h)` on `[-L, L]` with momentum
//!   functions `h^{1/2} (2 pi)^{-1/2} exp(-ip x_c) sinc(ph/2)`. Its nominal
//!   energies are `n + 1/2` as well; they carry no physical meaning and exist so
//!   the basis can be fed to the dynamics check as a negative control.

mod fourier;
pub mod hermite;

pub use fourier::{
    centered_fourier, continuous_transform, discrete_fourier, inverse_centered_fourier,
    inverse_discrete_fourier,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::linalg::{inner, trapezoid_weights, CMatrix, C64};
use crate::{Error, Result};

/// Largest allowed `|phi_{s-1}|` at the grid boundary.
pub const BOUNDARY_DECAY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Oscillator,
    Histogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Coordinate,
    Momentum,
}

/// Serializable basis description; the matrices are regenerated from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub kind: BasisKind,
    pub s: usize,
    pub grid_halfwidth: f64,
    pub grid_points: usize,
}

impl BasisDescriptor {
    /// Oscillator basis on the default grid for `s` functions.
    ///
    /// The grid is `[-8, 8]` with 1024 points while that keeps `phi_{s-1}` below
    /// [`BOUNDARY_DECAY`] at the edge, and widens past the classical turning point
    /// `sqrt(2s - 1)` otherwise.
    pub fn oscillator(s: usize) -> Self {
        let (grid_halfwidth, grid_points) = default_grid(s);
        BasisDescriptor {
            kind: BasisKind::Oscillator,
            s,
            grid_halfwidth,
            grid_points,
        }
    }

    pub fn histogram(s: usize, grid_halfwidth: f64, grid_points: usize) -> Self {
        BasisDescriptor {
            kind: BasisKind::Histogram,
            s,
            grid_halfwidth,
            grid_points,
        }
    }

    pub fn build(&self) -> Result<BasisSet> {
        match self.kind {
            BasisKind::Oscillator => {
                build_oscillator_basis(self.s, self.grid_halfwidth, self.grid_points)
            }
            BasisKind::Histogram => {
                build_histogram_basis(self.s, self.grid_halfwidth, self.grid_points)
            }
        }
    }
}

pub fn default_grid(s: usize) -> (f64, usize) {
    let turning = (2.0 * s.max(1) as f64 - 1.0).sqrt();
    let halfwidth = (turning + 4.0).ceil().max(8.0);
    let points = if halfwidth <= 12.0 { 1024 } else { 2048 };
    (halfwidth, points)
}

/// Normalized coefficient vector over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    c: Vec<C64>,
}

impl StateVector {
    /// Normalizes `c`; fails on an empty or zero vector.
    pub fn new(mut c: Vec<C64>) -> Result<Self> {
        if c.is_empty() || !crate::linalg::normalize(&mut c) {
            return Err(Error::invalid("state vector must be nonempty and nonzero"));
        }
        Ok(StateVector { c })
    }

    /// Wraps coefficients that are already normalized.
    pub(crate) fn from_normalized(c: Vec<C64>) -> Self {
        StateVector { c }
    }

    /// Haar-random state: independent complex Gaussian components, normalized.
    pub fn random<R: rand::Rng + ?Sized>(s: usize, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        assert!(s > 0, "state dimension must be positive");
        loop {
            let c: Vec<C64> = (0..s)
                .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            if let Ok(v) = Self::new(c) {
                return v;
            }
        }
    }

    pub fn from_real(c: &[f64]) -> Result<Self> {
        Self::new(c.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Basis vector `e_index` of dimension `s`.
    pub fn basis_state(s: usize, index: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); s];
        c[index] = C64::new(1.0, 0.0);
        StateVector { c }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.c)
    }

    pub fn overlap(&self, other: &StateVector) -> C64 {
        inner(&self.c, &other.c)
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn with_phase(&self, alpha: f64) -> StateVector {
        let rot = C64::from_polar(1.0, alpha);
        StateVector {
            c: self.c.iter().map(|x| x * rot).collect(),
        }
    }

    /// Density matrix `c c^dagger`.
    pub fn projector(&self) -> CMatrix {
        crate::linalg::projector(&self.c)
    }

    /// Mean of a diagonal observable, `sum_i e_i |c_i|^2`.
    pub fn mean_diagonal(&self, values: &[f64]) -> f64 {
        self.c.iter().zip(values).map(|(x, e)| e * x.norm_sqr()).sum()
    }
}

/// Basis functions tabulated on a uniform grid, with analytic point evaluation.
#[derive(Debug, Clone)]
pub struct BasisSet {
    descriptor: BasisDescriptor,
    grid: Vec<f64>,
    dx: f64,
    weights: Vec<f64>,
    energies: Vec<f64>,
    coord: CMatrix,
    mom: CMatrix,
}

fn uniform_grid(halfwidth: f64, points: usize) -> Result<(Vec<f64>, f64)> {
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(Error::invalid("grid halfwidth must be positive"));
    }
    if points < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    let dx = 2.0 * halfwidth / (points - 1) as f64;
    let grid = (0..points).map(|i| -halfwidth + i as f64 * dx).collect();
    Ok((grid, dx))
}

/// Hermite-function basis of size `s` on `[-halfwidth, halfwidth]`.
pub fn build_oscillator_basis(s: usize, grid_halfwidth: f64, grid_points: usize) -> Result<BasisSet> {
    if s == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    let (grid, dx) = uniform_grid(grid_halfwidth, grid_points)?;
    let edge = hermite::hermite_functions(grid_halfwidth, s);
    let worst = edge[s - 1].abs();
    if worst >= BOUNDARY_DECAY {
        return Err(Error::GridTooNarrow {
            index: s - 1,
            value: worst,
        });
    }
    let mut coord = CMatrix::zeros(grid_points, s);
    let mut mom = CMatrix::zeros(grid_points, s);
    let mut row = vec![0.0; s];
    for (g, &x) in grid.iter().enumerate() {
        hermite::hermite_functions_into(x, &mut row);
        for n in 0..s {
            coord[(g, n)] = C64::new(row[n], 0.0);
            mom[(g, n)] = minus_i_pow(n) * row[n];
        }
    }
    Ok(BasisSet {
        descriptor: BasisDescriptor {
            kind: BasisKind::Oscillator,
            s,
            grid_halfwidth,
            grid_points,
        },
        weights: trapezoid_weights(grid_points, dx),
        grid,
        dx,
        energies: (0..s).map(|n| n as f64 + 0.5).collect(),
        coord,
        mom,
    })
}

/// Box basis of `s` equal bins covering `[-halfwidth, halfwidth]`.
pub fn build_histogram_basis(s: usize, grid_halfwidth: f64, grid_points: usize) -> Result<BasisSet> {
    if s == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    let (grid, dx) = uniform_grid(grid_halfwidth, grid_points)?;
    let descriptor = BasisDescriptor {
        kind: BasisKind::Histogram,
        s,
        grid_halfwidth,
        grid_points,
    };
    let mut basis = BasisSet {
        descriptor,
        weights: trapezoid_weights(grid_points, dx),
        coord: CMatrix::zeros(grid_points, s),
        mom: CMatrix::zeros(grid_points, s),
        grid,
        dx,
        energies: (0..s).map(|n| n as f64 + 0.5).collect(),
    };
    for g in 0..grid_points {
        let x = basis.grid[g];
        let cr = basis.coord_row(x);
        let mr = basis.mom_row(x);
        for n in 0..s {
            basis.coord[(g, n)] = cr[n];
            basis.mom[(g, n)] = mr[n];
        }
    }
    Ok(basis)
}

/// `(-i)^n`.
pub fn minus_i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

// First-derivative stencil, eighth order.
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Eighth-order centered first derivative; values beyond the grid count as zero.
pub fn derivative(values: &[C64], dx: f64) -> Vec<C64> {
    let n = values.len();
    let at = |i: isize| -> C64 {
        if i < 0 || i as usize >= n {
            C64::new(0.0, 0.0)
        } else {
            values[i as usize]
        }
    };
    (0..n as isize)
        .map(|i| {
            D1.iter()
                .enumerate()
                .map(|(k, w)| (at(i + k as isize + 1) - at(i - k as isize - 1)) * *w)
                .sum::<C64>()
                / dx
        })
        .collect()
}

impl BasisSet {
    pub fn descriptor(&self) -> &BasisDescriptor {
        &self.descriptor
    }

    pub fn kind(&self) -> BasisKind {
        self.descriptor.kind
    }

    pub fn size(&self) -> usize {
        self.descriptor.s
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Momentum grid. Identical to the coordinate grid.
    pub fn momentum_grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `[grid x s]` table of `phi_i(x)`.
    pub fn coord_values(&self) -> &CMatrix {
        &self.coord
    }

    /// `[grid x s]` table of the momentum functions.
    pub fn mom_values(&self) -> &CMatrix {
        &self.mom
    }

    pub fn values(&self, space: Space) -> &CMatrix {
        match space {
            Space::Coordinate => &self.coord,
            Space::Momentum => &self.mom,
        }
    }

    fn histogram_width(&self) -> f64 {
        2.0 * self.descriptor.grid_halfwidth / self.descriptor.s as f64
    }

    /// All basis functions at coordinate `x`, evaluated analytically.
    pub fn coord_row(&self, x: f64) -> Vec<C64> {
        let s = self.descriptor.s;
        match self.descriptor.kind {
            BasisKind::Oscillator => hermite::hermite_functions(x, s)
                .into_iter()
                .map(|v| C64::new(v, 0.0))
                .collect(),
            BasisKind::Histogram => {
                let mut row = vec![C64::new(0.0, 0.0); s];
                let l = self.descriptor.grid_halfwidth;
                if (-l..=l).contains(&x) {
                    let h = self.histogram_width();
                    let bin = (((x + l) / h).floor() as usize).min(s - 1);
                    row[bin] = C64::new(1.0 / h.sqrt(), 0.0);
                }
                row
            }
        }
    }

    /// All momentum functions at `p`, evaluated analytically.
    pub fn mom_row(&self, p: f64) -> Vec<C64> {
        let s = self.descriptor.s;
        match self.descriptor.kind {
            BasisKind::Oscillator => hermite::hermite_functions(p, s)
                .into_iter()
                .enumerate()
                .map(|(n, v)| minus_i_pow(n) * v)
                .collect(),
            BasisKind::Histogram => {
                let h = self.histogram_width();
                let l = self.descriptor.grid_halfwidth;
                let u = 0.5 * p * h;
                let sinc = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
                let amp = (h / (2.0 * PI)).sqrt() * sinc;
                (0..s)
                    .map(|n| {
                        let center = -l + (n as f64 + 0.5) * h;
                        C64::from_polar(amp, -p * center)
                    })
                    .collect()
            }
        }
    }

    pub fn row(&self, space: Space, point: f64) -> Vec<C64> {
        match space {
            Space::Coordinate => self.coord_row(point),
            Space::Momentum => self.mom_row(point),
        }
    }

    fn check_dim(&self, state: &StateVector) -> Result<()> {
        if state.len() != self.descriptor.s {
            return Err(Error::DimensionMismatch {
                expected: self.descriptor.s,
                got: state.len(),
            });
        }
        Ok(())
    }

    /// `psi(point) = sum_i c_i phi_i(point)` (or the momentum analogue).
    pub fn evaluate_psi(&self, state: &StateVector, space: Space, points: &[f64]) -> Result<Vec<C64>> {
        self.check_dim(state)?;
        let l = self.descriptor.grid_halfwidth;
        points
            .iter()
            .map(|&x| {
                if !(x >= -l && x <= l) {
                    return Err(Error::Extrapolation(x));
                }
                Ok(inner_row(&self.row(space, x), state.coeffs()))
            })
            .collect()
    }

    /// `psi` on the tabulation grid.
    pub fn psi_on_grid(&self, state: &StateVector, space: Space) -> Result<Vec<C64>> {
        self.check_dim(state)?;
        let table = self.values(space);
        let cv = nalgebra::DVector::from_column_slice(state.coeffs());
        Ok((table * cv).iter().copied().collect())
    }

    /// `|psi|^2` on the tabulation grid.
    pub fn density_on_grid(&self, state: &StateVector, space: Space) -> Result<Vec<f64>> {
        Ok(self
            .psi_on_grid(state, space)?
            .iter()
            .map(|v| v.norm_sqr())
            .collect())
    }

    /// Trapezoidal integral of grid samples.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Quadrature Gram matrix `G_ij = int conj(phi_i) phi_j`.
    pub fn gram(&self, space: Space) -> CMatrix {
        let t = self.values(space);
        let weighted = CMatrix::from_fn(t.nrows(), t.ncols(), |g, j| t[(g, j)] * self.weights[g]);
        t.adjoint() * weighted
    }

    /// Both sides of the mean-square-momentum identity
    /// `int |dpsi/dx|^2 dx = int p^2 |psi~(p)|^2 dp`.
    ///
    /// The left side uses an eighth-order finite difference on the grid, the right
    /// side quadrature of the analytic momentum function.
    pub fn verify_parseval(&self, state: &StateVector) -> Result<(f64, f64)> {
        if self.kind() != BasisKind::Oscillator {
            return Err(Error::invalid("Parseval check needs a smooth (oscillator) basis"));
        }
        let psi = self.psi_on_grid(state, Space::Coordinate)?;
        let d = derivative(&psi, self.dx);
        let lhs = self.integrate(&d.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>());
        let phat = self.psi_on_grid(state, Space::Momentum)?;
        let rhs = self.integrate(
            &phat
                .iter()
                .zip(&self.grid)
                .map(|(v, p)| p * p * v.norm_sqr())
                .collect::<Vec<_>>(),
        );
        Ok((lhs, rhs))
    }

    /// Numerical transform of a grid function (see [`continuous_transform`]).
    pub fn numeric_momentum(&self, values: &[C64]) -> (Vec<f64>, Vec<C64>) {
        continuous_transform(values, self.grid[0], self.dx)
    }
}

fn inner_row(row: &[C64], c: &[C64]) -> C64 {
    row.iter().zip(c).map(|(a, b)| a * b).sum()
}

/// Evaluates `sum_i row_i c_i`.
pub fn contract(row: &[C64], c: &[C64]) -> C64 {
    inner_row(row, c)
}
