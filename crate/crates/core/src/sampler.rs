//! Seeded synthetic measurements from a known state.
//!
//! Every draw comes from a `ChaCha8Rng` seeded with `seed_from_u64`, which gives
//! the same stream on every platform. Continuous samples use inverse-CDF sampling
//! of the tabulated density with linear interpolation between grid nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::basis::{BasisSet, Space, StateVector};
use crate::linalg::C64;
use crate::{Error, Result};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleMeta {
    pub seed: Option<u64>,
    pub true_state: Option<Vec<C64>>,
}

/// Coordinate and momentum measurement records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSet {
    pub coord: Vec<f64>,
    pub mom: Vec<f64>,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn new(coord: Vec<f64>, mom: Vec<f64>) -> Self {
        SampleSet {
            coord,
            mom,
            meta: SampleMeta::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.coord.len()
    }

    pub fn m(&self) -> usize {
        self.mom.len()
    }

    pub fn total(&self) -> usize {
        self.coord.len() + self.mom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }
}

/// Piecewise-linear CDF over a uniform grid.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    pub fn new(grid: &[f64], density: &[f64]) -> Result<Self> {
        if grid.len() != density.len() || grid.len() < 2 {
            return Err(Error::invalid("density table must match a grid of >= 2 points"));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::invalid("density must be finite and nonnegative"));
        }
        let mut cdf = Vec::with_capacity(grid.len());
        cdf.push(0.0);
        for g in 1..grid.len() {
            let step = 0.5 * (density[g - 1] + density[g]) * (grid[g] - grid[g - 1]);
            cdf.push(cdf[g - 1] + step);
        }
        let total = *cdf.last().unwrap();
        if !(total > 0.0) {
            return Err(Error::invalid("density has zero mass on the grid"));
        }
        for v in &mut cdf {
            *v /= total;
        }
        Ok(InverseCdf {
            grid: grid.to_vec(),
            cdf,
        })
    }

    /// Quantile of `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let g = self.cdf.partition_point(|&f| f <= u).clamp(1, self.cdf.len() - 1);
        let (f0, f1) = (self.cdf[g - 1], self.cdf[g]);
        let (x0, x1) = (self.grid[g - 1], self.grid[g]);
        if f1 > f0 {
            x0 + (u - f0) / (f1 - f0) * (x1 - x0)
        } else {
            x0
        }
    }

    /// CDF at `x` (linear between nodes).
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.grid[0] {
            return 0.0;
        }
        if x >= *self.grid.last().unwrap() {
            return 1.0;
        }
        let g = self.grid.partition_point(|&v| v <= x).clamp(1, self.grid.len() - 1);
        let t = (x - self.grid[g - 1]) / (self.grid[g] - self.grid[g - 1]);
        self.cdf[g - 1] + t * (self.cdf[g] - self.cdf[g - 1])
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}

/// Draws `n` coordinate samples from `|psi(x)|^2` and then `m` momentum samples
/// from `|psi~(p)|^2`, both from one seeded stream.
pub fn sample_complementary(
    basis: &BasisSet,
    state: &StateVector,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<SampleSet> {
    let mut rng = rng_from_seed(seed);
    sample_complementary_with(basis, state, n, m, &mut rng).map(|mut set| {
        set.meta.seed = Some(seed);
        set
    })
}

pub fn sample_complementary_with<R: Rng>(
    basis: &BasisSet,
    state: &StateVector,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<SampleSet> {
    let mut coord = Vec::new();
    let mut mom = Vec::new();
    if n > 0 {
        let dens = basis.density_on_grid(state, Space::Coordinate)?;
        coord = InverseCdf::new(basis.grid(), &dens)?.sample(rng, n);
    }
    if m > 0 {
        let dens = basis.density_on_grid(state, Space::Momentum)?;
        mom = InverseCdf::new(basis.momentum_grid(), &dens)?.sample(rng, m);
    }
    Ok(SampleSet {
        coord,
        mom,
        meta: SampleMeta {
            seed: None,
            true_state: Some(state.coeffs().to_vec()),
        },
    })
}

/// Measurement axis given by spherical angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Direction { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    pub fn x() -> Self {
        Direction::new(PI / 2.0, 0.0)
    }

    pub fn y() -> Self {
        Direction::new(PI / 2.0, PI / 2.0)
    }

    pub fn z() -> Self {
        Direction::new(0.0, 0.0)
    }
}

/// Uniform directions on the sphere: `cos(theta)` uniform on `[-1, 1]`, `phi`
/// uniform on `[0, 2 pi)`.
pub fn random_directions<R: Rng>(count: usize, rng: &mut R) -> Vec<Direction> {
    (0..count)
        .map(|_| {
            let ct: f64 = 2.0 * rng.random::<f64>() - 1.0;
            let phi = 2.0 * PI * rng.random::<f64>();
            Direction::new(ct.clamp(-1.0, 1.0).acos(), phi)
        })
        .collect()
}

/// Projection counts along a set of directions.
///
/// `counts[d][k]` is the number of particles found with projection `m = j - k`
/// along `directions[d]`; for spin 1/2, `k = 0` is "+" and `k = 1` is "-".
#[derive(Debug, Clone, PartialEq)]
pub struct SpinCounts {
    pub two_j: u32,
    pub directions: Vec<Direction>,
    pub counts: Vec<Vec<u64>>,
}

impl SpinCounts {
    pub fn new(two_j: u32, directions: Vec<Direction>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let dim = two_j as usize + 1;
        if directions.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: directions.len(),
                got: counts.len(),
            });
        }
        if let Some(bad) = counts.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(SpinCounts {
            two_j,
            directions,
            counts,
        })
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn plus(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c[0]).collect()
    }

    pub fn minus(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c[c.len() - 1]).collect()
    }

    pub fn shots(&self, d: usize) -> u64 {
        self.counts[d].iter().sum()
    }

    /// Total number of measured particles.
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

fn categorical<R: Rng>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().unwrap();
    let u = rng.random::<f64>() * total;
    let idx = cumulative.partition_point(|&c| c <= u);
    let mut idx = idx.min(cumulative.len() - 1);
    // never land on a zero-probability outcome through rounding
    while idx > 0 && cumulative[idx] == cumulative[idx - 1] {
        idx -= 1;
    }
    idx
}

fn multinomial<R: Rng>(probs: &[f64], n: u64, rng: &mut R) -> Vec<u64> {
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p.max(0.0);
        cum.push(acc);
    }
    let mut out = vec![0u64; probs.len()];
    for _ in 0..n {
        out[categorical(&cum, rng)] += 1;
    }
    out
}

/// Multinomial projection counts for a spin-`j` state (`state.len() = 2j + 1`).
pub fn sample_spin(state: &[C64], directions: &[Direction], shots: u64, seed: u64) -> Result<SpinCounts> {
    let mut rng = rng_from_seed(seed);
    sample_spin_with(state, directions, shots, &mut rng)
}

pub fn sample_spin_with<R: Rng>(
    state: &[C64],
    directions: &[Direction],
    shots: u64,
    rng: &mut R,
) -> Result<SpinCounts> {
    if state.is_empty() {
        return Err(Error::invalid("spin state must be nonempty"));
    }
    let two_j = (state.len() - 1) as u32;
    let counts = directions
        .iter()
        .map(|d| {
            let probs = crate::spin::outcome_probabilities(state, *d)?;
            Ok(multinomial(&probs, shots, rng))
        })
        .collect::<Result<Vec<_>>>()?;
    SpinCounts::new(two_j, directions.to_vec(), counts)
}

/// Multinomial counts for a discrete register.
pub fn sample_register(probabilities: &[f64], n: u64, seed: u64) -> Result<Vec<u64>> {
    let mut rng = rng_from_seed(seed);
    sample_register_with(probabilities, n, &mut rng)
}

pub fn sample_register_with<R: Rng>(probabilities: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    if probabilities.is_empty() {
        return Err(Error::invalid("probability vector is empty"));
    }
    if probabilities.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("probabilities must be finite and nonnegative"));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
    }
    Ok(multinomial(probabilities, n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisDescriptor;

    #[test]
    fn empty_request_gives_empty_set() {
        let b = BasisDescriptor::oscillator(2).build().unwrap();
        let st = StateVector::basis_state(2, 0);
        let s = sample_complementary(&b, &st, 0, 0, 1).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn same_seed_same_samples() {
        let b = BasisDescriptor::oscillator(3).build().unwrap();
        let st = StateVector::from_real(&[1.0, 0.5, 0.2]).unwrap();
        let a = sample_complementary(&b, &st, 50, 40, 99).unwrap();
        let c = sample_complementary(&b, &st, 50, 40, 99).unwrap();
        assert_eq!(a, c);
        let d = sample_complementary(&b, &st, 50, 40, 100).unwrap();
        assert_ne!(a.coord, d.coord);
    }

    #[test]
    fn ground_state_second_moment() {
        // <x^2> of phi_0 by quadrature is 1/2.
        let b = BasisDescriptor::oscillator(2).build().unwrap();
        let st = StateVector::basis_state(2, 0);
        let dens = b.density_on_grid(&st, Space::Coordinate).unwrap();
        let x2: Vec<f64> = dens.iter().zip(b.grid()).map(|(d, x)| d * x * x).collect();
        let oracle = b.integrate(&x2);
        assert!((oracle - 0.5).abs() < 1e-10);
        let s = sample_complementary(&b, &st, 100_000, 0, 7).unwrap();
        let mean = s.coord.iter().map(|x| x * x).sum::<f64>() / s.n() as f64;
        assert!((mean - oracle).abs() < 0.02, "{mean}");
    }

    #[test]
    fn register_degenerate_and_uniform() {
        assert_eq!(sample_register(&[1.0, 0.0, 0.0, 0.0], 7, 3).unwrap(), vec![7, 0, 0, 0]);
        assert_eq!(sample_register(&[0.25; 4], 0, 3).unwrap(), vec![0; 4]);
        let counts = sample_register(&[0.25; 4], 100_000, 11).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 100_000);
        for c in counts {
            // multinomial sd = sqrt(n p (1-p)) ~ 137; 500 is > 3.6 sd
            assert!((c as f64 - 25_000.0).abs() < 500.0, "{c}");
        }
        assert!(sample_register(&[0.5, 0.6], 5, 1).is_err());
        assert!(sample_register(&[-0.5, 1.5], 5, 1).is_err());
    }

    #[test]
    fn spin_samples() {
        let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let z = sample_spin(&up, &[Direction::z()], 1000, 5).unwrap();
        assert_eq!(z.counts[0], vec![1000, 0]);
        let eq = sample_spin(&up, &[Direction::new(PI / 2.0, 1.3)], 100_000, 5).unwrap();
        let frac = eq.plus()[0] as f64 / 100_000.0;
        assert!((frac - 0.5).abs() < 0.01);
        let mut rng = rng_from_seed(8);
        let dirs = random_directions(200, &mut rng);
        let many = sample_spin_with(&up, &dirs, 50, &mut rng).unwrap();
        assert_eq!(many.total(), 10_000);
        assert!((0..200).all(|d| many.shots(d) == 50));
    }

    #[test]
    fn directions_are_unit_and_spread() {
        let mut rng = rng_from_seed(1);
        let dirs = random_directions(20_000, &mut rng);
        let mut mean = [0.0; 3];
        for d in &dirs {
            let v = d.unit_vector();
            assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0).abs() < 1e-12);
            for k in 0..3 {
                mean[k] += v[k] / dirs.len() as f64;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.03));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let grid: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let dens = vec![1.0; 11];
        let inv = InverseCdf::new(&grid, &dens).unwrap();
        for u in [0.0, 0.13, 0.5, 0.99] {
            assert!((inv.cdf(inv.quantile(u)) - u).abs() < 1e-12);
        }
    }
}
