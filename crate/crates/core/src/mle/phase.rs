//! Alternating-projection phase retrieval from two density histograms.
//!
//! Both histograms are discrete probabilities on centered grids
//! `x_j = (j - N/2) dx` and `p_k = (k - N/2) 2 pi / (N dx)`, where the centered
//! unitary DFT is the sampled continuous Fourier transform. The zero-order guess
//! is `sqrt(hist_x)` with zero phase; each round transforms to momentum space,
//! imposes `sqrt(hist_p)` as the modulus, transforms back and imposes `sqrt(hist_x)`.

use crate::basis::{centered_fourier, inverse_centered_fourier};
use crate::linalg::C64;
use crate::sampler::SampleSet;
use crate::{Error, Result};

/// Stop once the momentum-modulus mismatch improves by less than this.
pub const PLATEAU_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PhaseRetrieval {
    /// Discrete amplitudes on the coordinate grid, `sum |psi_j|^2 = 1`.
    /// Divide by `sqrt(dx)` for the wave function.
    pub psi: Vec<C64>,
    /// `|| |F psi| - sqrt(hist_p) ||` before each momentum projection.
    pub errors: Vec<f64>,
}

fn amplitudes(hist: &[f64], name: &str) -> Result<Vec<f64>> {
    if hist.iter().any(|h| !(*h >= 0.0)) {
        return Err(Error::invalid(format!("{name} histogram has negative or NaN entries")));
    }
    let total: f64 = hist.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid(format!("{name} histogram is empty")));
    }
    Ok(hist.iter().map(|h| (h / total).sqrt()).collect())
}

fn impose(values: &[C64], modulus: &[f64]) -> Vec<C64> {
    values
        .iter()
        .zip(modulus)
        .map(|(v, &a)| {
            if v.norm() > 0.0 {
                v / v.norm() * a
            } else {
                C64::new(a, 0.0)
            }
        })
        .collect()
}

fn mismatch(values: &[C64], modulus: &[f64]) -> f64 {
    values
        .iter()
        .zip(modulus)
        .map(|(v, a)| (v.norm() - a).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn phase_retrieval(hist_x: &[f64], hist_p: &[f64], max_iter: usize) -> Result<PhaseRetrieval> {
    if hist_x.len() != hist_p.len() {
        return Err(Error::DimensionMismatch {
            expected: hist_x.len(),
            got: hist_p.len(),
        });
    }
    let ax = amplitudes(hist_x, "coordinate")?;
    let ap = amplitudes(hist_p, "momentum")?;
    let mut psi: Vec<C64> = ax.iter().map(|&a| C64::new(a, 0.0)).collect();
    let mut errors = Vec::new();
    for _ in 0..max_iter {
        let mom = centered_fourier(&psi);
        let err = mismatch(&mom, &ap);
        let plateau = errors.last().is_some_and(|&prev: &f64| prev - err < PLATEAU_TOL);
        errors.push(err);
        if plateau {
            break;
        }
        psi = impose(&inverse_centered_fourier(&impose(&mom, &ap)), &ax);
    }
    Ok(PhaseRetrieval { psi, errors })
}

/// Centered grid with `dx = sqrt(2 pi / N)`, on which the coordinate and
/// momentum grids coincide. Returns the points and the spacing.
pub fn self_dual_grid(points: usize) -> (Vec<f64>, f64) {
    let dx = (2.0 * std::f64::consts::PI / points as f64).sqrt();
    let grid = (0..points).map(|j| (j as f64 - (points / 2) as f64) * dx).collect();
    (grid, dx)
}

/// Bins both sample lists on the self-dual grid of `points` cells and runs
/// [`phase_retrieval`].
pub fn retrieve_from_samples(samples: &SampleSet, points: usize, max_iter: usize) -> Result<(Vec<f64>, PhaseRetrieval)> {
    if points < 4 {
        return Err(Error::invalid("phase retrieval needs at least four grid points"));
    }
    let (grid, _) = self_dual_grid(points);
    let hx = bin_on_grid(&samples.coord, &grid);
    let hp = bin_on_grid(&samples.mom, &grid);
    Ok((grid.clone(), phase_retrieval(&hx, &hp, max_iter)?))
}

/// Normalized histogram of `samples` on bins centered at `grid` (uniform spacing).
pub fn bin_on_grid(samples: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut h = vec![0.0; grid.len()];
    if grid.len() < 2 || samples.is_empty() {
        return h;
    }
    let d = grid[1] - grid[0];
    for &x in samples {
        let k = ((x - grid[0]) / d).round();
        if k >= 0.0 && (k as usize) < grid.len() {
            h[k as usize] += 1.0;
        }
    }
    let total: f64 = h.iter().sum();
    if total > 0.0 {
        h.iter_mut().for_each(|v| *v /= total);
    }
    h
}
