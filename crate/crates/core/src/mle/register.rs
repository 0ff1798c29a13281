//! Root estimator for a discrete register measured in two conjugate bases.
//!
//! Counts `n_i` are taken in the computational basis and counts `m_j` after the
//! unitary `U`, so the conjugate amplitudes are `c~ = U c`. The design rows are
//! the identity rows followed by the rows of `U`.

use super::complementary::{solve_design, DesignModel, EstimateResult};
use super::engine::SolverConfig;
use crate::linalg::{unitarity_residual, CMatrix, C64};
use crate::{Error, Result};

pub const UNITARITY_TOL: f64 = 1e-10;

pub fn register_model(counts_coord: &[u64], counts_conj: &[u64], u: &CMatrix) -> Result<DesignModel> {
    let s = counts_coord.len();
    if u.nrows() != u.ncols() {
        return Err(Error::invalid("conjugating matrix must be square"));
    }
    if u.nrows() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: u.nrows(),
        });
    }
    if counts_conj.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: counts_conj.len(),
        });
    }
    if unitarity_residual(u) > UNITARITY_TOL {
        return Err(Error::invalid("conjugating matrix is not unitary"));
    }
    let total: u64 = counts_coord.iter().chain(counts_conj).sum();
    if total == 0 {
        return Err(Error::InsufficientData("all register counts are zero".into()));
    }
    let mut rows = CMatrix::zeros(2 * s, s);
    for i in 0..s {
        rows[(i, i)] = C64::new(1.0, 0.0);
        for j in 0..s {
            rows[(s + i, j)] = u[(i, j)];
        }
    }
    let weights = counts_coord
        .iter()
        .chain(counts_conj)
        .map(|&k| k as f64)
        .collect();
    DesignModel::new(rows, weights)
}

/// Solves `c_i = (1/(n+m)) [n_i / c_i^* + sum_j m_j U_ji^* / c~_j^*]`.
pub fn register_mle(
    counts_coord: &[u64],
    counts_conj: &[u64],
    u: &CMatrix,
    config: &SolverConfig,
) -> Result<EstimateResult> {
    let model = register_model(counts_coord, counts_conj, u)?;
    solve_design(&model, config)
}

/// Unitary DFT matrix `U_jk = exp(-2 pi i jk / s) / sqrt(s)`.
pub fn dft_matrix(s: usize) -> CMatrix {
    let norm = 1.0 / (s as f64).sqrt();
    CMatrix::from_fn(s, s, |j, k| {
        C64::from_polar(norm, -2.0 * std::f64::consts::PI * (j * k) as f64 / s as f64)
    })
}
