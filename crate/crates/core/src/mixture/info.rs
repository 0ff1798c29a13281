//! Entropy bookkeeping for a divided sample.
//!
//! With component densities `p_i`, weights `f_i` and `p = sum f_i p_i`:
//!
//! ```text
//! H0    = int p ln p
//! H_mix = sum_i f_i int p_i ln p_i
//! I_mix = H_mix - H0            (information gained by the division)
//! S_sh  = -sum_i f_i ln f_i     (natural log)
//! ```
//!
//! Convexity of `t ln t` gives `H_mix >= H0` pointwise, and `f_i p_i <= p`
//! gives `I_mix <= S_sh`. Each `p_i` is renormalized on the quadrature so the
//! bounds hold for the discrete sums too. `0 ln 0 = 0`.

use serde::{Deserialize, Serialize};

use super::MixtureModel;
use crate::basis::{BasisSet, Space};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub h0: f64,
    pub h_mix: f64,
    pub i_mix: f64,
    pub s_sh: f64,
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `sum_i f_i xlnx(p_i) - xlnx(sum_i f_i p_i)`; nonnegative for any weights on the simplex.
pub fn pointwise_mixing_gap(weights: &[f64], values: &[f64]) -> f64 {
    let mix: f64 = weights.iter().zip(values).map(|(f, p)| f * p).sum();
    let sep: f64 = weights.iter().zip(values).map(|(f, p)| f * xlnx(*p)).sum();
    sep - xlnx(mix)
}

pub fn shannon_entropy(weights: &[f64]) -> f64 {
    -weights.iter().map(|&f| xlnx(f)).sum::<f64>()
}

/// Report from tabulated component densities and quadrature weights.
pub fn info_from_densities(weights: &[f64], densities: &[Vec<f64>], quadrature: &[f64]) -> Result<InfoReport> {
    if weights.len() != densities.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: densities.len(),
        });
    }
    let integrate = |v: &[f64]| -> f64 { v.iter().zip(quadrature).map(|(a, w)| a * w).sum() };
    let mut normed = Vec::with_capacity(densities.len());
    for d in densities {
        if d.len() != quadrature.len() {
            return Err(Error::DimensionMismatch {
                expected: quadrature.len(),
                got: d.len(),
            });
        }
        let mass = integrate(d);
        if !(mass > 0.0) {
            return Err(Error::invalid("component density integrates to zero"));
        }
        normed.push(d.iter().map(|x| x.max(0.0) / mass).collect::<Vec<f64>>());
    }
    let g = quadrature.len();
    let mix: Vec<f64> = (0..g)
        .map(|t| weights.iter().zip(&normed).map(|(f, p)| f * p[t]).sum())
        .collect();
    let h0 = integrate(&mix.iter().map(|&p| xlnx(p)).collect::<Vec<_>>());
    let h_mix: f64 = weights
        .iter()
        .zip(&normed)
        .map(|(f, p)| f * integrate(&p.iter().map(|&x| xlnx(x)).collect::<Vec<_>>()))
        .sum();
    Ok(InfoReport {
        h0,
        h_mix,
        i_mix: h_mix - h0,
        s_sh: shannon_entropy(weights),
    })
}

/// Coordinate-space report of a divided model.
pub fn info_report(model: &MixtureModel, basis: &BasisSet) -> Result<InfoReport> {
    info_report_in(model, basis, Space::Coordinate)
}

pub fn info_report_in(model: &MixtureModel, basis: &BasisSet, space: Space) -> Result<InfoReport> {
    let densities = model
        .components
        .iter()
        .map(|c| basis.density_on_grid(c, space))
        .collect::<Result<Vec<_>>>()?;
    info_from_densities(&model.weights, &densities, basis.weights())
}
