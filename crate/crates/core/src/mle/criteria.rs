//! Chi-square criteria for fidelity and homogeneity.

use crate::basis::StateVector;
use crate::linalg::{projector, CMatrix};
use crate::stats::ChiSqReport;
use crate::{Error, Result};

fn same_dim(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

fn squared_hs(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    (&d * &d).trace().re
}

/// `N (1 - |<estimate, truth>|^2)`, distributed as `chi^2_{2(s-1)} / 2`.
pub fn chisq_fidelity(estimate: &StateVector, truth: &StateVector, n: f64) -> Result<ChiSqReport> {
    same_dim(estimate, truth)?;
    let stat = n * (1.0 - estimate.fidelity(truth)).max(0.0);
    Ok(ChiSqReport::from_half_statistic(stat, 2 * (estimate.len() - 1)))
}

/// Density-matrix form of the fidelity statistic, `(N/2) Tr((rho^ - rho0)^2)`.
pub fn chisq_fidelity_trace_form(estimate: &StateVector, truth: &StateVector, n: f64) -> Result<f64> {
    same_dim(estimate, truth)?;
    Ok(0.5 * n * squared_hs(&estimate.projector(), &truth.projector()))
}

/// Two-sample homogeneity `N1 N2 / (N1 + N2) (1 - |<c1, c2>|^2)`.
pub fn homogeneity_test(c1: &StateVector, n1: f64, c2: &StateVector, n2: f64) -> Result<ChiSqReport> {
    same_dim(c1, c2)?;
    if !(n1 >= 1.0 && n2 >= 1.0) {
        return Err(Error::invalid("sample sizes must be at least 1"));
    }
    let stat = n1 * n2 / (n1 + n2) * (1.0 - c1.fidelity(c2)).max(0.0);
    let trace = homogeneity_trace_form(c1, n1, c2, n2)?;
    debug_assert!((stat - trace).abs() <= 1e-10 * stat.abs().max(1.0));
    Ok(ChiSqReport::from_half_statistic(stat, 2 * (c1.len() - 1)))
}

/// `N1 N2 / (2 (N1 + N2)) Tr((rho2 - rho1)^2)`.
pub fn homogeneity_trace_form(c1: &StateVector, n1: f64, c2: &StateVector, n2: f64) -> Result<f64> {
    same_dim(c1, c2)?;
    let (r1, r2): (CMatrix, CMatrix) = (projector(c1.coeffs()), projector(c2.coeffs()));
    Ok(n1 * n2 / (2.0 * (n1 + n2)) * squared_hs(&r2, &r1))
}
