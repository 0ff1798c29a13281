//! Removal of the unobservable global phase.

use crate::basis::StateVector;
use crate::linalg::{inner, C64};

/// Returns `e^{i alpha} estimate` with `<reference, rotated>` real and
/// nonnegative, which minimizes `||rotated - reference||`.
pub fn gauge_fix(estimate: &StateVector, reference: &StateVector) -> StateVector {
    let ov = inner(reference.coeffs(), estimate.coeffs());
    if ov.norm() == 0.0 {
        return estimate.clone();
    }
    let alpha = -ov.arg();
    let rot = C64::from_polar(1.0, alpha);
    StateVector::from_normalized(estimate.coeffs().iter().map(|z| z * rot).collect())
}
