//! Normalized Hermite functions by three-term recurrence.
//!
//! `phi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))` is evaluated without
//! forming `H_n` or the factorial, so high orders do not overflow.

use std::f64::consts::PI;

/// Fills `out[n] = phi_n(x)` for `n < out.len()`.
pub fn hermite_functions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let p0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out[0] = p0;
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * p0;
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    hermite_functions_into(x, &mut out);
    out
}

/// `phi_n'(x) = sqrt(n/2) phi_{n-1}(x) - sqrt((n+1)/2) phi_{n+1}(x)`.
pub fn hermite_derivatives(x: f64, count: usize) -> Vec<f64> {
    let phi = hermite_functions(x, count + 1);
    (0..count)
        .map(|n| {
            let nf = n as f64;
            let lower = if n > 0 { (nf / 2.0).sqrt() * phi[n - 1] } else { 0.0 };
            lower - ((nf + 1.0) / 2.0).sqrt() * phi[n + 1]
        })
        .collect()
}
