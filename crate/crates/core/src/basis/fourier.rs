//! Discrete Fourier helpers.
//!
//! All transforms are unitary (`1/sqrt(N)`), so vector norms are preserved.

use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::linalg::C64;

fn fft(v: &[C64], inverse: bool) -> Vec<C64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut buf = v.to_vec();
    plan.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for x in &mut buf {
        *x *= scale;
    }
    buf
}

/// Unitary DFT, `X_k = N^{-1/2} sum_j x_j exp(-2 pi i jk/N)`.
pub fn discrete_fourier(v: &[C64]) -> Vec<C64> {
    fft(v, false)
}

pub fn inverse_discrete_fourier(v: &[C64]) -> Vec<C64> {
    fft(v, true)
}

fn centered(v: &[C64], sign: f64) -> Vec<C64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let o = (n / 2) as f64;
    let nf = n as f64;
    // exp(sign 2 pi i (k-o)(j-o)/N) split into pre/post twiddles around a plain FFT.
    let pre: Vec<C64> = v
        .iter()
        .enumerate()
        .map(|(j, x)| x * C64::from_polar(1.0, -sign * 2.0 * PI * o * j as f64 / nf))
        .collect();
    let mid = fft(&pre, sign > 0.0);
    let tail = sign * 2.0 * PI * o * o / nf;
    mid.iter()
        .enumerate()
        .map(|(k, x)| x * C64::from_polar(1.0, -sign * 2.0 * PI * o * k as f64 / nf + tail))
        .collect()
}

/// Unitary DFT with both index ranges centered on `N/2`, i.e. the kernel is
/// `exp(-2 pi i (k - N/2)(j - N/2) / N)`. On a symmetric grid `x_j = (j - N/2) dx`
/// with `dp = 2 pi / (N dx)` this is the sampled continuous transform.
pub fn centered_fourier(v: &[C64]) -> Vec<C64> {
    centered(v, -1.0)
}

pub fn inverse_centered_fourier(v: &[C64]) -> Vec<C64> {
    centered(v, 1.0)
}

/// Riemann-sum approximation of `(2 pi)^{-1/2} int f(x) exp(-ipx) dx` for samples
/// on a uniform grid starting at `x0` with spacing `dx`.
///
/// Returns the momentum grid `p_k = (k - N/2) 2 pi / (N dx)` and the transform on it.
/// The factor `exp(-i p_k x0)` aligns the DFT phase with the continuous convention.
pub fn continuous_transform(values: &[C64], x0: f64, dx: f64) -> (Vec<f64>, Vec<C64>) {
    let n = values.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let nf = n as f64;
    let o = (n / 2) as f64;
    let dp = 2.0 * PI / (nf * dx);
    let pre: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, x)| x * C64::from_polar(1.0, 2.0 * PI * o * j as f64 / nf))
        .collect();
    // fft() is unitary; undo its 1/sqrt(N) to get the plain sum.
    let sums = fft(&pre, false);
    let scale = dx * nf.sqrt() / (2.0 * PI).sqrt();
    let p: Vec<f64> = (0..n).map(|k| (k as f64 - o) * dp).collect();
    let out = sums
        .iter()
        .zip(&p)
        .map(|(s, &pk)| s * scale * C64::from_polar(1.0, -pk * x0))
        .collect();
    (p, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, norm};

    fn naive_centered(v: &[C64]) -> Vec<C64> {
        let n = v.len();
        let o = (n / 2) as f64;
        (0..n)
            .map(|k| {
                v.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        x * C64::from_polar(
                            1.0,
                            -2.0 * PI * (k as f64 - o) * (j as f64 - o) / n as f64,
                        )
                    })
                    .sum::<C64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn impulse_becomes_flat() {
        let v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        for x in discrete_fourier(&v) {
            assert!((x - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn centered_matches_direct_sum() {
        for n in [5usize, 8, 9] {
            let v: Vec<C64> = (0..n).map(|j| c((j as f64).sin(), 0.3 * j as f64)).collect();
            let fast = centered_fourier(&v);
            let slow = naive_centered(&v);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "n={n}");
            }
            let back = inverse_centered_fourier(&fast);
            for (a, b) in back.iter().zip(&v) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!((norm(&fast) - norm(&v)).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let n = 256;
        let dx = 0.1;
        let x0 = -(n as f64 / 2.0) * dx;
        let vals: Vec<C64> = (0..n)
            .map(|j| {
                let x = x0 + j as f64 * dx;
                c((-0.5 * x * x).exp(), 0.0)
            })
            .collect();
        let (p, t) = continuous_transform(&vals, x0, dx);
        for (pk, v) in p.iter().zip(&t) {
            assert!((v - c((-0.5 * pk * pk).exp(), 0.0)).norm() < 1e-10);
        }
    }
}
