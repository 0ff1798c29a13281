//! Wigner rotation matrices.
//!
//! Convention: `D^j_{m'm}(alpha, beta, gamma) = <j m'| e^{-i alpha J_z}
//! e^{-i beta J_y} e^{-i gamma J_z} |j m> = e^{-i m' alpha} d^j_{m'm}(beta)
//! e^{-i m gamma}`. Rows and columns are ordered by decreasing projection:
//! index `a` carries `m = j - a`.
//!
//! With this convention column `m` of `D(phi, theta, 0)` is the state with
//! projection `m` along the axis `(theta, phi)`, so the amplitudes seen by a
//! detector along that axis are `D^dagger psi`.

use statrs::function::factorial::factorial;

use crate::linalg::{CMatrix, C64};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct WignerD {
    pub two_j: u32,
    pub angles: (f64, f64, f64),
    pub entries: CMatrix,
}

fn fact(n: i64) -> f64 {
    factorial(n as u64)
}

/// Small-d matrix element with doubled quantum numbers.
fn small_d(two_j: i64, two_mp: i64, two_m: i64, beta: f64) -> f64 {
    let jpm = (two_j + two_m) / 2;
    let jmm = (two_j - two_m) / 2;
    let jpmp = (two_j + two_mp) / 2;
    let jmmp = (two_j - two_mp) / 2;
    let mp_m = (two_mp - two_m) / 2;
    let pref = (fact(jpmp) * fact(jmmp) * fact(jpm) * fact(jmm)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let lo = 0.max(-mp_m);
    let hi = jpm.min(jmmp);
    let mut sum = 0.0;
    for k in lo..=hi {
        let sign = if (mp_m + k) % 2 == 0 { 1.0 } else { -1.0 };
        let den = fact(jpm - k) * fact(k) * fact(mp_m + k) * fact(jmmp - k);
        let cp = two_j + (two_m - two_mp) / 2 - 2 * k;
        let sp = mp_m + 2 * k;
        sum += sign * c.powi(cp as i32) * s.powi(sp as i32) / den;
    }
    pref * sum
}

/// Builds `D^j(alpha, beta, gamma)` for `j = two_j / 2 >= 1/2`.
pub fn wigner_d(two_j: u32, alpha: f64, beta: f64, gamma: f64) -> Result<WignerD> {
    if two_j == 0 {
        return Err(Error::invalid("spin must be a positive multiple of 1/2"));
    }
    if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::invalid("rotation angles must be finite"));
    }
    let tj = two_j as i64;
    let dim = two_j as usize + 1;
    let entries = CMatrix::from_fn(dim, dim, |a, b| {
        let two_mp = tj - 2 * a as i64;
        let two_m = tj - 2 * b as i64;
        let phase = -(two_mp as f64) / 2.0 * alpha - (two_m as f64) / 2.0 * gamma;
        C64::from_polar(1.0, phase) * small_d(tj, two_mp, two_m, beta)
    });
    Ok(WignerD {
        two_j,
        angles: (alpha, beta, gamma),
        entries,
    })
}
