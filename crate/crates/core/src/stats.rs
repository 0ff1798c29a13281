//! Chi-square bookkeeping.
//!
//! Deviations of complex state vectors follow the "half chi-square" law
//! `chi~^2_{k} = chi^2_{2k} / 2`. Reports carry the half statistic and the
//! doubled degrees of freedom; p-values are always computed on the doubled form.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

pub const CONVENTION_NOTE: &str =
    "statistic is the half chi-square chi~^2 = chi^2_dof / 2; pvalue = P(chi^2_dof > 2 * statistic)";

/// Result of a chi-square criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSqReport {
    /// Half chi-square value, e.g. `N (1 - |<c, c0>|^2)`.
    pub statistic: f64,
    /// Degrees of freedom of the doubled statistic, `2 (s - 1)`.
    pub dof: usize,
    pub pvalue: f64,
    #[serde(skip)]
    pub convention_note: &'static str,
}

impl ChiSqReport {
    pub fn from_half_statistic(statistic: f64, dof: usize) -> Self {
        ChiSqReport {
            statistic,
            dof,
            pvalue: HalfChiSquared::new(dof).sf(statistic),
            convention_note: CONVENTION_NOTE,
        }
    }

    /// The ordinary chi-square value `2 * statistic`.
    pub fn doubled(&self) -> f64 {
        2.0 * self.statistic
    }
}

/// Distribution of `chi^2_dof / 2`. `dof = 0` is the point mass at zero.
#[derive(Debug, Clone, Copy)]
pub struct HalfChiSquared {
    dof: usize,
}

impl HalfChiSquared {
    pub fn new(dof: usize) -> Self {
        HalfChiSquared { dof }
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn mean(&self) -> f64 {
        self.dof as f64 / 2.0
    }

    fn inner(&self) -> Option<ChiSquared> {
        if self.dof == 0 {
            None
        } else {
            Some(ChiSquared::new(self.dof as f64).expect("positive dof"))
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self.inner() {
            None => {
                if t >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Some(d) => {
                if t <= 0.0 {
                    0.0
                } else {
                    d.cdf(2.0 * t)
                }
            }
        }
    }

    /// Upper tail `P(T > t)`; 1 at `t <= 0`.
    pub fn sf(&self, t: f64) -> f64 {
        match self.inner() {
            None => {
                if t > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Some(d) => {
                if t <= 0.0 {
                    1.0
                } else {
                    d.sf(2.0 * t).clamp(0.0, 1.0)
                }
            }
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        match self.inner() {
            None => 0.0,
            Some(d) => 0.5 * d.inverse_cdf(q),
        }
    }

    /// Critical value exceeded with probability `alpha`.
    pub fn upper_critical(&self, alpha: f64) -> f64 {
        self.quantile(1.0 - alpha)
    }
}

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: usize,
    pub pvalue: f64,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

/// Pearson test of `samples` against a continuous law using `bins`
/// equiprobable cells defined by the law's quantile function.
pub fn goodness_of_fit(
    samples: &[f64],
    bins: usize,
    quantile: impl Fn(f64) -> f64,
) -> Result<GoodnessOfFit> {
    if bins < 2 {
        return Err(Error::invalid("goodness of fit needs at least two bins"));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples for goodness of fit".into()));
    }
    let edges: Vec<f64> = (1..bins).map(|k| quantile(k as f64 / bins as f64)).collect();
    let mut observed = vec![0u64; bins];
    for &x in samples {
        let idx = edges.partition_point(|&e| e <= x);
        observed[idx] += 1;
    }
    let expect = samples.len() as f64 / bins as f64;
    let statistic: f64 = observed
        .iter()
        .map(|&o| (o as f64 - expect).powi(2) / expect)
        .sum();
    let dof = bins - 1;
    let pvalue = ChiSquared::new(dof as f64).expect("dof >= 1").sf(statistic);
    Ok(GoodnessOfFit {
        statistic,
        dof,
        pvalue,
        observed,
        expected: vec![expect; bins],
    })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
