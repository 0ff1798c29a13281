//! File formats.
//!
//! Samples (CSV): a header naming the columns `space` and `value` (any order,
//! extra columns ignored), then one row per observation, `x,<float>` for
//! coordinate and `p,<float>` for momentum. Coordinate rows are written first.
//!
//! ```text
//! space,value
//! x,-0.3125
//! p,1.75
//! ```
//!
//! Spin counts (CSV): `theta,phi,outcome,count`, one row per direction and
//! projection `m` (written as a decimal, `0.5`, `-1`, ...). Rows of one direction
//! share bit-identical angles; directions keep their order of first appearance.
//! `j` is the largest `|m|` present and missing outcomes count as zero.
//!
//! States (JSON): `{"c": [[re, im], ...]}`. Estimates add `residual`,
//! `iterations` and `loglik`; constrained estimates add `lambda1`, `lambda2` and
//! `e_bar`; spinors add `j`. Mixture models are
//! `{weights, components: [{c}], assignment, rounds, converged}`.
//!
//! Floats are written in Rust's shortest round-trip form, so save followed by
//! load reproduces every value exactly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::StateVector;
use crate::energy::ConstrainedEstimate;
use crate::linalg::C64;
use crate::mixture::MixtureModel;
use crate::mle::EstimateResult;
use crate::sampler::{Direction, SampleSet, SpinCounts};
use crate::spin::Spinor;
use crate::{Error, Result};

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `text`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| parse_err(path, 1, format!("missing column `{name}`")))
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, name: &str, path: &Path, line: u64) -> Result<&'a str> {
    rec.get(idx)
        .ok_or_else(|| parse_err(path, line, format!("row has no `{name}` field")))
}

fn float(text: &str, name: &str, path: &Path, line: u64) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| parse_err(path, line, format!("`{name}` is not a number: {text:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("`{name}` is not finite")));
    }
    Ok(v)
}

/// Parses sample CSV text; `path` only labels errors.
pub fn parse_samples(text: &str, path: &Path) -> Result<SampleSet> {
    if text.trim().is_empty() {
        return Ok(SampleSet::default());
    }
    let mut rdr = csv_reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let space = column(&headers, "space", path)?;
    let value = column(&headers, "value", path)?;
    let mut set = SampleSet::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let v = float(field(&rec, value, "value", path, line)?, "value", path, line)?;
        match field(&rec, space, "space", path, line)? {
            "x" => set.coord.push(v),
            "p" => set.mom.push(v),
            other => return Err(parse_err(path, line, format!("`space` must be x or p, got {other:?}"))),
        }
    }
    Ok(set)
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    parse_samples(&read_text(path)?, path)
}

pub fn format_samples(set: &SampleSet) -> String {
    let mut out = String::from("space,value\n");
    for x in &set.coord {
        let _ = writeln!(out, "x,{x}");
    }
    for p in &set.mom {
        let _ = writeln!(out, "p,{p}");
    }
    out
}

pub fn write_samples(path: &Path, set: &SampleSet) -> Result<()> {
    write_text(path, &format_samples(set))
}

/// Renders `m = j - k` for `2j = two_j`.
fn format_m(two_j: u32, k: usize) -> String {
    let two_m = two_j as i64 - 2 * k as i64;
    if two_m % 2 == 0 {
        format!("{}", two_m / 2)
    } else {
        format!("{}", two_m as f64 / 2.0)
    }
}

pub fn format_spin_counts(counts: &SpinCounts) -> String {
    let mut out = String::from("theta,phi,outcome,count\n");
    for (d, row) in counts.directions.iter().zip(&counts.counts) {
        for (k, c) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", d.theta, d.phi, format_m(counts.two_j, k), c);
        }
    }
    out
}

pub fn write_spin_counts(path: &Path, counts: &SpinCounts) -> Result<()> {
    write_text(path, &format_spin_counts(counts))
}

pub fn parse_spin_counts(text: &str, path: &Path) -> Result<SpinCounts> {
    let mut rdr = csv_reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let cols: Vec<usize> = ["theta", "phi", "outcome", "count"]
        .iter()
        .map(|n| column(&headers, n, path))
        .collect::<Result<_>>()?;
    let mut order: Vec<Direction> = Vec::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut entries: Vec<(usize, i64, u64, u64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let theta = float(field(&rec, cols[0], "theta", path, line)?, "theta", path, line)?;
        let phi = float(field(&rec, cols[1], "phi", path, line)?, "phi", path, line)?;
        let m = float(field(&rec, cols[2], "outcome", path, line)?, "outcome", path, line)?;
        let two_m = 2.0 * m;
        if (two_m - two_m.round()).abs() > 1e-9 {
            return Err(parse_err(path, line, format!("outcome {m} is not a multiple of 1/2")));
        }
        let count: u64 = field(&rec, cols[3], "count", path, line)?
            .parse()
            .map_err(|_| parse_err(path, line, "`count` must be a nonnegative integer"))?;
        let key = (theta.to_bits(), phi.to_bits());
        let d = *index.entry(key).or_insert_with(|| {
            order.push(Direction::new(theta, phi));
            order.len() - 1
        });
        entries.push((d, two_m.round() as i64, count, line));
    }
    let two_j = entries.iter().map(|e| e.1.unsigned_abs()).max().unwrap_or(0);
    if two_j == 0 {
        return Err(parse_err(path, 1, "no outcome with nonzero projection; cannot infer j"));
    }
    let dim = two_j as usize + 1;
    let mut counts = vec![vec![0u64; dim]; order.len()];
    for (d, two_m, c, line) in entries {
        if (two_j as i64 - two_m) % 2 != 0 {
            return Err(parse_err(path, line, "outcomes mix integer and half-integer projections"));
        }
        let k = ((two_j as i64 - two_m) / 2) as usize;
        counts[d][k] += c;
    }
    SpinCounts::new(two_j as u32, order, counts)
}

pub fn read_spin_counts(path: &Path) -> Result<SpinCounts> {
    parse_spin_counts(&read_text(path)?, path)
}

/// `[re, im]` pairs.
pub fn pairs(c: &[C64]) -> Vec<[f64; 2]> {
    c.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(p: &[[f64; 2]]) -> Vec<C64> {
    p.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub c: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub c: Vec<[f64; 2]>,
    pub residual: f64,
    pub iterations: usize,
    pub loglik: f64,
}

impl From<&EstimateResult> for EstimateJson {
    fn from(r: &EstimateResult) -> Self {
        EstimateJson {
            c: pairs(r.state.coeffs()),
            residual: r.residual,
            iterations: r.iterations,
            loglik: r.loglik,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedJson {
    #[serde(flatten)]
    pub estimate: EstimateJson,
    pub lambda1: f64,
    pub lambda2: f64,
    pub e_bar: f64,
}

impl From<&ConstrainedEstimate> for ConstrainedJson {
    fn from(r: &ConstrainedEstimate) -> Self {
        ConstrainedJson {
            estimate: EstimateJson {
                c: pairs(r.state.coeffs()),
                residual: r.residual,
                iterations: r.iterations,
                loglik: r.loglik,
            },
            lambda1: r.lambda1,
            lambda2: r.lambda2,
            e_bar: r.e_bar,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorJson {
    pub j: f64,
    pub c: Vec<[f64; 2]>,
}

impl From<&Spinor> for SpinorJson {
    fn from(s: &Spinor) -> Self {
        SpinorJson { j: s.j(), c: pairs(&s.c) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureJson {
    pub weights: Vec<f64>,
    pub components: Vec<StateJson>,
    pub assignment: Vec<usize>,
    pub rounds: usize,
    pub converged: bool,
}

impl From<&MixtureModel> for MixtureJson {
    fn from(m: &MixtureModel) -> Self {
        MixtureJson {
            weights: m.weights.clone(),
            components: m.components.iter().map(|c| StateJson { c: pairs(c.coeffs()) }).collect(),
            assignment: m.assignment.clone(),
            rounds: m.rounds,
            converged: m.converged,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.line() as u64, e.to_string()))
}

/// Reads any JSON document with a `c` field of `[re, im]` pairs as a state.
pub fn read_state(path: &Path) -> Result<StateVector> {
    let doc: StateJson = read_json(path)?;
    let c = from_pairs(&doc.c);
    // Keep stored bits when the file is already normalized.
    if !c.is_empty() && (crate::linalg::norm(&c) - 1.0).abs() < 1e-12 {
        return Ok(StateVector::from_normalized(c));
    }
    StateVector::new(c).map_err(|e| parse_err(path, 1, e.to_string()))
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<()> {
    write_json(path, &StateJson { c: pairs(state.coeffs()) })
}
