//! Flag and config-file merging.
//!
//! `--config FILE` names a TOML file with one table per subcommand, keyed by
//! the long flag names with dashes replaced by underscores:
//!
//! ```toml
//! [estimate]
//! s = 5
//! tol = 1e-10
//!
//! [sample]
//! n = 400
//! m = 400
//! ```
//!
//! A flag given on the command line wins over the file; a value in the file
//! wins over the built-in default.

use std::path::{Path, PathBuf};

use clap::Args;
use rootpsi::basis::{BasisDescriptor, BasisKind};
use rootpsi::mle::SolverConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn is_false(b: &bool) -> bool {
    !*b
}

/// Reads `path` and returns its `[section]` table, if present.
pub fn load_section(path: &Path, section: &str) -> Result<Option<toml::Table>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match table.remove(section) {
        None => Ok(None),
        Some(toml::Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(CliError::Usage(format!("{}: [{section}] must be a table", path.display()))),
    }
}

/// Overlays the flags that were set onto the file table. Keys of the file
/// table must be among `known`.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    file: Option<toml::Table>,
    known: &[String],
) -> Result<T, CliError> {
    let mut table = file.unwrap_or_default();
    if let Some(bad) = table.keys().find(|k| !known.contains(k)) {
        return Err(CliError::Usage(format!("config: unknown key {bad:?}")));
    }
    let set = toml::Table::try_from(flags).map_err(|e| CliError::Usage(e.to_string()))?;
    for (k, v) in set {
        table.insert(k, v);
    }
    table.try_into().map_err(|e| CliError::Usage(format!("config: {e}")))
}

pub fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{name} (flag or config entry)")))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BasisArgs {
    /// Basis family: oscillator or histogram.
    #[arg(long)]
    pub basis: Option<String>,
    /// Number of basis functions.
    #[arg(long)]
    pub s: Option<usize>,
    /// Half-width of the quadrature grid.
    #[arg(long)]
    pub grid_halfwidth: Option<f64>,
    /// Number of quadrature points.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

impl BasisArgs {
    pub fn kind(&self) -> Result<BasisKind, CliError> {
        match self.basis.as_deref().unwrap_or("oscillator") {
            "oscillator" => Ok(BasisKind::Oscillator),
            "histogram" => Ok(BasisKind::Histogram),
            other => Err(CliError::Usage(format!("unknown basis {other:?}; use oscillator or histogram"))),
        }
    }

    pub fn descriptor(&self, default_s: usize) -> Result<BasisDescriptor, CliError> {
        let s = self.s.unwrap_or(default_s);
        if s == 0 {
            return Err(CliError::Usage("--s must be at least 1".into()));
        }
        let mut d = match self.kind()? {
            BasisKind::Oscillator => BasisDescriptor::oscillator(s),
            BasisKind::Histogram => BasisDescriptor::histogram(s, 4.0, 1024),
        };
        if let Some(l) = self.grid_halfwidth {
            d.grid_halfwidth = l;
        }
        if let Some(g) = self.grid_points {
            d.grid_points = g;
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    /// Convergence tolerance on the step length.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Initial damping factor in (0, 1].
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig, CliError> {
        let mut c = SolverConfig::default();
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if let Some(m) = self.max_iter {
            c.max_iter = m;
        }
        if let Some(g) = self.gamma {
            c.gamma = g;
        }
        c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(c)
    }
}

/// `out` joined onto the output directory unless it is absolute.
pub fn output_path(dir: &Path, out: Option<&PathBuf>, default: &str) -> PathBuf {
    match out {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => dir.join(p),
        None => dir.join(default),
    }
}
