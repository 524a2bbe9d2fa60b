//! Experiment drivers shared by the command-line tool and the acceptance suite.
//! Each driver returns an [`Outcome`]: JSON results, named checks and files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub mod acceptance;
mod run;
pub mod suites;

pub use run::{report, run, write_report};
pub use suites::*;

/// One named assertion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, max: f64) -> Self {
        Self { name: name.into(), passed: value <= max, detail: format!("{value:.6e} <= {max:.3e}") }
    }

    pub fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        Self { name: name.into(), passed: value >= min, detail: format!("{value:.6} >= {min}") }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), passed: (lo..=hi).contains(&value), detail: format!("{value:.6} in [{lo}, {hi}]") }
    }

    pub fn order(name: impl Into<String>, order: Option<f64>, min: f64) -> Self {
        match order {
            Some(p) => Self::at_least(name, p, min),
            None => Self { name: name.into(), passed: false, detail: "order undefined (fewer than 3 grids or rounding-level errors)".into() },
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Results of one experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    /// Output files by name (CSV tables, fields).
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("results serialize"));
    }

    pub fn merge(&mut self, prefix: &str, other: Outcome) {
        for (k, v) in other.results {
            self.results.insert(format!("{prefix}.{k}"), v);
        }
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.files {
            self.files.insert(format!("{prefix}.{k}"), v);
        }
    }

    pub fn add_table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    /// Writes every file into `dir` (created if missing).
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            std::fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

/// Formats a float for CSV without locale or trailing noise.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.12e}")
}
