//! JSON run configuration, tolerances and the scenario hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coefficients::CoefficientFamily;
use crate::error::{Error, Result};
use crate::geometry::SurfaceSpec;
use crate::solver::manufactured::{catalog_entry, manufactured_with};
use crate::solver::{Params, Scenario};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Energy,
    Verify,
    Compat,
    Converge,
    Lorentz,
    TauSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentitySelection {
    All,
    /// Pointwise energy identity.
    Uu,
    /// Pointwise multiplier identity.
    Uu3,
    Flux,
    Multiplier,
    Decomp,
    Gronwall,
}

impl std::str::FromStr for IdentitySelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown identity selection '{s}'")))
    }
}

/// A catalog scenario with parameter overrides, an optional coefficient
/// family, test surfaces and an optional foliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientFamily>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surfaces: Vec<SurfaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foliation: Option<SurfaceSpec>,
}

impl ScenarioConfig {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), params: BTreeMap::new(), coefficients: None, surfaces: vec![], foliation: None }
    }

    /// A JSON file, or a bare catalog name.
    pub fn load(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path)?;
            return serde_json::from_str(&text).map_err(|e| Error::Config(format!("{arg}: {e}")));
        }
        let cfg = Self::named(arg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        catalog_entry(&self.name, &self.params).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Scenario at `cells` per axis (`None` keeps `params.n` or the catalog default).
    pub fn build(&self, cells: Option<usize>) -> Result<Scenario> {
        let mut p: Params = self.params.clone();
        if let Some(n) = cells {
            p.insert("n".into(), n as f64);
        }
        manufactured_with(&self.name, &p, self.coefficients.clone())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scenario config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Every tolerance used by an assertion, with the defaults of the acceptance suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative energy error on the finest grid.
    pub energy_rel: f64,
    /// Minimum refinement order for balances, identities and conservation.
    pub min_order: f64,
    pub solver_order_min: f64,
    pub solver_order_max: f64,
    /// Flux-balance residual on the finest grid, relative to `e(0)`.
    pub flux_abs: f64,
    /// Exactness on polynomials, relative to the data scale.
    pub identity_exact: f64,
    pub decomp: f64,
    pub gronwall_invariance: f64,
    /// Allowed spread `max/min − 1` of implied constants across grids.
    pub ratio_variation: f64,
    pub triangle_slack: f64,
    pub compat_residual: f64,
    pub lorentz_order: f64,
    /// Relative deviation of foliation energies from `e(0)` in a τ-sweep.
    pub tau_conservation: f64,
    /// Linearity defect relative to the field scale.
    pub linearity: f64,
    /// Largest value outside the light cone relative to the peak.
    pub propagation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            energy_rel: 1e-3,
            min_order: 1.0,
            solver_order_min: 1.9,
            solver_order_max: 2.1,
            flux_abs: 1e-2,
            identity_exact: 1e-10,
            decomp: 1e-10,
            gronwall_invariance: 1e-8,
            ratio_variation: 0.2,
            triangle_slack: 1e-12,
            compat_residual: 1e-10,
            lorentz_order: 1.5,
            tau_conservation: 1e-2,
            linearity: 1e-12,
            propagation: 1e-9,
        }
    }
}

impl Tolerances {
    /// Overrides one named tolerance.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let mut map = match serde_json::to_value(&*self)? {
            serde_json::Value::Object(m) => m,
            _ => unreachable!("tolerances serialize as an object"),
        };
        if !map.contains_key(name) {
            return Err(Error::Config(format!("unknown tolerance '{name}'")));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Config(format!("tolerance '{name}' must be a nonnegative number")));
        }
        map.insert(name.to_string(), serde_json::json!(value));
        *self = serde_json::from_value(serde_json::Value::Object(map))?;
        Ok(())
    }

    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut t = Self::default();
        for (k, v) in overrides {
            t.set(k, *v)?;
        }
        Ok(t)
    }
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Complete description of one `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grids: Vec<usize>,
    #[serde(default)]
    pub tau_grid: Option<usize>,
    #[serde(default)]
    pub eps_sweep: Vec<f64>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub identities: Option<IdentitySelection>,
    #[serde(default)]
    pub velocity: Option<f64>,
    /// For `energy`: directory written by `solve`.
    #[serde(default)]
    pub solve_dir: Option<PathBuf>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(experiment: ExperimentKind, scenario: ScenarioConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            scenario,
            out: None,
            seed: 0,
            grids: vec![],
            tau_grid: None,
            eps_sweep: vec![],
            order: None,
            identities: None,
            velocity: None,
            solve_dir: None,
            surface: None,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema version {}", self.schema_version)));
        }
        self.scenario.validate()?;
        if self.grids.iter().any(|&n| n < 2) {
            return Err(Error::Config("grid sizes must be at least 2".into()));
        }
        if self.experiment == ExperimentKind::Converge {
            if self.grids.len() < 3 {
                return Err(Error::Config("converge needs at least three grids".into()));
            }
            if self.grids.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config("grid list must be strictly increasing".into()));
            }
        }
        if self.eps_sweep.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("eps values must be positive".into()));
        }
        if let Some(v) = self.velocity {
            if !(v.abs() < 1.0) {
                return Err(Error::Config(format!("velocity {v} must satisfy |v| < 1")));
            }
        }
        if self.experiment == ExperimentKind::Energy && (self.solve_dir.is_none() || self.surface.is_none()) {
            return Err(Error::Config("energy needs a solve directory and a surface".into()));
        }
        Tolerances::with_overrides(&self.tolerances)?;
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        Tolerances::with_overrides(&self.tolerances)
    }
}
