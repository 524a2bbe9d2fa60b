//! The ten acceptance criteria as single calls with fixed parameters.

use super::suites::*;
use super::Outcome;
use crate::config::{ScenarioConfig, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::SurfaceSpec;
use crate::solver::lorentz::BoostProfile;

pub const CRITERIA: [&str; 10] = [
    "conservation",
    "flux-balance",
    "pointwise-identities",
    "gradient-decomposition",
    "gronwall-coefficient",
    "implied-constants",
    "energy-triangle-inequality",
    "compatibility-pipeline",
    "lorentz-boost",
    "solver-baseline",
];

fn slanted() -> SurfaceSpec {
    SurfaceSpec::affine(0.3, &[0.4])
}

/// Runs criterion `n` (1-based).
pub fn criterion(n: usize, tol: &Tolerances, seed: u64) -> Result<Outcome> {
    let standing = ScenarioConfig::named("standing");
    let variable = ScenarioConfig::named("variable-a");
    match n {
        1 => {
            let surfaces = [SurfaceSpec::constant(0.5), slanted(), SurfaceSpec::affine(0.0, &[1.0])];
            conservation(&standing, &[512, 1024, 2048], &surfaces, Some(std::f64::consts::PI.powi(2) / 2.0), tol)
        }
        2 => {
            let mut out = Outcome::default();
            out.merge("standing", flux_convergence(&standing, &[256, 512, 1024], &slanted(), tol)?);
            out.merge("variable-a", flux_convergence(&variable, &[256, 512, 1024], &slanted(), tol)?);
            Ok(out)
        }
        3 => {
            let mut out = Outcome::default();
            out.merge("energy", identity_convergence(&variable, &[64, 128, 256], false, tol)?);
            out.merge("multiplier", identity_convergence(&variable, &[64, 128, 256], true, tol)?);
            out.merge("polynomials", polynomial_exactness(tol)?);
            Ok(out)
        }
        4 => decomposition_suite(seed, 100, 10, tol),
        5 => gronwall_suite(&[0.1, 1.0, 10.0], tol),
        6 => theorem_ratios(&variable, &standing, &[256, 512, 1024], &slanted(), tol),
        7 => triangle_suite(seed, 100, tol),
        8 => compat_sweep(&standing, 128, &[0.1, 0.05, 0.025], None, tol),
        9 => lorentz_suite(0.5, &[384, 768, 1536], BoostProfile::GaussianPulse, tol),
        10 => {
            let mut out = Outcome::default();
            out.merge("order", solver_convergence(&standing, &[128, 256, 512], tol)?);
            out.merge("properties", solver_properties(tol)?);
            Ok(out)
        }
        other => Err(Error::Config(format!("no acceptance criterion {other}; expected 1 to {}", CRITERIA.len()))),
    }
}
