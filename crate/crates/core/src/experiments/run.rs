//! Dispatch of a [`RunConfig`] and assembly of `report.json`.

use std::path::Path;

use serde_json::{json, Value};

use super::suites::*;
use super::Outcome;
use crate::config::{ExperimentKind, IdentitySelection, RunConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::geometry::SurfaceSpec;
use crate::solver::lorentz::BoostProfile;

fn grids_or(cfg: &RunConfig, default: &[usize]) -> Vec<usize> {
    if cfg.grids.is_empty() {
        default.to_vec()
    } else {
        cfg.grids.clone()
    }
}

fn surface(cfg: &RunConfig) -> SurfaceSpec {
    cfg.surface
        .clone()
        .or_else(|| cfg.scenario.surfaces.first().cloned())
        .unwrap_or_else(|| SurfaceSpec::affine(0.3, &[0.4]))
}

fn verify(cfg: &RunConfig, which: IdentitySelection) -> Result<Outcome> {
    use IdentitySelection::*;
    let tol = cfg.tolerances()?;
    let sc = &cfg.scenario;
    Ok(match which {
        Uu => identity_convergence(sc, &grids_or(cfg, &[64, 128, 256]), false, &tol)?,
        Uu3 => identity_convergence(sc, &grids_or(cfg, &[64, 128, 256]), true, &tol)?,
        Flux => flux_convergence(sc, &grids_or(cfg, &[256, 512, 1024]), &surface(cfg), &tol)?,
        Multiplier => multiplier_convergence(sc, &grids_or(cfg, &[64, 128, 256]), &surface(cfg), 0.0, &tol)?,
        Decomp => decomposition_suite(cfg.seed, 100, 10, &tol)?,
        Gronwall => gronwall_suite(&[0.1, 1.0, 10.0], &tol)?,
        All => {
            let mut out = Outcome::default();
            for (name, w) in [("uu", Uu), ("uu3", Uu3), ("flux", Flux), ("multiplier", Multiplier), ("decomp", Decomp), ("gronwall", Gronwall)] {
                out.merge(name, verify(cfg, w)?);
            }
            out
        }
    })
}

/// Runs the experiment described by `cfg`. Nothing is written to disk.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tol = cfg.tolerances()?;
    let sc = &cfg.scenario;
    match cfg.experiment {
        ExperimentKind::Solve => solve_run(sc, cfg.grids.first().copied()),
        ExperimentKind::Energy => {
            let dir = cfg.solve_dir.as_deref().ok_or_else(|| Error::Config("energy needs a solve directory".into()))?;
            energy_from_dir(dir, &surface(cfg), cfg.tau_grid.unwrap_or(11))
        }
        ExperimentKind::Verify => verify(cfg, cfg.identities.unwrap_or(IdentitySelection::All)),
        ExperimentKind::Compat => {
            let eps = if cfg.eps_sweep.is_empty() { vec![0.1, 0.05, 0.025] } else { cfg.eps_sweep.clone() };
            compat_sweep(sc, cfg.grids.first().copied().unwrap_or(128), &eps, cfg.order, &tol)
        }
        ExperimentKind::Converge => {
            let grids = grids_or(cfg, &[128, 256, 512]);
            let mut out = solver_convergence(sc, &grids, &tol)?;
            if !sc.surfaces.is_empty() {
                out.merge("conservation", conservation(sc, &grids, &sc.surfaces, None, &tol)?);
            }
            Ok(out)
        }
        ExperimentKind::Lorentz => {
            lorentz_suite(cfg.velocity.unwrap_or(0.5), &grids_or(cfg, &[384, 768, 1536]), BoostProfile::GaussianPulse, &tol)
        }
        ExperimentKind::TauSweep => tau_sweep(sc, cfg.grids.first().copied(), cfg.tau_grid.unwrap_or(11), &tol),
    }
}

/// Deterministic report: identical config and seed give identical bytes.
pub fn report(cfg: &RunConfig, outcome: &Outcome) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.experiment,
        "scenario": cfg.scenario,
        "scenario_hash": cfg.scenario.hash(),
        "seed": cfg.seed,
        "grids": cfg.grids,
        "passed": outcome.passed(),
        "checks": outcome.checks,
        "results": outcome.results,
        "files": outcome.files.keys().collect::<Vec<_>>(),
    })
}

/// Writes `report.json` and every table of `outcome` into `dir`.
pub fn write_report(dir: &Path, cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    outcome.write_files(dir)?;
    let mut text = serde_json::to_string_pretty(&report(cfg, outcome))?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text)?;
    Ok(())
}
