//! Flux and multiplier balances shrink at order ≥ 1 for every manufactured catalog entry.

use hypersurface_energy::config::{ScenarioConfig, Tolerances};
use hypersurface_energy::experiments::{flux_convergence, multiplier_convergence};
use hypersurface_energy::geometry::SurfaceSpec;
use hypersurface_energy::solver::manufactured::CATALOG;

fn setup(name: &str) -> Option<(ScenarioConfig, SurfaceSpec, Vec<usize>)> {
    let cfg = ScenarioConfig::named(name);
    Some(match name {
        "zero" => return None,
        "gaussian-bump" => (cfg, SurfaceSpec::affine(0.1, &[0.1]), vec![128, 256, 512]),
        "plane-wave" | "gaussian-pulse" => (cfg, SurfaceSpec::affine(1.0, &[0.2]), vec![64, 128, 256]),
        _ => (cfg, SurfaceSpec::affine(0.3, &[0.4]), vec![64, 128, 256]),
    })
}

#[test]
fn balances_converge_across_catalog() {
    let tol = Tolerances::default();
    for name in CATALOG {
        let Some((cfg, surface, grids)) = setup(name) else { continue };
        let flux = flux_convergence(&cfg, &grids, &surface, &tol).unwrap();
        let order = flux.checks.iter().find(|c| c.name == "order").unwrap();
        assert!(order.passed, "{name} flux: {}", order.detail);
        let mult = multiplier_convergence(&cfg, &grids, &surface, 0.0, &tol).unwrap();
        assert!(mult.checks.iter().find(|c| c.name == "order").unwrap().passed, "{name} multiplier: {:?}", mult.checks);
    }
}

#[test]
fn balances_converge_in_two_dimensions() {
    let tol = Tolerances::default();
    let mut cfg = ScenarioConfig::named("standing");
    cfg.params.insert("dim".into(), 2.0);
    let surface = SurfaceSpec::affine(0.3, &[0.2, 0.2]);
    let flux = flux_convergence(&cfg, &[16, 32, 64], &surface, &tol).unwrap();
    assert!(flux.passed(), "{:?}", flux.checks);
    let mult = multiplier_convergence(&cfg, &[16, 32, 64], &surface, 0.0, &tol).unwrap();
    assert!(mult.passed(), "{:?}", mult.checks);
}

#[test]
fn zero_scenario_balances_vanish() {
    let tol = Tolerances::default();
    let cfg = ScenarioConfig::named("zero");
    let out = multiplier_convergence(&cfg, &[16, 32, 64], &SurfaceSpec::affine(0.3, &[0.4]), 0.0, &tol).unwrap();
    let res = out.results["relative_residual"].as_array().unwrap();
    assert!(res.iter().all(|r| r.as_f64() == Some(0.0)));
}
