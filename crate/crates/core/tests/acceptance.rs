//! One line per acceptance criterion; the suite fails if any criterion fails.

use hypersurface_energy::config::Tolerances;
use hypersurface_energy::experiments::acceptance::{criterion, CRITERIA};

const SEED: u64 = 20240611;

/// Tolerances used for acceptance, pinned here rather than taken from defaults.
fn pinned() -> Tolerances {
    Tolerances {
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

#[test]
fn acceptance() {
    let tol = pinned();
    let mut failed = vec![];
    for (i, name) in CRITERIA.iter().enumerate() {
        let n = i + 1;
        let line = match criterion(n, &tol, SEED) {
            Ok(out) if out.passed() => format!("PASS  {n:>2} {name}"),
            Ok(out) => {
                let why: Vec<String> = out.failing().into_iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
                format!("FAIL  {n:>2} {name} [{}]", why.join("; "))
            }
            Err(e) => format!("FAIL  {n:>2} {name} [error: {e}]"),
        };
        println!("{line}");
        if line.starts_with("FAIL") {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
