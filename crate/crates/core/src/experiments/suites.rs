//! Refinement sweeps, randomized suites and single-run drivers.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{num, Check, Outcome};
use crate::coefficients::CoefficientFamily;
use crate::compat::{
    compatibility_residual, default_order, h1_sigma_distance, mollify_first_order, mollify_high_order, scenario_hierarchy,
    support_is_exact, CompatRow,
};
use crate::config::{ScenarioConfig, Tolerances};
use crate::energy::{classical_energy, horizontal_energy, partial_energy, surface_energy, bound_report, trace};
use crate::error::{Error, Result};
use crate::fields::SpaceTimeField;
use crate::geometry::{validate_foliation, Domain, Hypersurface, SpatialGrid, SurfaceSpec, TimeGrid};
use crate::identities::{
    estimate_order, extend_multiplier, flux_balance, gradient_decomposition, gronwall_coefficient_min, jet_multiplier_identity,
    multiplier_balance, residual_energy_identity, residual_multiplier_identity, AffineField, IdentityResidualReport,
    MultiplierField, ResidualSample,
};
use crate::linalg::{DenseMatrix, C};
use crate::solver::lorentz::{lorentz_scenario, BoostProfile, LorentzSetup};
use crate::solver::manufactured::{Factor, Separable, Term};
use crate::solver::{solve, Scenario};

fn order_of(hs: &[f64], errs: &[f64]) -> Option<f64> {
    estimate_order(hs, errs)
}

/// Max-norm solver error across grids.
pub fn solver_convergence(cfg: &ScenarioConfig, grids: &[usize], tol: &Tolerances) -> Result<Outcome> {
    let runs = grids
        .par_iter()
        .map(|&n| {
            let sc = cfg.build(Some(n))?;
            let r = solve(&sc)?;
            Ok((sc.grid.h(0), r.max_error.ok_or(Error::Config("scenario has no exact solution".into()))?, r.steps))
        })
        .collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let errs: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let order = order_of(&hs, &errs);
    let mut out = Outcome::default();
    out.insert("grids", grids);
    out.insert("max_error", &errs);
    out.insert("steps", runs.iter().map(|r| r.2).collect::<Vec<_>>());
    out.insert("order", order);
    out.checks.push(match order {
        Some(p) => Check::within("solver_order", p, tol.solver_order_min, tol.solver_order_max),
        None => Check::order("solver_order", None, tol.solver_order_min),
    });
    let rows: Vec<Vec<String>> = runs.iter().zip(grids).map(|(r, n)| vec![n.to_string(), num(r.0), num(r.1)]).collect();
    out.add_table("converge.csv", &["cells", "h", "max_error"], &rows)?;
    Ok(out)
}

/// Zero data stays zero; superposition; no signal outside the light cone.
pub fn solver_properties(tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let zero = ScenarioConfig::named("zero").build(Some(64))?;
    let z = solve(&zero)?;
    let zmax = z.u.max_abs();
    out.insert("zero_max_abs", zmax);
    out.checks.push(Check::holds("zero_field_exact", zmax == 0.0, format!("max|u| = {zmax:e}")));

    let s1 = ScenarioConfig::named("standing").build(Some(64))?;
    let s2 = ScenarioConfig::named("traveling").build(Some(64))?;
    let (alpha, beta) = (C::new(0.7, -0.3), C::new(-1.2, 0.4));
    let combined = solve(&Scenario::combine(alpha, &s1, beta, &s2)?)?;
    let expected = solve(&s1)?.u.combine(alpha, &solve(&s2)?.u, beta)?;
    let defect = combined.u.combine(C::new(1.0, 0.0), &expected, C::new(-1.0, 0.0))?.max_abs();
    let scale = expected.max_abs().max(1.0);
    out.insert("linearity_defect", defect / scale);
    out.checks.push(Check::at_most("linearity", defect / scale, tol.linearity));

    let params = [("n", 600.0), ("lo", -1.0), ("hi", 2.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let bump = ScenarioConfig { params, ..ScenarioConfig::named("gaussian-bump") }.build(None)?;
    let r = solve(&bump)?;
    let last = r.u.levels() - 1;
    let t = bump.time.horizon();
    let reach = 0.15 + t;
    let h = bump.grid.h(0);
    let peak = r.u.max_abs();
    let outside = |margin: f64| {
        (0..bump.grid.node_count())
            .filter(|&n| (bump.grid.coord(n)[0] - 0.5).abs() > reach + margin)
            .map(|n| r.u.at(last, n).norm())
            .fold(0.0, f64::max)
    };
    // the leapfrog stencil cone is slightly wider than the physical one; a few cells out it is exactly zero
    let (near, far) = (outside(2.0 * h) / peak, outside(8.0 * h));
    out.insert("propagation_outside_relative", near);
    out.insert("propagation_outside_8h", far);
    out.checks.push(Check::holds("finite_propagation_exact_8h", far == 0.0, format!("max |u| beyond 8h = {far:e}")));
    out.checks.push(Check::at_most("finite_propagation", near, tol.propagation));
    Ok(out)
}

/// `|E(u; Γ_S) − E_ref|/E_ref` for each surface across grids; `reference` defaults to `e(0)`.
pub fn conservation(
    cfg: &ScenarioConfig,
    grids: &[usize],
    surfaces: &[SurfaceSpec],
    reference: Option<f64>,
    tol: &Tolerances,
) -> Result<Outcome> {
    let per_grid = grids
        .par_iter()
        .map(|&n| {
            let sc = cfg.build(Some(n))?;
            let r = solve(&sc)?;
            let e0 = classical_energy(&sc.grid, &sc.coefficients, &sc.initial.u0, &sc.initial.u1);
            let reference = reference.unwrap_or(e0);
            let errs = surfaces
                .iter()
                .map(|spec| {
                    let s = spec.build(&sc.grid, 0.0)?;
                    let e = surface_energy(&trace(&r.u, &s, 0.0)?, &s, &sc.coefficients)?;
                    Ok((e, (e - reference).abs() / reference))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((sc.grid.h(0), errs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let hs: Vec<f64> = per_grid.iter().map(|g| g.0).collect();
    let mut rows = vec![];
    for (i, spec) in surfaces.iter().enumerate() {
        let errs: Vec<f64> = per_grid.iter().map(|g| g.1[i].1).collect();
        let energies: Vec<f64> = per_grid.iter().map(|g| g.1[i].0).collect();
        let order = order_of(&hs, &errs);
        let key = format!("surface{i}");
        out.insert(&format!("{key}.spec"), spec);
        out.insert(&format!("{key}.energy"), &energies);
        out.insert(&format!("{key}.relative_error"), &errs);
        out.insert(&format!("{key}.order"), order);
        out.checks.push(Check::at_most(format!("{key}.finest_relative_error"), *errs.last().unwrap_or(&f64::NAN), tol.energy_rel));
        out.checks.push(Check::order(format!("{key}.order"), order, tol.min_order));
        for (j, n) in grids.iter().enumerate() {
            rows.push(vec![i.to_string(), n.to_string(), num(energies[j]), num(errs[j])]);
        }
    }
    out.add_table("conservation.csv", &["surface", "cells", "energy", "relative_error"], &rows)?;
    Ok(out)
}

/// Flux-balance residual at `τ = 0`, normalized by `e(0)`, across grids.
pub fn flux_convergence(cfg: &ScenarioConfig, grids: &[usize], surface: &SurfaceSpec, tol: &Tolerances) -> Result<Outcome> {
    let runs = grids
        .par_iter()
        .map(|&n| {
            let sc = cfg.build(Some(n))?;
            let r = solve(&sc)?;
            let s = surface.build(&sc.grid, 0.0)?;
            let fb = flux_balance(&r.u, &sc, &s, 0.0)?;
            let e0 = classical_energy(&sc.grid, &sc.coefficients, &sc.initial.u0, &sc.initial.u1);
            Ok((sc.grid.h(0), fb, e0))
        })
        .collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let rel: Vec<f64> = runs.iter().map(|r| r.1.residual.abs() / r.2).collect();
    let order = order_of(&hs, &rel);
    let mut out = Outcome::default();
    out.insert("balances", runs.iter().map(|r| r.1).collect::<Vec<_>>());
    out.insert("relative_residual", &rel);
    out.insert("order", order);
    out.checks.push(Check::order("order", order, tol.min_order));
    out.checks.push(Check::at_most("finest_relative_residual", *rel.last().unwrap_or(&f64::NAN), tol.flux_abs));
    Ok(out)
}

/// Multiplier-balance residual and the raw/reduced `I₂` discrepancy across grids.
pub fn multiplier_convergence(cfg: &ScenarioConfig, grids: &[usize], surface: &SurfaceSpec, tau: f64, tol: &Tolerances) -> Result<Outcome> {
    let runs = grids
        .par_iter()
        .map(|&n| {
            let sc = cfg.build(Some(n))?;
            let r = solve(&sc)?;
            let s = surface.build(&sc.grid, 0.0)?;
            let phi = extend_multiplier(&sc.coefficients, &sc.grid)?;
            Ok((sc.grid.h(0), multiplier_balance(&r.u, &sc, &s, &phi, tau)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let res: Vec<f64> = runs.iter().map(|r| r.1.residual.abs() / r.1.scale.max(f64::MIN_POSITIVE)).collect();
    let i2: Vec<f64> = runs.iter().map(|r| (r.1.i2 - r.1.i2_raw).abs()).collect();
    let mut out = Outcome::default();
    out.insert("balances", runs.iter().map(|r| r.1).collect::<Vec<_>>());
    out.insert("relative_residual", &res);
    out.insert("i2_discrepancy", &i2);
    let order = order_of(&hs, &res);
    out.insert("order", order);
    out.checks.push(Check::order("order", order, tol.min_order));
    if i2.iter().all(|v| *v > 1e-13) {
        let o = order_of(&hs, &i2);
        out.insert("i2_order", o);
        out.checks.push(Check::order("i2_reduction_order", o, tol.min_order));
    }
    Ok(out)
}

/// Max and integrated residual of a pointwise identity over every admissible point.
pub fn identity_sample(u: &SpaceTimeField, a: &crate::coefficients::CoefficientField, phi: Option<&MultiplierField>) -> Result<ResidualSample> {
    let grid = u.grid();
    let nodes: Vec<usize> = (0..grid.node_count())
        .filter(|&n| {
            let m = grid.node_multi(n);
            (0..grid.dim()).all(|ax| m[ax] >= 2 && m[ax] + 2 < grid.nodes_per_axis(ax))
        })
        .collect();
    let levels = u.levels();
    let cell = grid.cell_volume() * u.dt();
    let per_level = (2..levels - 2)
        .into_par_iter()
        .map(|l| {
            let mut mx: f64 = 0.0;
            let mut sum = 0.0;
            for &n in &nodes {
                let r = match phi {
                    Some(p) => residual_multiplier_identity(u, a, p, n, l)?,
                    None => residual_energy_identity(u, a, n, l)?,
                }
                .norm();
                mx = mx.max(r);
                sum += r * cell;
            }
            Ok((mx, sum))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualSample {
        cells: grid.cells_per_axis(0),
        h: grid.h(0),
        max_pointwise: per_level.iter().map(|p| p.0).fold(0.0, f64::max),
        integrated: per_level.iter().map(|p| p.1).sum(),
    })
}

fn sampled_exact(sc: &Scenario) -> Result<SpaceTimeField> {
    let exact = sc.exact.as_ref().ok_or(Error::Config("scenario has no exact solution".into()))?;
    Ok(SpaceTimeField::from_fn(sc.grid.clone(), sc.time, |x, t| exact.value(x, t)))
}

/// Refinement sweep of both pointwise identities on the closed-form field.
pub fn identity_convergence(cfg: &ScenarioConfig, grids: &[usize], multiplier: bool, tol: &Tolerances) -> Result<Outcome> {
    let samples = grids
        .iter()
        .map(|&n| {
            let sc = cfg.build(Some(n))?;
            let u = sampled_exact(&sc)?;
            let phi = if multiplier { Some(extend_multiplier(&sc.coefficients, &sc.grid)?) } else { None };
            identity_sample(&u, &sc.coefficients, phi.as_ref())
        })
        .collect::<Result<Vec<_>>>()?;
    let name = if multiplier { "multiplier_identity" } else { "energy_identity" };
    let report = IdentityResidualReport::new(name, samples);
    let mut out = Outcome::default();
    out.checks.push(Check::order("order", report.order, tol.min_order));
    out.insert("report", &report);
    Ok(out)
}

/// Both identities vanish on quadratics with constant coefficients and constant `φ`,
/// and the product-rule evaluation is exact for `u = x²`, `φ = x`.
pub fn polynomial_exactness(tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g1 = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0)?, 16)?;
    let t1 = TimeGrid::new(1.0, 16)?;
    let g2 = SpatialGrid::uniform(Domain::rectangle([0.0, 1.0], [0.0, 1.0], 1.0)?, 12)?;
    let t2 = TimeGrid::new(1.0, 12)?;
    let cases: Vec<(&str, SpaceTimeField, CoefficientFamily)> = vec![
        ("xt", SpaceTimeField::from_fn(g1.clone(), t1, |x, t| C::new(x[0] * t, 0.0)), CoefficientFamily::Identity),
        ("quadratic-1d", SpaceTimeField::from_fn(g1, t1, |x, t| C::new(x[0] * x[0] + x[0] * t - 0.5 * t * t, 0.3 * t)), CoefficientFamily::Scalar { value: 2.5 }),
        (
            "quadratic-2d",
            SpaceTimeField::from_fn(g2, t2, |x, t| C::new(x[0] * x[0] + 0.5 * x[0] * x[1] - x[1] * t + 2.0 * t * t, x[1] * x[1] - x[0] * t)),
            CoefficientFamily::Rotated { eigenvalues: [2.0, 0.5], angle: 0.4 },
        ),
    ];
    for (name, u, family) in cases {
        let a = crate::coefficients::CoefficientField::from_family(u.grid(), family)?;
        let scale = u.values().iter().map(|v| v.norm_sqr()).fold(1.0, f64::max);
        let phi = MultiplierField::sample(u.grid(), &AffineField { matrix: [[0.0; 2]; 2], offset: [0.6, -0.8] }, vec![]);
        let uu = identity_sample(&u, &a, None)?.max_pointwise;
        let uu3 = identity_sample(&u, &a, Some(&phi))?.max_pointwise;
        out.insert(&format!("{name}.energy_identity"), uu);
        out.insert(&format!("{name}.multiplier_identity"), uu3);
        out.checks.push(Check::at_most(format!("{name}.energy_identity_exact"), uu / scale, tol.identity_exact));
        out.checks.push(Check::at_most(format!("{name}.multiplier_identity_exact"), uu3 / scale, tol.identity_exact));
    }
    let u = Separable { dim: 1, terms: vec![Term { coeff: C::new(1.0, 0.0), space: [Factor::Poly(vec![0.0, 0.0, 1.0]), Factor::One], time: Factor::One }] };
    let phi = AffineField { matrix: [[1.0, 0.0], [0.0, 0.0]], offset: [0.0; 2] };
    let jet = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&x| jet_multiplier_identity(&u, &CoefficientFamily::Identity, &phi, &[x, 0.0], 0.0).abs())
        .fold(0.0, f64::max);
    out.insert("jet_x_squared", jet);
    out.checks.push(Check::at_most("jet_x_squared_exact", jet, tol.identity_exact));
    Ok(out)
}

fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = vec![];
    while basis.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Random symmetric positive definite `n × n` matrix with eigenvalues in `[0.1, 10]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let q = random_orthonormal(rng, n);
    let lambda: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
    let mut a = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| q[k][i] * lambda[k] * q[k][j]).sum();
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    a
}

/// Randomized check of `|ν|²_A M₁₁ = 1` and of the expansion of `|∇u|²_A`.
pub fn decomposition_suite(seed: u64, samples: usize, gradients: usize, tol: &Tolerances) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_product: f64 = 0.0;
    let mut worst_expansion: f64 = 0.0;
    for i in 0..samples {
        let n = 2 + i % 2;
        let a = random_spd(&mut rng, n);
        let frame = random_orthonormal(&mut rng, n);
        let d = gradient_decomposition(&a, &frame[0], &frame[1..])?;
        worst_product = worst_product.max((d.product - 1.0).abs());
        for _ in 0..gradients {
            let g: Vec<C> = (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let direct: f64 = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| a.get(r, c) * (g[r].conj() * g[c]).re).sum();
            let res = d.expansion_residual(&a, &frame[0], &frame[1..], &g).abs() / direct.max(1.0);
            worst_expansion = worst_expansion.max(res);
        }
    }
    let mut out = Outcome::default();
    out.insert("samples", samples);
    out.insert("max_product_deviation", worst_product);
    out.insert("max_expansion_residual", worst_expansion);
    out.checks.push(Check::at_most("product_is_one", worst_product, tol.decomp));
    out.checks.push(Check::at_most("expansion", worst_expansion, tol.decomp));
    Ok(out)
}

pub fn gronwall_suite(ds: &[f64], tol: &Tolerances) -> Result<Outcome> {
    let mins = ds.iter().map(|&d| gronwall_coefficient_min(d)).collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    out.insert("d", ds);
    out.insert("minima", &mins);
    for (d, m) in ds.iter().zip(&mins) {
        out.checks.push(Check::holds(format!("bracket_d{d}"), m.in_bracket, format!("{:.6} in (3.5, 4)", m.value)));
    }
    let spread = mins.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max) - mins.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    out.checks.push(Check::at_most("d_invariance", spread, tol.gronwall_invariance));
    Ok(out)
}

/// Implied constants across grids for forced data; vanishing LHS for free data.
pub fn theorem_ratios(forced: &ScenarioConfig, free: &ScenarioConfig, grids: &[usize], surface: &SurfaceSpec, tol: &Tolerances) -> Result<Outcome> {
    let report = |cfg: &ScenarioConfig, n: usize| -> Result<(f64, crate::energy::EnergyReport)> {
        let sc = cfg.build(Some(n))?;
        let r = solve(&sc)?;
        let s = surface.build(&sc.grid, 0.0)?;
        Ok((sc.grid.h(0), bound_report(&sc, &r, &s)?))
    };
    let forced_runs = grids.par_iter().map(|&n| report(forced, n)).collect::<Result<Vec<_>>>()?;
    let free_runs = grids.par_iter().map(|&n| report(free, n)).collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    out.insert("forced", forced_runs.iter().map(|r| &r.1).collect::<Vec<_>>());
    out.insert("free", free_runs.iter().map(|r| &r.1).collect::<Vec<_>>());
    type Pick = fn(&crate::energy::EnergyReport) -> Option<f64>;
    let picks: [(&str, Pick); 3] = [("deviation", |r| r.ratio_deviation), ("energy", |r| r.ratio_energy), ("conormal", |r| r.ratio_conormal)];
    for (name, pick) in picks {
        let ratios: Vec<f64> = forced_runs.iter().map(|r| pick(&r.1).unwrap_or(f64::NAN)).collect();
        let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
        out.checks.push(Check::holds(format!("{name}.finite"), finite, format!("{ratios:?}")));
        let spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        out.checks.push(Check::at_most(format!("{name}.variation"), spread, tol.ratio_variation));
        out.checks.push(Check::holds(format!("{name}.h1_bound"), forced_runs.iter().all(|r| r.1.h1.holds), "H1(Γ_S) bound"));
    }
    let hs: Vec<f64> = free_runs.iter().map(|r| r.0).collect();
    let lhs: Vec<f64> = free_runs.iter().map(|r| r.1.lhs).collect();
    let order = order_of(&hs, &lhs);
    out.insert("free_lhs_order", order);
    out.checks.push(Check::order("free_lhs_order", order, tol.min_order));
    Ok(out)
}

fn random_smooth(rng: &mut ChaCha8Rng, grid: &SpatialGrid, time: TimeGrid) -> SpaceTimeField {
    let modes: Vec<(C, f64, f64, f64, f64)> = (1..=3)
        .map(|k| {
            (
                C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                k as f64 * PI,
                rng.gen_range(0.0..PI),
                rng.gen_range(0.5..4.0),
                rng.gen_range(0.0..PI),
            )
        })
        .collect();
    SpaceTimeField::from_fn(grid.clone(), time, |x, t| {
        modes.iter().map(|(c, k, p, w, q)| c * ((k * x[0] + p).sin() * (w * t + q).cos())).sum()
    })
}

/// `|E(u₁) − E(u₂)| ≤ E(u₁−u₂) + 2√E(u₁−u₂)√E(u_j)` for random smooth pairs.
pub fn triangle_suite(seed: u64, pairs: usize, tol: &Tolerances) -> Result<Outcome> {
    let grid = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0)?, 64)?;
    let time = TimeGrid::new(1.0, 64)?;
    let a = crate::coefficients::CoefficientField::from_family(&grid, CoefficientFamily::Identity)?;
    let surfaces = [SurfaceSpec::constant(0.5), SurfaceSpec::affine(0.3, &[0.4]), SurfaceSpec::affine(0.0, &[1.0])];
    let built = surfaces.iter().map(|s| s.build(&grid, 0.0)).collect::<Result<Vec<Hypersurface>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let u1 = random_smooth(&mut rng, &grid, time);
        let u2 = random_smooth(&mut rng, &grid, time);
        for s in &built {
            let t1 = trace(&u1, s, 0.0)?;
            let t2 = trace(&u2, s, 0.0)?;
            let e1 = surface_energy(&t1, s, &a)?;
            let e2 = surface_energy(&t2, s, &a)?;
            let ed = surface_energy(&t1.sub(&t2)?, s, &a)?;
            let scale = e1.max(e2).max(ed).max(f64::MIN_POSITIVE);
            for ej in [e1, e2] {
                let slack = ed + 2.0 * ed.sqrt() * ej.sqrt() - (e1 - e2).abs();
                worst = worst.min(slack / scale);
            }
        }
    }
    let mut out = Outcome::default();
    out.insert("pairs", pairs);
    out.insert("min_relative_slack", worst);
    out.checks.push(Check::holds("triangle", worst >= -tol.triangle_slack, format!("min slack/scale = {worst:.3e} >= -{:e}", tol.triangle_slack)));
    Ok(out)
}

/// ε-sweep of both mollifications on a scenario's boundary data.
///
/// High order: `f̃ = f + δ sin(ωt)` breaks first-order compatibility and is
/// repaired near `t = 0`. First order: `u0` is jittered on `∂Ω` by `δε`, so the
/// order-zero mismatch vanishes with ε.
pub fn compat_sweep(cfg: &ScenarioConfig, cells: usize, eps: &[f64], order: Option<usize>, tol: &Tolerances) -> Result<Outcome> {
    let sc = cfg.build(Some(cells))?;
    let k = order.unwrap_or_else(|| default_order(sc.grid.dim()));
    let hier = scenario_hierarchy(&sc, k)?;
    let (delta, omega) = (0.05, 3.0);
    let perturbed = sc.boundary.with_values(
        (0..sc.time.levels())
            .flat_map(|l| (0..sc.boundary.nodes().len()).map(move |s| (l, s)))
            .map(|(l, s)| sc.boundary.at(l, s) + delta * (omega * sc.time.time(l)).sin())
            .collect(),
    )?;
    let mut rows = vec![];
    let mut first_rows = vec![];
    let mut table = vec![];
    let mut fields = vec![];
    let mut out = Outcome::default();
    for &e in eps {
        let m = mollify_high_order(&perturbed, &hier, e)?;
        let residuals = (0..=k).map(|j| compatibility_residual(&m, &hier, j)).collect::<Result<Vec<_>>>()?;
        let row = CompatRow {
            eps: e,
            h1_distance: h1_sigma_distance(&sc.grid, &m.field, &perturbed)?,
            residuals,
            support_exact: support_is_exact(&m, &perturbed),
        };
        let mut csv_row = vec![num(e), num(row.h1_distance)];
        csv_row.extend(row.residuals.iter().map(|r| num(*r)));
        table.push(csv_row);
        rows.push(row);

        let mut u0 = sc.initial.u0.clone();
        for &n in sc.boundary.nodes() {
            u0[n] += delta * e;
        }
        let m1 = mollify_first_order(&sc.boundary, &u0, e)?;
        let first_hier = crate::compat::CompatHierarchy { terms: vec![u0] };
        first_rows.push(json!({
            "eps": e,
            "h1_distance": h1_sigma_distance(&sc.grid, &m1.field, &sc.boundary)?,
            "order0_residual": compatibility_residual(&m1, &first_hier, 0)?,
            "support_exact": support_is_exact(&m1, &sc.boundary),
        }));

        let mut mollified = sc.clone();
        mollified.boundary = m.field.clone();
        mollified.exact = None;
        fields.push(solve(&mollified)?.u);
    }
    let scale = hier.terms.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
    let worst = rows.iter().flat_map(|r| r.residuals.iter()).cloned().fold(0.0, f64::max);
    out.checks.push(Check::at_most("order_k_residuals", worst / scale, tol.compat_residual));
    let monotone = rows.windows(2).all(|w| w[1].h1_distance <= w[0].h1_distance);
    out.checks.push(Check::holds("h1_non_increasing", monotone, format!("{:?}", rows.iter().map(|r| r.h1_distance).collect::<Vec<_>>())));
    out.checks.push(Check::holds("support_bit_exact", rows.iter().all(|r| r.support_exact), "f_eps = f for t >= 2 eps"));
    let first_monotone = first_rows.windows(2).all(|w| w[1]["h1_distance"].as_f64() <= w[0]["h1_distance"].as_f64());
    out.checks.push(Check::holds("first_order_h1_non_increasing", first_monotone, "jitter scaled with eps"));
    out.checks.push(Check::holds(
        "first_order_exact_at_zero",
        first_rows.iter().all(|r| r["order0_residual"].as_f64() == Some(0.0)),
        "f_eps(., 0) = u0",
    ));

    // energy of consecutive differences on a slanted surface
    let s = SurfaceSpec::affine(0.3, &[0.4]).build(&sc.grid, 0.0)?;
    let diffs = fields
        .windows(2)
        .map(|w| {
            let d = w[0].combine(C::new(1.0, 0.0), &w[1], C::new(-1.0, 0.0))?;
            surface_energy(&trace(&d, &s, 0.0)?, &s, &sc.coefficients)
        })
        .collect::<Result<Vec<_>>>()?;
    out.insert("order", k);
    out.insert("high_order", &rows);
    out.insert("first_order", &first_rows);
    out.insert("energy_of_consecutive_differences", &diffs);
    let mut header = vec!["eps".to_string(), "h1_distance".to_string()];
    header.extend((0..=k).map(|j| format!("residual_k{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.add_table("compat.csv", &header, &table)?;
    Ok(out)
}

/// Normalized boosted residual across lab resolutions, plus the `v = 0` floor check.
pub fn lorentz_suite(v: f64, cells: &[usize], profile: BoostProfile, tol: &Tolerances) -> Result<Outcome> {
    let reports = cells
        .par_iter()
        .map(|&n| Ok(lorentz_scenario(&LorentzSetup::new(v, n, profile))?.report))
        .collect::<Result<Vec<_>>>()?;
    let still = lorentz_scenario(&LorentzSetup::new(0.0, cells[0], profile))?.report;
    let hs: Vec<f64> = cells.iter().map(|&n| 6.0 / n as f64).collect();
    let res: Vec<f64> = reports.iter().map(|r| r.residual).collect();
    let order = order_of(&hs, &res);
    let mut out = Outcome::default();
    out.insert("reports", &reports);
    out.insert("rest_frame", &still);
    out.insert("order", order);
    out.checks.push(Check::order("residual_order", order, tol.lorentz_order));
    out.checks.push(Check::at_most("rest_frame_residual", still.residual_abs, still.rounding_floor));
    Ok(out)
}

/// Energies along a foliation `S_τ` and partial/horizontal energies of a reference surface.
pub fn tau_sweep(cfg: &ScenarioConfig, cells: Option<usize>, k: usize, tol: &Tolerances) -> Result<Outcome> {
    let sc = cfg.build(cells)?;
    let r = solve(&sc)?;
    let foliation = cfg.foliation.clone().unwrap_or(SurfaceSpec::Tau);
    let reference_spec = cfg.surfaces.first().cloned().unwrap_or(SurfaceSpec::constant(sc.time.horizon() / 2.0));
    let reference = reference_spec.build(&sc.grid, 0.0)?;
    let k = k.max(2);
    let taus: Vec<f64> = (0..k).map(|i| sc.time.horizon() * i as f64 / (k - 1) as f64).collect();
    let members = taus.iter().map(|&t| Ok((t, foliation.build(&sc.grid, t)?))).collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    if let Err(v) = validate_foliation(&members) {
        out.insert("foliation_violation", &v);
        out.checks.push(Check::holds("foliation", false, format!("{v:?}")));
        return Ok(out);
    }
    let e0 = classical_energy(&sc.grid, &sc.coefficients, &sc.initial.u0, &sc.initial.u1);
    let free = sc.has_zero_source() && sc.has_zero_boundary();
    let rows = members
        .par_iter()
        .map(|(t, s)| {
            let e_member = surface_energy(&trace(&r.u, s, 0.0)?, s, &sc.coefficients)?;
            let partial = partial_energy(&r.u, &reference, &sc.coefficients, *t)?.value;
            let horizontal = horizontal_energy(&r.u, &sc.coefficients, &reference, *t)?.value;
            Ok((*t, partial, e_member, horizontal))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = vec![];
    let mut worst: f64 = 0.0;
    for (t, p, e, h) in &rows {
        let mut row = vec![num(*t), num(*p), num(*e), num(*h)];
        if free {
            let dev = (e - e0).abs() / e0.max(f64::MIN_POSITIVE);
            worst = worst.max(if e0 == 0.0 { (e - e0).abs() } else { dev });
            row.push(num(dev));
        }
        table.push(row);
    }
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12 * e0.max(1.0));
    out.checks.push(Check::holds("partial_energy_non_increasing", monotone, "E_tau non-increasing"));
    if free {
        out.checks.push(Check::at_most("conservation", worst, tol.tau_conservation));
    }
    out.insert("e0", e0);
    out.insert("taus", &taus);
    out.insert("rows", rows.iter().map(|r| json!({"tau": r.0, "partial": r.1, "member": r.2, "horizontal": r.3})).collect::<Vec<_>>());
    let mut header = vec!["tau", "partial_energy", "member_energy", "horizontal_energy"];
    if free {
        header.push("conservation_deviation");
    }
    out.add_table("tau_sweep.csv", &header, &table)?;
    Ok(out)
}

/// Metadata stored next to a solved field.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveMetadata {
    pub scenario: ScenarioConfig,
    pub scenario_hash: String,
    pub cells: usize,
    pub steps: usize,
    pub dt: f64,
    pub max_error: Option<f64>,
}

pub fn solve_run(cfg: &ScenarioConfig, cells: Option<usize>) -> Result<Outcome> {
    let sc = cfg.build(cells)?;
    let r = solve(&sc)?;
    let meta = SolveMetadata {
        scenario: cfg.clone(),
        scenario_hash: cfg.hash(),
        cells: sc.grid.cells_per_axis(0),
        steps: r.steps,
        dt: r.dt,
        max_error: r.max_error,
    };
    let mut out = Outcome::default();
    out.insert("metadata", &meta);
    let mut csv = Vec::new();
    r.u.write_csv(&mut csv)?;
    out.files.insert("field.csv".into(), csv);
    out.files.insert("metadata.json".into(), serde_json::to_vec_pretty(&meta)?);
    Ok(out)
}

/// Reloads a solved field and reports energies on `surface`, plus `E_τ` on a τ-grid.
pub fn energy_from_dir(dir: &Path, surface: &SurfaceSpec, tau_grid: usize) -> Result<Outcome> {
    let meta: SolveMetadata = serde_json::from_slice(&std::fs::read(dir.join("metadata.json"))?)?;
    let sc = meta.scenario.build(Some(meta.cells))?;
    let file = std::fs::File::open(dir.join("field.csv"))?;
    let u = SpaceTimeField::read_csv(sc.grid.clone(), sc.time, std::io::BufReader::new(file))?;
    let s = surface.build(&sc.grid, 0.0)?;
    let r = crate::solver::SolveResult { u, dt: meta.dt, steps: meta.steps, max_error: meta.max_error };
    let report = bound_report(&sc, &r, &s)?;
    let k = tau_grid.max(2);
    let rows = (0..k)
        .map(|i| {
            let tau = s.t1() + (s.t2() - s.t1()) * i as f64 / (k - 1) as f64;
            Ok((tau, partial_energy(&r.u, &s, &sc.coefficients, tau)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    out.insert("scenario_hash", &meta.scenario_hash);
    out.insert("report", &report);
    out.add_table("partial_energy.csv", &["tau", "partial_energy"], &rows.iter().map(|(t, e)| vec![num(*t), num(*e)]).collect::<Vec<_>>())?;
    Ok(out)
}
