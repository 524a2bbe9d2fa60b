//! Integrated balances over `Q_τ`: the energy flux balance and the multiplier balance.

use serde::Serialize;

use crate::energy::{conormal, horizontal_energy, partial_energy, trace};
use crate::error::Result;
use crate::fields::quadrature::{integrate_cells, integrate_q, integrate_sigma};
use crate::fields::{stencil, SpaceTimeField};
use crate::geometry::{Hypersurface, RegionMasks, SpatialGrid};
use crate::linalg::{mat2_apply_c, quad_form, quad_form_c, Mat2, Vec2, C};
use crate::solver::Scenario;

use super::multiplier::MultiplierField;

/// `2Re∫_{Q_τ}ū_t G + e(τ) + 2Re∫_{Σ_τ}ū_t u_{ν,A} − E_τ(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxBalance {
    pub source: f64,
    pub horizontal: f64,
    pub boundary: f64,
    pub partial: f64,
    pub residual: f64,
    /// `max(|each term|)`, for relative comparisons.
    pub scale: f64,
}

pub fn flux_balance(u: &SpaceTimeField, scenario: &Scenario, s: &Hypersurface, tau: f64) -> Result<FluxBalance> {
    let grid = u.grid();
    let a = &scenario.coefficients;
    let masks = RegionMasks::new(s, tau, grid, u.time())?;
    let source = integrate_q(grid, &masks, u.time(), |n, l| {
        2.0 * (u.time_derivative(l, n).conj() * scenario.source_at(l, n)).re
    })
    .value;
    let horizontal = horizontal_energy(u, a, s, tau)?.value;
    let con = conormal(u, a, s, tau)?;
    let count = con.samples.len();
    let index = sample_index(grid);
    let boundary = integrate_sigma(grid, &masks, u.time(), |smp, l| {
        2.0 * (u.time_derivative(l, smp.node).conj() * con.values[l * count + index(smp.node, smp.face)]).re
    })
    .value;
    let partial = partial_energy(u, s, a, tau)?.value;
    let residual = source + horizontal + boundary - partial;
    let scale = [source, horizontal, boundary, partial].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(FluxBalance { source, horizontal, boundary, partial, residual, scale })
}

fn sample_index(grid: &SpatialGrid) -> impl Fn(usize, usize) -> usize {
    let map: std::collections::HashMap<(usize, usize), usize> =
        grid.boundary_samples().iter().enumerate().map(|(i, s)| ((s.node, s.face), i)).collect();
    move |node, face| map[&(node, face)]
}

/// Terms of the multiplier balance
/// `2Re∫_{Q_τ}(φ·∇ū)G = I₁ + I₂ + I₃ − Re∫_{H_τ}2(φ·∇ū)u_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierBalance {
    /// `∫_{Σ_τ}[|ν|²_A(|∇u|²_A − |u_t|²) − 2|u_{ν,A}|²]`.
    pub i1: f64,
    /// Reduced form on `Γ_{S,τ}` in terms of `∇(u(x,S(x)))`.
    pub i2: f64,
    /// Raw form on `Γ_{S,τ}` in terms of the bulk gradient.
    pub i2_raw: f64,
    pub i3: f64,
    /// `Re∫_{H_τ}2(φ·∇ū)u_t`.
    pub bottom: f64,
    pub source: f64,
    pub residual: f64,
    pub scale: f64,
}

fn phi_dot(phi: &Vec2, g: &[C; 2], dim: usize) -> C {
    (0..dim).map(|k| g[k].conj() * phi[k]).sum()
}

fn cmean<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(
    grid: &SpatialGrid,
    cell: usize,
    f: impl Fn(usize) -> T,
) -> T {
    let (corners, k) = grid.cell_corners(cell);
    let mut acc = f(corners[0]);
    for &c in &corners[1..k] {
        acc = acc + f(c);
    }
    acc * (1.0 / k as f64)
}

fn vmean(grid: &SpatialGrid, cell: usize, f: impl Fn(usize) -> Vec2) -> Vec2 {
    let (corners, k) = grid.cell_corners(cell);
    let mut acc = [0.0; 2];
    for &c in &corners[..k] {
        let v = f(c);
        acc[0] += v[0] / k as f64;
        acc[1] += v[1] / k as f64;
    }
    acc
}

fn cvmean(grid: &SpatialGrid, cell: usize, f: impl Fn(usize) -> [C; 2]) -> [C; 2] {
    let (corners, k) = grid.cell_corners(cell);
    let mut acc = [C::new(0.0, 0.0); 2];
    for &c in &corners[..k] {
        let v = f(c);
        acc[0] += v[0] / k as f64;
        acc[1] += v[1] / k as f64;
    }
    acc
}

pub fn multiplier_balance(
    u: &SpaceTimeField,
    scenario: &Scenario,
    s: &Hypersurface,
    phi: &MultiplierField,
    tau: f64,
) -> Result<MultiplierBalance> {
    let grid = u.grid();
    let dim = grid.dim();
    let a = &scenario.coefficients;
    let time = u.time();
    let masks = RegionMasks::new(s, tau, grid, time)?;
    let grads: Vec<[C; 2]> = (0..u.levels())
        .flat_map(|l| (0..grid.node_count()).map(move |n| (l, n)))
        .map(|(l, n)| u.grad(l, n))
        .collect::<Result<_>>()?;
    let g = |l: usize, n: usize| grads[l * grid.node_count() + n];

    // I1 on Σ_τ
    let con = conormal(u, a, s, tau)?;
    let count = con.samples.len();
    let index = sample_index(grid);
    let i1 = integrate_sigma(grid, &masks, time, |smp, l| {
        let an = a.at(smp.node);
        let nu_a = quad_form(an, &smp.normal, dim);
        let c = con.values[l * count + index(smp.node, smp.face)];
        nu_a * (quad_form_c(an, &g(l, smp.node), dim) - u.time_derivative(l, smp.node).norm_sqr()) - 2.0 * c.norm_sqr()
    })
    .value;

    // I3 and the source term on Q_τ
    let grad_a: Vec<[Mat2; 2]> = (0..grid.node_count())
        .map(|n| {
            let x = grid.coord(n);
            Ok([a.gradient_at(&x, 0)?, a.gradient_at(&x, 1)?])
        })
        .collect::<Result<_>>()?;
    let i3 = integrate_q(grid, &masks, time, |n, l| {
        let gn = g(l, n);
        let am = a.at(n);
        let p = phi.at(n);
        let jac = phi.jacobian(n);
        let mut phi_ga = [[0.0; 2]; 2];
        for j in 0..dim {
            for r in 0..dim {
                for c in 0..dim {
                    phi_ga[r][c] += p[j] * grad_a[n][j][r][c];
                }
            }
        }
        let ag = mat2_apply_c(am, &gn, dim);
        let mut cross = 0.0;
        for j in 0..dim {
            for k in 0..dim {
                cross += jac[j][k] * (gn[k].conj() * ag[j]).re;
            }
        }
        phi.divergence(n) * (u.time_derivative(l, n).norm_sqr() - quad_form_c(am, &gn, dim)) - quad_form_c(&phi_ga, &gn, dim)
            + 2.0 * cross
    })
    .value;
    let source = integrate_q(grid, &masks, time, |n, l| {
        2.0 * (phi_dot(&phi.at(n), &g(l, n), dim) * scenario.source_at(l, n)).re
    })
    .value;

    // bottom term on H_τ
    let slice = (0..grid.node_count()).map(|n| u.interp_time(n, tau)).collect::<Result<Vec<_>>>()?;
    let slice_u: Vec<C> = slice.iter().map(|v| v.0).collect();
    let bottom_nodal: Vec<f64> = (0..grid.node_count())
        .map(|n| {
            let gn = stencil::grad(grid, &slice_u, n)?;
            Ok(2.0 * (phi_dot(&phi.at(n), &gn, dim) * slice[n].1).re)
        })
        .collect::<Result<_>>()?;
    let bottom = if masks.is_empty() {
        0.0
    } else {
        integrate_cells(grid, &masks, |c| crate::fields::quadrature::cell_mean(grid, c, &bottom_nodal)).value
    };

    // I2 on Γ_{S,τ}, raw and reduced
    let (i2, i2_raw) = if masks.is_empty() {
        (0.0, 0.0)
    } else {
        let tr = trace(u, s, tau)?;
        let mut reduced = Vec::with_capacity(grid.cell_count());
        let mut raw = Vec::with_capacity(grid.cell_count());
        for c in 0..grid.cell_count() {
            let am = a.cell_mean(grid, c);
            let ds = s.gradient(c);
            let p = vmean(grid, c, |n| phi.at(n));
            let ut = cmean(grid, c, |n| tr.time_derivative[n]);
            let ut_sq = cmean(grid, c, |n| tr.time_derivative[n].norm_sqr());
            let gw = grid.cell_gradient_c(&tr.values, c);
            let gu = cvmean(grid, c, |n| tr.bulk_gradient[n]);
            let phi_ds: f64 = (0..dim).map(|k| p[k] * ds[k]).sum();
            let weight = 1.0 - quad_form(&am, &ds, dim);
            let agw = mat2_apply_c(&am, &gw, dim);
            let ds_agw: C = (0..dim).map(|k| agw[k] * ds[k]).sum();
            reduced.push(
                -phi_ds * (quad_form_c(&am, &gw, dim) + weight * ut_sq)
                    + 2.0 * (phi_dot(&p, &gw, dim) * (ds_agw + ut * weight)).re,
            );
            let agu = mat2_apply_c(&am, &gu, dim);
            let ds_agu: C = (0..dim).map(|k| agu[k] * ds[k]).sum();
            raw.push(-phi_ds * (quad_form_c(&am, &gu, dim) - ut_sq) + 2.0 * (phi_dot(&p, &gu, dim) * (ut + ds_agu)).re);
        }
        (
            integrate_cells(grid, &masks, |c| reduced[c]).value,
            integrate_cells(grid, &masks, |c| raw[c]).value,
        )
    };

    let residual = source - (i1 + i2 + i3 - bottom);
    let scale = [i1, i2, i3, bottom, source].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(MultiplierBalance { i1, i2, i2_raw, i3, bottom, source, residual, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SurfaceSpec;
    use crate::identities::multiplier::extend_multiplier;
    use crate::solver::{manufactured, solve, Params};

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn zero_scenario_balances_exactly() {
        let sc = manufactured("zero", &p(&[("n", 16.0)])).unwrap();
        let r = solve(&sc).unwrap();
        let s = SurfaceSpec::affine(0.3, &[0.4]).build(&sc.grid, 0.0).unwrap();
        let fb = flux_balance(&r.u, &sc, &s, 0.0).unwrap();
        assert_eq!(fb.residual, 0.0);
        let phi = extend_multiplier(&sc.coefficients, &sc.grid).unwrap();
        let mb = multiplier_balance(&r.u, &sc, &s, &phi, 0.0).unwrap();
        assert_eq!((mb.i1, mb.i2, mb.i3, mb.residual), (0.0, 0.0, 0.0, 0.0));
    }

    fn residuals(n: usize) -> (f64, f64, f64) {
        let sc = manufactured("standing", &p(&[("n", n as f64)])).unwrap();
        let r = solve(&sc).unwrap();
        let s = SurfaceSpec::affine(0.3, &[0.4]).build(&sc.grid, 0.0).unwrap();
        let fb = flux_balance(&r.u, &sc, &s, 0.0).unwrap();
        let flat = SurfaceSpec::constant(0.5).build(&sc.grid, 0.0).unwrap();
        let phi = extend_multiplier(&sc.coefficients, &sc.grid).unwrap();
        let mb = multiplier_balance(&r.u, &sc, &flat, &phi, 0.0).unwrap();
        let ms = multiplier_balance(&r.u, &sc, &s, &phi, 0.2).unwrap();
        (fb.residual.abs(), mb.residual.abs(), (ms.i2 - ms.i2_raw).abs())
    }

    #[test]
    fn standing_wave_balances_converge() {
        let (f1, m1, d1) = residuals(64);
        let (f2, m2, d2) = residuals(128);
        assert!(f2 < f1 / 2.0, "flux {f1} {f2}");
        assert!(m2 < m1 / 2.0, "multiplier {m1} {m2}");
        assert!(d2 < d1 / 1.8, "i2 {d1} {d2}");
    }
}
