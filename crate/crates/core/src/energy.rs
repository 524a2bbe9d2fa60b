//! Traces on `Γ_S`, the generalized energy, partial and horizontal energies,
//! the H¹(Γ_S) norm, conormal traces on `Σ` and the inequality reports.

use serde::Serialize;

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::fields::quadrature::{cell_mean, integrate_cells, integrate_q, integrate_sigma};
use crate::fields::{stencil, BoundaryField, RegionIntegral, SpaceTimeField};
use crate::geometry::{classify, BoundarySample, CausalKind, Hypersurface, RegionMasks, SpatialGrid};
use crate::linalg::{mat2_apply_c, quad_form, quad_form_c, C};
use crate::solver::{Scenario, SolveResult};

/// Restriction of `(u, u_t, ∇u)` to `Γ_S` plus the gradient of the traced values.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    grid: SpatialGrid,
    pub tau: f64,
    pub surface: Vec<f64>,
    /// `u(x_i, S(x_i))`.
    pub values: Vec<C>,
    /// `u_t(x_i, S(x_i))`.
    pub time_derivative: Vec<C>,
    /// `∇u` at `(x_i, S(x_i))` from time-interpolated neighbour columns.
    pub bulk_gradient: Vec<[C; 2]>,
    /// `∇(u(x, S(x)))` at `x_i` from differencing the traced values.
    pub surface_gradient: Vec<[C; 2]>,
    /// Nodes with `S(x_i) ≥ τ`.
    pub on_surface: Vec<bool>,
}

/// Traces `u` on `Γ_S` (all nodes; `on_surface` marks `Γ_{S,τ}`).
pub fn trace(u: &SpaceTimeField, s: &Hypersurface, tau: f64) -> Result<TraceData> {
    let grid = u.grid();
    if s.nodal().len() != grid.node_count() {
        return Err(Error::GridMismatch);
    }
    let nodes = grid.node_count();
    let mut values = Vec::with_capacity(nodes);
    let mut time_derivative = Vec::with_capacity(nodes);
    let mut bulk_gradient = Vec::with_capacity(nodes);
    for node in 0..nodes {
        let t = s.value(node);
        let (w, wt) = u.interp_time(node, t)?;
        values.push(w);
        time_derivative.push(wt);
        let mut g = [C::new(0.0, 0.0); 2];
        for (axis, slot) in g.iter_mut().enumerate().take(grid.dim()) {
            *slot = stencil::d1(grid, |n| u.interp_time(n, t).map(|v| v.0).unwrap_or_default(), node, axis);
        }
        bulk_gradient.push(g);
    }
    let surface_gradient = (0..nodes).map(|n| stencil::grad(grid, &values, n)).collect::<Result<_>>()?;
    Ok(TraceData {
        grid: grid.clone(),
        tau,
        surface: s.nodal().to_vec(),
        on_surface: s.nodal().iter().map(|&v| v >= tau).collect(),
        values,
        time_derivative,
        bulk_gradient,
        surface_gradient,
    })
}

impl TraceData {
    /// Trace from prescribed surface values and `u_t`; the bulk gradient
    /// follows from the chain rule.
    pub fn from_parts(grid: &SpatialGrid, s: &Hypersurface, values: Vec<C>, time_derivative: Vec<C>) -> Result<Self> {
        let nodes = grid.node_count();
        if values.len() != nodes || time_derivative.len() != nodes || s.nodal().len() != nodes {
            return Err(Error::GridMismatch);
        }
        let surface_gradient: Vec<[C; 2]> = (0..nodes).map(|n| stencil::grad(grid, &values, n)).collect::<Result<_>>()?;
        let bulk_gradient = (0..nodes)
            .map(|n| {
                let ds = nodal_surface_gradient(grid, s.nodal(), n);
                let mut g = surface_gradient[n];
                for k in 0..grid.dim() {
                    g[k] -= time_derivative[n] * ds[k];
                }
                g
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            tau: 0.0,
            surface: s.nodal().to_vec(),
            on_surface: vec![true; nodes],
            values,
            time_derivative,
            bulk_gradient,
            surface_gradient,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// `self − other` (traces are linear in `u`).
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.surface != other.surface {
            return Err(Error::GridMismatch);
        }
        let diff = |a: &[C], b: &[C]| -> Vec<C> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
        let diff2 = |a: &[[C; 2]], b: &[[C; 2]]| -> Vec<[C; 2]> {
            a.iter().zip(b).map(|(x, y)| [x[0] - y[0], x[1] - y[1]]).collect()
        };
        Ok(Self {
            grid: self.grid.clone(),
            tau: self.tau,
            surface: self.surface.clone(),
            on_surface: self.on_surface.clone(),
            values: diff(&self.values, &other.values),
            time_derivative: diff(&self.time_derivative, &other.time_derivative),
            bulk_gradient: diff2(&self.bulk_gradient, &other.bulk_gradient),
            surface_gradient: diff2(&self.surface_gradient, &other.surface_gradient),
        })
    }

    /// `max_i |∇w − (∇u + ∇S·u_t)|` over nodes on `Γ_{S,τ}`.
    pub fn chain_rule_discrepancy(&self) -> f64 {
        let dim = self.grid.dim();
        (0..self.values.len())
            .filter(|&n| self.on_surface[n])
            .map(|n| {
                let ds = nodal_surface_gradient(&self.grid, &self.surface, n);
                (0..dim)
                    .map(|k| (self.surface_gradient[n][k] - self.bulk_gradient[n][k] - self.time_derivative[n] * ds[k]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Max over nodes of `|∇w|²_A + (1−|∇S|²_A)|u_t|² − (|∇u|²_A + |u_t|² + 2Re{ū_t ∇S·A∇u})`,
    /// with nodal `∇S`, using the traced (not chain-rule) surface gradient.
    pub fn chain_rule_identity_residual(&self, a: &CoefficientField) -> f64 {
        let dim = self.grid.dim();
        (0..self.values.len())
            .filter(|&n| self.on_surface[n])
            .map(|n| {
                let am = a.at(n);
                let ds = nodal_surface_gradient(&self.grid, &self.surface, n);
                let ut = self.time_derivative[n];
                let lhs = quad_form_c(am, &self.surface_gradient[n], dim) + (1.0 - quad_form(am, &ds, dim)) * ut.norm_sqr();
                let agu = mat2_apply_c(am, &self.bulk_gradient[n], dim);
                let cross: C = (0..dim).map(|k| agu[k] * ds[k]).sum();
                let rhs = quad_form_c(am, &self.bulk_gradient[n], dim) + ut.norm_sqr() + 2.0 * (ut.conj() * cross).re;
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn nodal_surface_gradient(grid: &SpatialGrid, s: &[f64], node: usize) -> [f64; 2] {
    let mut g = [0.0; 2];
    for (axis, slot) in g.iter_mut().enumerate().take(grid.dim()) {
        *slot = stencil::d1(grid, |n| C::new(s[n], 0.0), node, axis).re;
    }
    g
}

/// Per-cell energy density `|∇w|²_A + (1 − |∇S|²_A)|u_t|²`; midpoint gradient,
/// corner-mean `|u_t|²`, cell-averaged `A`.
pub fn energy_density(trace: &TraceData, s: &Hypersurface, a: &CoefficientField) -> Result<Vec<f64>> {
    let grid = &trace.grid;
    let class = classify(s, a, grid);
    class.require_non_timelike()?;
    let dim = grid.dim();
    let ut_sq: Vec<f64> = trace.time_derivative.iter().map(|v| v.norm_sqr()).collect();
    Ok((0..grid.cell_count())
        .map(|c| {
            let am = a.cell_mean(grid, c);
            let gw = grid.cell_gradient_c(&trace.values, c);
            let weight = (1.0 - quad_form(&am, &s.gradient(c), dim)).max(0.0);
            quad_form_c(&am, &gw, dim) + weight * cell_mean(grid, c, &ut_sq)
        })
        .collect())
}

/// `E(u; Γ_S)`.
pub fn surface_energy(trace: &TraceData, s: &Hypersurface, a: &CoefficientField) -> Result<f64> {
    let density = energy_density(trace, s, a)?;
    let vol = trace.grid.cell_volume();
    Ok(density.iter().map(|d| vol * d).sum())
}

/// `E_τ(u)`: the energy integrand over `{S ≥ τ}`.
pub fn partial_energy(u: &SpaceTimeField, s: &Hypersurface, a: &CoefficientField, tau: f64) -> Result<RegionIntegral> {
    let masks = RegionMasks::new(s, tau, u.grid(), u.time())?;
    if masks.is_empty() {
        return Ok(RegionIntegral { value: 0.0, empty: true });
    }
    let tr = trace(u, s, tau)?;
    let density = energy_density(&tr, s, a)?;
    Ok(integrate_cells(u.grid(), &masks, |c| density[c]))
}

/// `e(τ) = ∫_{H_τ} (|∇u|²_A + |u_t|²) dx`.
pub fn horizontal_energy(u: &SpaceTimeField, a: &CoefficientField, s: &Hypersurface, tau: f64) -> Result<RegionIntegral> {
    let grid = u.grid();
    let masks = RegionMasks::new(s, tau, grid, u.time())?;
    if masks.is_empty() {
        return Ok(RegionIntegral { value: 0.0, empty: true });
    }
    let slice = (0..grid.node_count()).map(|n| u.interp_time(n, tau)).collect::<Result<Vec<_>>>()?;
    let values: Vec<C> = slice.iter().map(|v| v.0).collect();
    let ut_sq: Vec<f64> = slice.iter().map(|v| v.1.norm_sqr()).collect();
    let dim = grid.dim();
    Ok(integrate_cells(grid, &masks, |c| {
        quad_form_c(&a.cell_mean(grid, c), &grid.cell_gradient_c(&values, c), dim) + cell_mean(grid, c, &ut_sq)
    }))
}

/// Classical energy `∫(|∇u0|²_A + |u1|²)` over Ω with the same cell rule.
pub fn classical_energy(grid: &SpatialGrid, a: &CoefficientField, u0: &[C], u1: &[C]) -> f64 {
    let (g, v) = data_norms(grid, Some(a), u0, u1);
    g + v
}

/// `(‖∇u0‖²_A or ‖∇u0‖², ‖u1‖²)` with the cell rule; `a = None` gives the Euclidean norm.
pub fn data_norms(grid: &SpatialGrid, a: Option<&CoefficientField>, u0: &[C], u1: &[C]) -> (f64, f64) {
    let dim = grid.dim();
    let vol = grid.cell_volume();
    let u1_sq: Vec<f64> = u1.iter().map(|v| v.norm_sqr()).collect();
    let eye = crate::linalg::mat2_identity();
    let mut grad = 0.0;
    let mut vel = 0.0;
    for c in 0..grid.cell_count() {
        let am = a.map_or(eye, |a| a.cell_mean(grid, c));
        grad += vol * quad_form_c(&am, &grid.cell_gradient_c(u0, c), dim);
        vel += vol * cell_mean(grid, c, &u1_sq);
    }
    (grad, vel)
}

/// `‖w‖²_{H¹(Γ_S)} = ∫|∇w|²/√(1+|∇S|²)` and its bound `c₁⁻¹max{1, c₂}E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Report {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn h1_surface_norm(trace: &TraceData, s: &Hypersurface, a: &CoefficientField) -> Result<H1Report> {
    let grid = &trace.grid;
    let dim = grid.dim();
    let vol = grid.cell_volume();
    let value: f64 = (0..grid.cell_count())
        .map(|c| {
            let gw = grid.cell_gradient_c(&trace.values, c);
            let gs = s.gradient(c);
            let norm_sq: f64 = (0..dim).map(|k| gw[k].norm_sqr()).sum();
            vol * norm_sq / (1.0 + (0..dim).map(|k| gs[k] * gs[k]).sum::<f64>()).sqrt()
        })
        .sum();
    let e = surface_energy(trace, s, a)?;
    let b = a.ellipticity_bounds();
    let bound = b.c2.max(1.0) / b.c1 * e;
    Ok(H1Report { value, bound, holds: value <= bound * (1.0 + 1e-12) + 1e-300 })
}

/// `u_{ν,A} = ν_Σ·A∇u` per boundary sample and level, and `‖·‖²_{L²(Σ_τ)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConormalTrace {
    pub samples: Vec<BoundarySample>,
    /// Level-major over `samples`.
    pub values: Vec<C>,
    pub l2_sq: f64,
}

impl ConormalTrace {
    pub fn at(&self, level: usize, sample: usize) -> C {
        self.values[level * self.samples.len() + sample]
    }
}

pub fn conormal(u: &SpaceTimeField, a: &CoefficientField, s: &Hypersurface, tau: f64) -> Result<ConormalTrace> {
    let grid = u.grid();
    let dim = grid.dim();
    let samples = grid.boundary_samples();
    let mut values: Vec<C> = Vec::with_capacity(samples.len() * u.levels());
    for level in 0..u.levels() {
        for smp in &samples {
            let g = u.grad(level, smp.node)?;
            let ag = mat2_apply_c(a.at(smp.node), &g, dim);
            values.push((0..dim).map(|k| ag[k] * smp.normal[k]).sum());
        }
    }
    let masks = RegionMasks::new(s, tau, grid, u.time())?;
    let count = samples.len();
    let index: std::collections::HashMap<(usize, usize), usize> =
        samples.iter().enumerate().map(|(i, smp)| ((smp.node, smp.face), i)).collect();
    let l2_sq = integrate_sigma(grid, &masks, u.time(), |smp, l| values[l * count + index[&(smp.node, smp.face)]].norm_sqr()).value;
    Ok(ConormalTrace { samples, values, l2_sq })
}

/// `‖f‖²_{H¹(Σ_τ)} = ∫_{Σ_τ} |f|² + |f_t|² + |∇_tan f|²`.
pub fn boundary_h1_sq(f: &BoundaryField, grid: &SpatialGrid, masks: &RegionMasks) -> f64 {
    let dim = grid.dim();
    integrate_sigma(grid, masks, f.time(), |smp, level| {
        let b = f.slot(smp.node).expect("boundary sample on boundary node");
        let mut acc = f.at(level, b).norm_sqr() + f.time_derivative(level, b).norm_sqr();
        for axis in 0..dim {
            if smp.normal[axis] == 0.0 {
                let d = stencil::d1(grid, |n| f.at_node(level, n).unwrap_or_default(), smp.node, axis);
                acc += d.norm_sqr();
            }
        }
        acc
    })
    .value
}

/// Inequality left/right-hand sides with `C = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub class: CausalKind,
    pub max_slope: f64,
    pub t2: f64,
    /// `(1 + T₂²)^{1/2}`.
    pub bracket_t2: f64,
    pub e_surface: f64,
    pub e0: f64,
    /// `|E(u; Γ_S) − e(0)|`.
    pub lhs: f64,
    pub grad_u0_sq: f64,
    pub u1_sq: f64,
    pub f_h1_sigma0_sq: f64,
    pub g_l2_q0_sq: f64,
    pub rhs_deviation: f64,
    pub ratio_deviation: Option<f64>,
    pub rhs_energy: f64,
    pub ratio_energy: Option<f64>,
    pub conormal_sq: f64,
    pub rhs_conormal: f64,
    pub ratio_conormal: Option<f64>,
    /// `|E − e(0)|` when `f = G = 0`.
    pub conservation_residual: Option<f64>,
    pub h1: H1Report,
    /// `‖u_t‖²_{L²(Γ_S)}` and `(1 − max|∇S|²_A)⁻¹E` for strictly spacelike surfaces.
    pub ut_sq: f64,
    pub ut_bound: Option<f64>,
    pub chain_rule_discrepancy: f64,
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > 0.0).then(|| lhs / rhs)
}

pub fn bound_report(scenario: &Scenario, solution: &SolveResult, s: &Hypersurface) -> Result<EnergyReport> {
    let grid = &scenario.grid;
    let a = &scenario.coefficients;
    let u = &solution.u;
    let class = classify(s, a, grid);
    class.require_non_timelike()?;
    let tr = trace(u, s, 0.0)?;
    let e_surface = surface_energy(&tr, s, a)?;
    let e0 = classical_energy(grid, a, &scenario.initial.u0, &scenario.initial.u1);
    let (grad_u0_sq, u1_sq) = data_norms(grid, None, &scenario.initial.u0, &scenario.initial.u1);
    let masks = RegionMasks::new(s, 0.0, grid, &scenario.time)?;
    let f_h1_sigma0_sq = boundary_h1_sq(&scenario.boundary, grid, &masks);
    let g_l2_q0_sq = integrate_q(grid, &masks, &scenario.time, |n, l| scenario.source_at(l, n).norm_sqr()).value;
    let t2 = s.t2();
    let bracket_t2 = (1.0 + t2 * t2).sqrt();
    let data = f_h1_sigma0_sq.sqrt() + g_l2_q0_sq.sqrt();
    let lhs = (e_surface - e0).abs();
    let rhs_deviation = bracket_t2.sqrt() * (grad_u0_sq.sqrt() + u1_sq.sqrt() + bracket_t2.sqrt() * data) * data;
    let rhs_energy = grad_u0_sq + u1_sq + bracket_t2 * (f_h1_sigma0_sq + g_l2_q0_sq);
    let conormal_sq = conormal(u, a, s, 0.0)?.l2_sq;
    let rhs_conormal = bracket_t2 * (grad_u0_sq + u1_sq) + bracket_t2 * bracket_t2 * (g_l2_q0_sq + f_h1_sigma0_sq);
    let zero_data = scenario.has_zero_source() && scenario.has_zero_boundary();
    let ut_sq_nodal: Vec<f64> = tr.time_derivative.iter().map(|v| v.norm_sqr()).collect();
    let ut_sq = (0..grid.cell_count()).map(|c| grid.cell_volume() * cell_mean(grid, c, &ut_sq_nodal)).sum();
    Ok(EnergyReport {
        class: class.kind,
        max_slope: class.max_slope,
        t2,
        bracket_t2,
        e_surface,
        e0,
        lhs,
        grad_u0_sq,
        u1_sq,
        f_h1_sigma0_sq,
        g_l2_q0_sq,
        rhs_deviation,
        ratio_deviation: ratio(lhs, rhs_deviation),
        rhs_energy,
        ratio_energy: ratio(e_surface, rhs_energy),
        conormal_sq,
        rhs_conormal,
        ratio_conormal: ratio(conormal_sq, rhs_conormal),
        conservation_residual: zero_data.then_some(lhs),
        h1: h1_surface_norm(&tr, s, a)?,
        ut_sq,
        ut_bound: (class.kind == CausalKind::Spacelike).then(|| e_surface / (1.0 - class.max_slope * class.max_slope)),
        chain_rule_discrepancy: tr.chain_rule_discrepancy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientFamily;
    use crate::geometry::{Domain, SurfaceSpec, TimeGrid};
    use crate::solver::{manufactured, solve, Params};
    use std::f64::consts::PI;

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn linear_in_time_field_traces_exactly() {
        let g = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), 16).unwrap();
        let t = TimeGrid::new(1.0, 20).unwrap();
        let u = SpaceTimeField::from_fn(g.clone(), t, |_, t| C::new(t, 0.0));
        let s = SurfaceSpec::affine(0.3, &[0.4]).build(&g, 0.0).unwrap();
        let tr = trace(&u, &s, 0.0).unwrap();
        for n in 0..g.node_count() {
            assert!((tr.values[n].re - s.value(n)).abs() < 1e-14);
            assert!((tr.time_derivative[n].re - 1.0).abs() < 1e-12);
            assert!((tr.surface_gradient[n][0].re - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_has_zero_energy_and_norms() {
        let s = manufactured("zero", &p(&[("n", 16.0)])).unwrap();
        let r = solve(&s).unwrap();
        let surf = SurfaceSpec::affine(0.3, &[0.4]).build(&s.grid, 0.0).unwrap();
        let rep = bound_report(&s, &r, &surf).unwrap();
        assert_eq!((rep.e_surface, rep.lhs, rep.rhs_deviation, rep.conormal_sq, rep.h1.value), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(rep.conservation_residual, Some(0.0));
    }

    #[test]
    fn horizontal_initial_plane_gives_classical_energy() {
        let s = manufactured("standing", &p(&[("n", 64.0)])).unwrap();
        let r = solve(&s).unwrap();
        let flat = SurfaceSpec::constant(0.0).build(&s.grid, 0.0).unwrap();
        let tr = trace(&r.u, &flat, 0.0).unwrap();
        let e = surface_energy(&tr, &flat, &s.coefficients).unwrap();
        let e0 = classical_energy(&s.grid, &s.coefficients, &s.initial.u0, &s.initial.u1);
        // u_t at level 0 is the quadratic-interpolant derivative, O(dt²) from u1
        assert!((e - e0).abs() < 1e-8 * e0, "{e} vs {e0}");
        let h1 = h1_surface_norm(&tr, &flat, &s.coefficients).unwrap();
        assert!((h1.value - data_norms(&s.grid, None, &s.initial.u0, &s.initial.u1).0).abs() < 1e-12);
    }

    #[test]
    fn timelike_surface_is_rejected() {
        let s = manufactured("standing", &p(&[("n", 16.0)])).unwrap();
        let r = solve(&s).unwrap();
        let a4 = CoefficientField::from_family(&s.grid, CoefficientFamily::Scalar { value: 4.0 }).unwrap();
        let x = SurfaceSpec::affine(0.0, &[1.0]).build(&s.grid, 0.0).unwrap();
        let tr = trace(&r.u, &x, 0.0).unwrap();
        assert!(matches!(surface_energy(&tr, &x, &a4), Err(Error::Timelike { .. })));
    }

    #[test]
    fn conormal_scales_linearly_with_a() {
        let s = manufactured("standing", &p(&[("n", 32.0)])).unwrap();
        let r = solve(&s).unwrap();
        let a4 = CoefficientField::from_family(&s.grid, CoefficientFamily::Scalar { value: 4.0 }).unwrap();
        let surf = SurfaceSpec::constant(0.5).build(&s.grid, 0.0).unwrap();
        let c1 = conormal(&r.u, &s.coefficients, &surf, 0.0).unwrap();
        let c4 = conormal(&r.u, &a4, &surf, 0.0).unwrap();
        for (x, y) in c1.values.iter().zip(&c4.values) {
            assert_eq!(*x * 4.0, *y);
        }
        assert!((c4.l2_sq - 16.0 * c1.l2_sq).abs() <= 1e-12 * c4.l2_sq);
        // outward normal derivative at x = 0 is −u_x = −π cos(πt)
        let t = s.time.time(10);
        assert!((c1.at(10, 0).re + PI * (PI * t).cos()).abs() < 1e-2);
    }

    #[test]
    fn partial_energy_endpoints() {
        let s = manufactured("standing", &p(&[("n", 64.0)])).unwrap();
        let r = solve(&s).unwrap();
        let surf = SurfaceSpec::affine(0.3, &[0.4]).build(&s.grid, 0.0).unwrap();
        let full = surface_energy(&trace(&r.u, &surf, 0.0).unwrap(), &surf, &s.coefficients).unwrap();
        let low = partial_energy(&r.u, &surf, &s.coefficients, 0.2).unwrap();
        assert!((low.value - full).abs() < 1e-12);
        let top = partial_energy(&r.u, &surf, &s.coefficients, surf.t2()).unwrap();
        assert!(top.value.abs() < 1e-12);
        let above = partial_energy(&r.u, &surf, &s.coefficients, 0.9).unwrap();
        assert!(above.empty);
    }
}
