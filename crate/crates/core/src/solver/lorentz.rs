//! Lorentz-boost comparison: solve in the lab frame, resample into boosted
//! coordinates `t̃ = γ(t − v x)`, `x̃ = γ(x − v t)` and check the wave equation there.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::SpaceTimeField;
use crate::linalg::C;

use super::manufactured::{manufactured, Params};
use super::{solve, Scenario, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoostProfile {
    GaussianPulse,
    PlaneWave,
}

/// Lab setup on `[−3, 3] × [0, 3]` and the boosted sampling window.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzSetup {
    pub v: f64,
    /// Lab cells; a multiple of 6 keeps `x̃ = ±1` on lab nodes.
    pub cells: usize,
    pub profile: BoostProfile,
    pub box_x: [f64; 2],
    pub box_t: [f64; 2],
    /// Boosted time of the simultaneity line used for the H¹ comparison.
    pub t_plane: f64,
}

impl LorentzSetup {
    pub fn new(v: f64, cells: usize, profile: BoostProfile) -> Self {
        Self { v, cells, profile, box_x: [-1.0, 1.0], box_t: [0.7, 1.5], t_plane: 1.1 }
    }
}

pub fn gamma(v: f64) -> f64 {
    1.0 / (1.0 - v * v).sqrt()
}

/// Resampled field `ũ(x̃_i, t̃_m)` on a uniform boosted grid.
#[derive(Debug, Clone)]
pub struct BoostedField {
    pub x0: f64,
    pub t0: f64,
    pub h: f64,
    pub dt: f64,
    pub nx: usize,
    pub nt: usize,
    pub values: Vec<C>,
}

impl BoostedField {
    pub fn at(&self, m: usize, i: usize) -> C {
        self.values[m * self.nx + i]
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn t(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    /// Max of `|D_t̃t̃ ũ − D_x̃x̃ ũ|` and of `|D_t̃t̃ ũ|` over interior points.
    pub fn wave_residual(&self) -> (f64, f64) {
        let (mut res, mut scale) = (0.0f64, 0.0f64);
        for m in 1..self.nt - 1 {
            for i in 1..self.nx - 1 {
                let dtt = (self.at(m + 1, i) - self.at(m, i) * 2.0 + self.at(m - 1, i)) / (self.dt * self.dt);
                let dxx = (self.at(m, i + 1) - self.at(m, i) * 2.0 + self.at(m, i - 1)) / (self.h * self.h);
                res = res.max((dtt - dxx).norm());
                scale = scale.max(dtt.norm());
            }
        }
        (res, scale)
    }
}

/// Four-point Lagrange stencil on `0..=last` at fractional index `p`; snaps to nodes.
fn lagrange4(p: f64, last: usize) -> ([usize; 4], [f64; 4], usize) {
    let nearest = p.round();
    if (p - nearest).abs() <= 1e-9 && nearest >= 0.0 && nearest as usize <= last {
        return ([nearest as usize, 0, 0, 0], [1.0, 0.0, 0.0, 0.0], 1);
    }
    let start = ((p.floor() as isize) - 1).clamp(0, last as isize - 3) as usize;
    let mut idx = [0usize; 4];
    let mut w = [0.0; 4];
    for a in 0..4 {
        idx[a] = start + a;
        let xa = (start + a) as f64;
        w[a] = (0..4).filter(|&b| b != a).map(|b| (p - (start + b) as f64) / (xa - (start + b) as f64)).product();
    }
    (idx, w, 4)
}

/// Tensor-product cubic interpolation of a lab field at `(x, t)`.
pub fn sample_lab(u: &SpaceTimeField, x: f64, t: f64) -> Result<C> {
    let grid = u.grid();
    let lo = grid.domain().bounds[0][0];
    let (nx, nt) = (grid.cells_per_axis(0), u.time().steps());
    let px = (x - lo) / grid.h(0);
    let pt = t / u.dt();
    if px < -1e-9 || px > nx as f64 + 1e-9 || pt < -1e-9 || pt > nt as f64 + 1e-9 {
        return Err(Error::InvalidParameter(format!("boost preimage ({x}, {t}) outside the lab grid")));
    }
    let (ix, wx, kx) = lagrange4(px, nx);
    let (it, wt, kt) = lagrange4(pt, nt);
    let mut acc = C::new(0.0, 0.0);
    for a in 0..kt {
        for b in 0..kx {
            acc += u.at(it[a], ix[b]) * (wt[a] * wx[b]);
        }
    }
    Ok(acc)
}

/// Numbers produced by [`lorentz_scenario`].
#[derive(Debug, Clone, Serialize)]
pub struct LorentzReport {
    pub v: f64,
    pub gamma: f64,
    pub cells: usize,
    pub profile: BoostProfile,
    /// `max|D_t̃t̃ũ − D_x̃x̃ũ| / max|D_t̃t̃ũ|`.
    pub residual: f64,
    pub residual_abs: f64,
    pub residual_scale: f64,
    /// Rounding floor `ε·max|ũ|·(4/dt² + 4/h²)` for the absolute residual.
    pub rounding_floor: f64,
    /// Max deviation from the closed-form boosted field.
    pub boosted_exact_error: f64,
    /// `∫|ũ_x̃|² dx̃` on `t̃ = t_plane`.
    pub h1_horizontal: f64,
    /// `γ ∫|d/dx u(x, S(x))|² dx` on the matching slanted line `S(x) = t_plane/γ + v x`.
    pub h1_slanted_scaled: f64,
    pub h1_relative_difference: f64,
}

/// Lab scenario, its solution, the boosted resampling and the report.
#[derive(Debug, Clone)]
pub struct LorentzComparison {
    pub lab: Scenario,
    pub solution: SolveResult,
    pub boosted: BoostedField,
    pub report: LorentzReport,
}

pub fn lorentz_scenario(setup: &LorentzSetup) -> Result<LorentzComparison> {
    let v = setup.v;
    if !(v.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("boost velocity |v| = {} must be below 1", v.abs())));
    }
    let g = gamma(v);
    let name = match setup.profile {
        BoostProfile::GaussianPulse => "gaussian-pulse",
        BoostProfile::PlaneWave => "plane-wave",
    };
    let params: Params = [("n".to_string(), setup.cells as f64)].into_iter().collect();
    let lab = manufactured(name, &params)?;
    let solution = solve(&lab)?;
    let u = &solution.u;
    let grid = u.grid();
    let h = grid.h(0);
    let dt = u.dt();
    let lo = grid.domain().bounds[0][0];

    // Boosted grid aligned with lab nodes and levels, so v = 0 samples exactly.
    let i0 = ((setup.box_x[0] - lo) / h).round() as usize;
    let i1 = ((setup.box_x[1] - lo) / h).round() as usize;
    let m0 = (setup.box_t[0] / dt).round() as usize;
    let m1 = (setup.box_t[1] / dt).round() as usize;
    let (nx, nt) = (i1 - i0 + 1, m1 - m0 + 1);
    let x0 = grid.coord(i0)[0];
    let t0 = u.time().time(m0);
    let mut values = Vec::with_capacity(nx * nt);
    for m in 0..nt {
        let tt = if v == 0.0 { u.time().time(m0 + m) } else { t0 + m as f64 * dt };
        for i in 0..nx {
            let xt = if v == 0.0 { grid.coord(i0 + i)[0] } else { x0 + i as f64 * h };
            values.push(sample_lab(u, g * (xt + v * tt), g * (tt + v * xt))?);
        }
    }
    let boosted = BoostedField { x0, t0, h, dt, nx, nt, values };
    let (residual_abs, residual_scale) = boosted.wave_residual();
    let umax = boosted.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rounding_floor = f64::EPSILON * umax * (4.0 / (dt * dt) + 4.0 / (h * h));

    let exact = lab.exact.as_ref().expect("catalog scenarios carry an exact solution");
    let boosted_exact_error = (0..nt)
        .flat_map(|m| (0..nx).map(move |i| (m, i)))
        .map(|(m, i)| {
            let (xt, tt) = (boosted.x(i), boosted.t(m));
            (boosted.at(m, i) - exact.value(&[g * (xt + v * tt), 0.0], g * (tt + v * xt))).norm()
        })
        .fold(0.0, f64::max);

    // H¹ on the horizontal boosted line versus the slanted lab line.
    let fine = 4 * (nx - 1);
    let hf = (boosted.x(nx - 1) - x0) / fine as f64;
    let tp = setup.t_plane;
    let line = |k: usize| -> Result<C> {
        let xt = x0 + k as f64 * hf;
        sample_lab(u, g * (xt + v * tp), g * (tp + v * xt))
    };
    let samples = (0..=fine).map(line).collect::<Result<Vec<_>>>()?;
    let h1_horizontal = trapezoid_gradient_sq(&samples, hf);
    let xa = g * (x0 + v * tp);
    let xb = g * (boosted.x(nx - 1) + v * tp);
    let hx = (xb - xa) / fine as f64;
    let slanted = (0..=fine)
        .map(|k| {
            let x = xa + k as f64 * hx;
            sample_lab(u, x, tp / g + v * x)
        })
        .collect::<Result<Vec<_>>>()?;
    let h1_slanted_scaled = g * trapezoid_gradient_sq(&slanted, hx);
    let h1_relative_difference = (h1_horizontal - h1_slanted_scaled).abs() / h1_horizontal.max(f64::MIN_POSITIVE);

    let report = LorentzReport {
        v,
        gamma: g,
        cells: setup.cells,
        profile: setup.profile,
        residual: if residual_scale > 0.0 { residual_abs / residual_scale } else { residual_abs },
        residual_abs,
        residual_scale,
        rounding_floor,
        boosted_exact_error,
        h1_horizontal,
        h1_slanted_scaled,
        h1_relative_difference,
    };
    Ok(LorentzComparison { lab, solution, boosted, report })
}

/// `∫|w'|²` from samples: central differences inside, one-sided at the ends.
fn trapezoid_gradient_sq(w: &[C], h: f64) -> f64 {
    let n = w.len() - 1;
    let d = |k: usize| -> C {
        if k == 0 {
            (w[0] * -3.0 + w[1] * 4.0 - w[2]) / (2.0 * h)
        } else if k == n {
            (w[n] * 3.0 - w[n - 1] * 4.0 + w[n - 2]) / (2.0 * h)
        } else {
            (w[k + 1] - w[k - 1]) / (2.0 * h)
        }
    };
    (0..=n).map(|k| if k == 0 || k == n { 0.5 } else { 1.0 } * h * d(k).norm_sqr()).sum()
}

/// Closed-form boosted plane wave `sin(πγ(1 − v)(x̃ − t̃))`.
pub fn boosted_plane_wave(v: f64, xt: f64, tt: f64) -> f64 {
    (PI * gamma(v) * (1.0 - v) * (xt - tt)).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_reproduces_cubics() {
        let f = |s: f64| 1.0 - 2.0 * s + 0.5 * s * s - 0.1 * s * s * s;
        for p in [0.3, 2.7, 5.5, 8.9] {
            let (idx, w, k) = lagrange4(p, 9);
            let v: f64 = (0..k).map(|a| w[a] * f(idx[a] as f64)).sum();
            assert!((v - f(p)).abs() < 1e-12);
        }
        let (idx, w, k) = lagrange4(4.0, 9);
        assert_eq!((idx[0], w[0], k), (4, 1.0, 1));
    }

    #[test]
    fn plane_wave_phase_identity() {
        let v = 0.5;
        let g = gamma(v);
        for &(xt, tt) in &[(0.1, 0.9), (-0.7, 1.3), (0.5, 0.5)] {
            let (x, t) = (g * (xt + v * tt), g * (tt + v * xt));
            assert!(((PI * (x - t)).sin() - boosted_plane_wave(v, xt, tt)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_superluminal_boost() {
        assert!(lorentz_scenario(&LorentzSetup::new(1.0, 96, BoostProfile::GaussianPulse)).is_err());
    }
}
