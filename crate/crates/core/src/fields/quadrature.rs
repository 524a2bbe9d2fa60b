//! Trapezoid quadrature restricted to `Q_τ`, `Σ_τ`, `H_τ` and `Γ_{S,τ}`.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{BoundarySample, RegionMasks, SpatialGrid, TimeGrid};
use crate::linalg::C;

use super::{BoundaryField, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Q,
    Sigma,
    H,
    Gamma,
}

/// Quadrature value plus a flag for an empty region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionIntegral {
    pub value: f64,
    pub empty: bool,
}

/// `∫_a^b g dt` over stored levels, trapezoid with linearly interpolated end segments.
pub fn column_integral(time: &TimeGrid, a: f64, b: f64, g: impl Fn(usize) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let dt = time.dt();
    let last = time.steps();
    let snap = 1e-9;
    let lerp = |t: f64| {
        let p = (t / dt).clamp(0.0, last as f64);
        let n = (p.floor() as usize).min(last - 1);
        let s = p - n as f64;
        (1.0 - s) * g(n) + s * g(n + 1)
    };
    let na = ((a / dt - snap).ceil().max(0.0) as usize).min(last);
    let nb = ((b / dt + snap).floor().max(0.0) as usize).min(last);
    if na > nb {
        return (b - a) * 0.5 * (lerp(a) + lerp(b));
    }
    let mut acc = 0.0;
    let ta = time.time(na);
    if ta > a {
        acc += (ta - a) * 0.5 * (lerp(a) + g(na));
    }
    let mut prev = g(na);
    for n in na..nb {
        let next = g(n + 1);
        acc += (time.time(n + 1) - time.time(n)) * 0.5 * (prev + next);
        prev = next;
    }
    let tb = time.time(nb);
    if b > tb {
        acc += (b - tb) * 0.5 * (prev + lerp(b));
    }
    acc
}

/// `∫_{Q_τ} g`: spatial trapezoid over columns `[τ, S(x)]`.
pub fn integrate_q(grid: &SpatialGrid, masks: &RegionMasks, time: &TimeGrid, g: impl Fn(usize, usize) -> f64) -> RegionIntegral {
    if masks.is_empty() {
        return RegionIntegral { value: 0.0, empty: true };
    }
    let tau = masks.tau();
    let value = grid
        .nodal_weights()
        .iter()
        .enumerate()
        .map(|(node, w)| w * column_integral(time, tau, masks.top(node), |l| g(node, l)))
        .sum();
    RegionIntegral { value, empty: false }
}

/// `∫_{Σ_τ} g dσ`; `g` receives the face sample and the level.
pub fn integrate_sigma(
    grid: &SpatialGrid,
    masks: &RegionMasks,
    time: &TimeGrid,
    g: impl Fn(&BoundarySample, usize) -> f64,
) -> RegionIntegral {
    if masks.is_empty() {
        return RegionIntegral { value: 0.0, empty: true };
    }
    let tau = masks.tau();
    let value = grid
        .boundary_samples()
        .iter()
        .map(|s| s.weight * column_integral(time, tau, masks.top(s.node), |l| g(s, l)))
        .sum();
    RegionIntegral { value, empty: false }
}

/// `∫ g dx` over `{S ≥ τ}` with a per-cell integrand, weighted by cell fractions.
pub fn integrate_cells(grid: &SpatialGrid, masks: &RegionMasks, g: impl Fn(usize) -> f64) -> RegionIntegral {
    if masks.is_empty() {
        return RegionIntegral { value: 0.0, empty: true };
    }
    let vol = grid.cell_volume();
    let value = (0..grid.cell_count())
        .map(|c| {
            let frac = masks.cell_fraction(c);
            if frac == 0.0 {
                0.0
            } else {
                vol * frac * g(c)
            }
        })
        .sum();
    RegionIntegral { value, empty: false }
}

/// Mean of nodal values over a cell's corners.
pub fn cell_mean(grid: &SpatialGrid, cell: usize, nodal: &[f64]) -> f64 {
    let (c, k) = grid.cell_corners(cell);
    c[..k].iter().map(|&n| nodal[n]).sum::<f64>() / k as f64
}

/// Something that can be sampled at stored levels and at arbitrary times.
pub trait Sampler {
    fn at_level(&self, node: usize, level: usize) -> C;
    fn at_time(&self, node: usize, t: f64) -> Result<C>;
}

impl Sampler for SpaceTimeField {
    fn at_level(&self, node: usize, level: usize) -> C {
        self.at(level, node)
    }

    fn at_time(&self, node: usize, t: f64) -> Result<C> {
        Ok(self.interp_time(node, t)?.0)
    }
}

/// Boundary data; interior nodes sample as zero.
impl Sampler for BoundaryField {
    fn at_level(&self, node: usize, level: usize) -> C {
        self.at_node(level, node).unwrap_or_default()
    }

    fn at_time(&self, node: usize, t: f64) -> Result<C> {
        match self.slot(node) {
            Some(b) => Ok(super::interp_quadratic(self.time(), |l| self.at(l, b), t)?.0),
            None => Ok(C::default()),
        }
    }
}

/// A constant field.
pub struct Constant(pub C);

impl Sampler for Constant {
    fn at_level(&self, _: usize, _: usize) -> C {
        self.0
    }

    fn at_time(&self, _: usize, _: f64) -> Result<C> {
        Ok(self.0)
    }
}

/// `‖g‖²_{L²(region)}`.
pub fn l2_region(grid: &SpatialGrid, masks: &RegionMasks, time: &TimeGrid, region: Region, g: &dyn Sampler) -> Result<RegionIntegral> {
    Ok(match region {
        Region::Q => integrate_q(grid, masks, time, |n, l| g.at_level(n, l).norm_sqr()),
        Region::Sigma => integrate_sigma(grid, masks, time, |s, l| g.at_level(s.node, l).norm_sqr()),
        Region::H | Region::Gamma => {
            if masks.is_empty() {
                return Ok(RegionIntegral { value: 0.0, empty: true });
            }
            let nodal = (0..grid.node_count())
                .map(|n| {
                    let t = if region == Region::H { masks.tau() } else { masks.top(n) };
                    g.at_time(n, t).map(|v| v.norm_sqr())
                })
                .collect::<Result<Vec<_>>>()?;
            integrate_cells(grid, masks, |c| cell_mean(grid, c, &nodal))
        }
    })
}
