//! Explicit leapfrog integration of `u_tt − ∇·(A∇u) = G` with Dirichlet data,
//! the manufactured-solution catalog and the Lorentz-boost comparison.

pub mod lorentz;
pub mod manufactured;

use std::fmt::Debug;
use std::sync::Arc;

use rayon::prelude::*;

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::fields::{stencil, BoundaryField, InitialData, SpaceTimeField};
use crate::geometry::{SpatialGrid, TimeGrid};
use crate::linalg::{Vec2, C};

pub use manufactured::{manufactured, manufactured_with, ExactSolution, Params, CATALOG};

pub const DEFAULT_CFL_SAFETY: f64 = 0.9;

/// Relative tolerance for order-zero compatibility of initial and boundary data.
pub const COMPAT_TOL: f64 = 1e-12;

const PARALLEL_THRESHOLD: usize = 16_384;

/// Time derivatives `∂_t^k G(x, t)` of an analytic source.
pub trait SourceFunction: Send + Sync + Debug {
    fn time_derivative(&self, x: &Vec2, t: f64, k: usize) -> C;
}

/// Closure-backed analytic source.
pub struct FnSource<F>(pub F);

impl<F> Debug for FnSource<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FnSource")
    }
}

impl<F: Fn(&Vec2, f64, usize) -> C + Send + Sync> SourceFunction for FnSource<F> {
    fn time_derivative(&self, x: &Vec2, t: f64, k: usize) -> C {
        (self.0)(x, t, k)
    }
}

/// `dt ≤ safety / (√c₂ · √Σ h_k⁻²)`; reduces to `safety·h/√c₂` in 1D.
pub fn cfl_limit(grid: &SpatialGrid, a: &CoefficientField, safety: f64) -> f64 {
    let inv: f64 = (0..grid.dim()).map(|k| grid.h(k).powi(-2)).sum();
    safety / (a.ellipticity_bounds().c2.sqrt() * inv.sqrt())
}

/// Everything needed to integrate one initial/boundary value problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: SpatialGrid,
    pub time: TimeGrid,
    pub coefficients: CoefficientField,
    pub initial: InitialData,
    pub boundary: BoundaryField,
    /// Sampled `G` over `(level, node)`; `None` means `G ≡ 0`.
    pub source: Option<Vec<C>>,
    pub source_fn: Option<Arc<dyn SourceFunction>>,
    pub exact: Option<Arc<dyn ExactSolution>>,
    pub cfl_safety: f64,
}

impl Scenario {
    /// Zero data on the given grids.
    pub fn zero(grid: SpatialGrid, time: TimeGrid, a: CoefficientField) -> Self {
        Self {
            name: "zero".into(),
            initial: InitialData::zeros(&grid),
            boundary: BoundaryField::zeros(&grid, time),
            grid,
            time,
            coefficients: a,
            source: None,
            source_fn: None,
            exact: None,
            cfl_safety: DEFAULT_CFL_SAFETY,
        }
    }

    pub fn source_at(&self, level: usize, node: usize) -> C {
        self.source.as_ref().map_or(C::new(0.0, 0.0), |g| g[level * self.grid.node_count() + node])
    }

    pub fn has_zero_source(&self) -> bool {
        self.source.is_none()
    }

    pub fn has_zero_boundary(&self) -> bool {
        self.boundary.values().iter().all(|v| *v == C::new(0.0, 0.0))
    }

    /// `∂_t^k G(x_node, 0)`, analytic.
    pub fn source_time_derivative_at_zero(&self, node: usize, k: usize) -> Result<C> {
        match (&self.source_fn, &self.source) {
            (Some(f), _) => Ok(f.time_derivative(&self.grid.coord(node), 0.0, k)),
            (None, None) => Ok(C::new(0.0, 0.0)),
            (None, Some(_)) => Err(Error::NoAnalyticSource),
        }
    }

    pub fn dt_limit(&self) -> f64 {
        cfl_limit(&self.grid, &self.coefficients, self.cfl_safety)
    }

    /// Checks data shapes, order-zero compatibility and the CFL bound.
    pub fn validate(&self) -> Result<()> {
        let nodes = self.grid.node_count();
        for (what, len) in [("u0", self.initial.u0.len()), ("u1", self.initial.u1.len()), ("A", self.coefficients.len())] {
            if len != nodes {
                return Err(Error::Config(format!("{what} has {len} entries, grid has {nodes} nodes")));
            }
        }
        if let Some(g) = &self.source {
            if g.len() != nodes * self.time.levels() {
                return Err(Error::DimensionMismatch { expected: nodes * self.time.levels(), got: g.len() });
            }
        }
        if self.boundary.time() != &self.time {
            return Err(Error::GridMismatch);
        }
        self.initial.check_compatibility(&self.boundary, COMPAT_TOL)?;
        let limit = self.dt_limit();
        if self.time.dt() > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt: self.time.dt(), limit });
        }
        Ok(())
    }

    /// `α·s₁ + β·s₂` for scenarios sharing grid, time levels and `A`.
    pub fn combine(alpha: C, s1: &Self, beta: C, s2: &Self) -> Result<Self> {
        if s1.grid != s2.grid || s1.time != s2.time || s1.coefficients != s2.coefficients {
            return Err(Error::GridMismatch);
        }
        let lin = |a: &[C], b: &[C]| -> Vec<C> { a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect() };
        let source = match (&s1.source, &s2.source) {
            (None, None) => None,
            (a, b) => {
                let z = vec![C::new(0.0, 0.0); s1.grid.node_count() * s1.time.levels()];
                Some(lin(a.as_deref().unwrap_or(&z), b.as_deref().unwrap_or(&z)))
            }
        };
        Ok(Self {
            name: format!("combination({}, {})", s1.name, s2.name),
            grid: s1.grid.clone(),
            time: s1.time,
            coefficients: s1.coefficients.clone(),
            initial: InitialData { u0: lin(&s1.initial.u0, &s2.initial.u0), u1: lin(&s1.initial.u1, &s2.initial.u1) },
            boundary: s1.boundary.with_values(lin(s1.boundary.values(), s2.boundary.values()))?,
            source,
            source_fn: None,
            exact: None,
            cfl_safety: s1.cfl_safety,
        })
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: SpaceTimeField,
    pub dt: f64,
    pub steps: usize,
    /// Max-norm deviation from the exact solution, when one is known.
    pub max_error: Option<f64>,
}

/// Leapfrog with a Taylor first step; Dirichlet rows are overwritten at every level.
pub fn solve(s: &Scenario) -> Result<SolveResult> {
    s.validate()?;
    let grid = &s.grid;
    let a = &s.coefficients;
    let nodes = grid.node_count();
    let dt = s.time.dt();
    let dt2 = dt * dt;
    let boundary: Vec<Option<usize>> = (0..nodes).map(|n| s.boundary.slot(n)).collect();
    let mut u = SpaceTimeField::zeros(grid.clone(), s.time);

    {
        let l0 = u.level_mut(0);
        l0.copy_from_slice(&s.initial.u0);
        for (n, slot) in boundary.iter().enumerate() {
            if let Some(b) = slot {
                l0[n] = s.boundary.at(0, *b);
            }
        }
    }

    let parallel = nodes >= PARALLEL_THRESHOLD;
    for level in 0..s.time.steps() {
        let (done, rest) = u.values_split(level + 1);
        let cur = &done[level * nodes..(level + 1) * nodes];
        let prev = if level > 0 { Some(&done[(level - 1) * nodes..level * nodes]) } else { None };
        let next = &mut rest[..nodes];
        let update = |(n, out): (usize, &mut C)| {
            *out = match boundary[n] {
                Some(b) => s.boundary.at(level + 1, b),
                None => {
                    let acc = stencil::div_a_grad_interior(grid, a, cur, n) + s.source_at(level, n);
                    match prev {
                        Some(p) => cur[n] * 2.0 - p[n] + acc * dt2,
                        None => cur[n] + s.initial.u1[n] * dt + acc * (0.5 * dt2),
                    }
                }
            };
        };
        if parallel {
            next.par_iter_mut().enumerate().for_each(update);
        } else {
            next.iter_mut().enumerate().for_each(update);
        }
        if next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { level: level + 1 });
        }
    }

    let max_error = s.exact.as_ref().map(|exact| {
        (0..s.time.levels())
            .flat_map(|l| (0..nodes).map(move |n| (l, n)))
            .map(|(l, n)| (u.at(l, n) - exact.value(&grid.coord(n), s.time.time(l))).norm())
            .fold(0.0, f64::max)
    });
    Ok(SolveResult { u, dt, steps: s.time.steps(), max_error })
}

impl SpaceTimeField {
    /// Splits storage into levels `< level` and `≥ level`.
    pub(crate) fn values_split(&mut self, level: usize) -> (&[C], &mut [C]) {
        let n = self.nodes();
        let (a, b) = self.values_mut().split_at_mut(level * n);
        (a, b)
    }
}
