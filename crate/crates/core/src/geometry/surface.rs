use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::linalg::{quad_form, Vec2};

use super::SpatialGrid;

/// Relative tolerance separating lightlike cells from rounding noise.
pub const CLASSIFICATION_TOL: f64 = 1e-10;

/// Analytic or tabulated description of `t = S(x)`. `Tau` evaluates to the
/// foliation parameter, so one spec can describe a whole family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceSpec {
    Constant { value: f64 },
    Tau,
    /// `offset + slope·x`.
    Affine { offset: f64, slope: Vec<f64> },
    /// `offset + amplitude·sin(wavenumber·x_axis)`.
    Sine {
        offset: f64,
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        axis: usize,
    },
    Min { parts: Vec<SurfaceSpec> },
    Max { parts: Vec<SurfaceSpec> },
    Sum { parts: Vec<SurfaceSpec> },
    Product { parts: Vec<SurfaceSpec> },
    Scaled { factor: f64, base: Box<SurfaceSpec> },
    Nodal { values: Vec<f64> },
}

impl SurfaceSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn affine(offset: f64, slope: &[f64]) -> Self {
        Self::Affine { offset, slope: slope.to_vec() }
    }

    /// Value at node `node` with coordinates `x`.
    pub fn eval(&self, node: usize, x: &Vec2, tau: f64) -> Result<f64> {
        Ok(match self {
            Self::Constant { value } => *value,
            Self::Tau => tau,
            Self::Affine { offset, slope } => offset + slope.iter().zip(x).map(|(s, xi)| s * xi).sum::<f64>(),
            Self::Sine { offset, amplitude, wavenumber, axis } => {
                offset + amplitude * (wavenumber * x.get(*axis).copied().unwrap_or(0.0)).sin()
            }
            Self::Min { parts } => fold(parts, node, x, tau, f64::INFINITY, f64::min)?,
            Self::Max { parts } => fold(parts, node, x, tau, f64::NEG_INFINITY, f64::max)?,
            Self::Sum { parts } => fold(parts, node, x, tau, 0.0, |a, b| a + b)?,
            Self::Product { parts } => fold(parts, node, x, tau, 1.0, |a, b| a * b)?,
            Self::Scaled { factor, base } => factor * base.eval(node, x, tau)?,
            Self::Nodal { values } => *values
                .get(node)
                .ok_or(Error::Config(format!("nodal surface has {} values, node {node} requested", values.len())))?,
        })
    }

    /// Samples the spec on `grid` at foliation parameter `tau`.
    pub fn build(&self, grid: &SpatialGrid, tau: f64) -> Result<Hypersurface> {
        if let Self::Nodal { values } = self {
            if values.len() != grid.node_count() {
                return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
            }
        }
        if let Self::Affine { slope, .. } = self {
            if slope.len() != grid.dim() {
                return Err(Error::DimensionMismatch { expected: grid.dim(), got: slope.len() });
            }
        }
        let values = (0..grid.node_count())
            .map(|n| self.eval(n, &grid.coord(n), tau))
            .collect::<Result<Vec<_>>>()?;
        Hypersurface::from_nodal(grid, values)
    }
}

fn fold(parts: &[SurfaceSpec], node: usize, x: &Vec2, tau: f64, init: f64, op: fn(f64, f64) -> f64) -> Result<f64> {
    if parts.is_empty() {
        return Err(Error::Config("surface combinator needs at least one part".into()));
    }
    parts.iter().try_fold(init, |acc, p| Ok(op(acc, p.eval(node, x, tau)?)))
}

/// Interface between two face-adjacent cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interface {
    pub lower: usize,
    pub upper: usize,
    pub axis: usize,
}

/// Where a normal is queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfacePoint {
    Cell(usize),
    Interface { lower: usize, upper: usize },
}

/// Upward unit normal `(ν_x, ν_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceNormal {
    pub spatial: Vec2,
    pub time: f64,
}

/// Graph surface `t = S(x)` stored as nodal values and per-cell gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypersurface {
    dim: usize,
    nodal: Vec<f64>,
    gradients: Vec<Vec2>,
    kinks: Vec<Interface>,
}

impl Hypersurface {
    /// Validates `0 ≤ S ≤ T` at every node and detects kinks.
    pub fn from_nodal(grid: &SpatialGrid, nodal: Vec<f64>) -> Result<Self> {
        if nodal.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: nodal.len() });
        }
        let horizon = grid.domain().time_horizon;
        for (node, &value) in nodal.iter().enumerate() {
            if !(value.is_finite() && (0.0..=horizon).contains(&value)) {
                return Err(Error::SurfaceRange { node, value, horizon });
            }
        }
        let gradients: Vec<Vec2> = (0..grid.cell_count()).map(|c| grid.cell_gradient(&nodal, c)).collect();
        let kinks = detect_kinks(grid, &gradients);
        Ok(Self { dim: grid.dim(), nodal, gradients, kinks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    pub fn value(&self, node: usize) -> f64 {
        self.nodal[node]
    }

    pub fn gradient(&self, cell: usize) -> Vec2 {
        self.gradients[cell]
    }

    pub fn gradients(&self) -> &[Vec2] {
        &self.gradients
    }

    pub fn kinks(&self) -> &[Interface] {
        &self.kinks
    }

    pub fn t1(&self) -> f64 {
        self.nodal.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn t2(&self) -> f64 {
        self.nodal.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_horizontal(&self) -> bool {
        self.t1() == self.t2()
    }

    /// `(−∇S, 1)/√(1 + |∇S|²)`; interfaces use the mean of the adjacent cells.
    pub fn normal(&self, at: SurfacePoint) -> Result<SurfaceNormal> {
        let count = self.gradients.len();
        let g = match at {
            SurfacePoint::Cell(c) => *self.gradients.get(c).ok_or(Error::NodeOutOfRange { node: c, count })?,
            SurfacePoint::Interface { lower, upper } => {
                if lower >= count || upper >= count {
                    return Err(Error::NodeOutOfRange { node: lower.max(upper), count });
                }
                if self.kinks.iter().any(|k| (k.lower, k.upper) == (lower, upper) || (k.lower, k.upper) == (upper, lower)) {
                    return Err(Error::KinkNormal { lower, upper });
                }
                let (a, b) = (self.gradients[lower], self.gradients[upper]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            }
        };
        Ok(unit_normal(&g, self.dim))
    }

    /// Per-cell `|∇S|_A` using the cell-averaged coefficient.
    pub fn cell_slopes(&self, grid: &SpatialGrid, a: &CoefficientField) -> Vec<f64> {
        (0..grid.cell_count())
            .map(|c| quad_form(&a.cell_mean(grid, c), &self.gradients[c], self.dim).max(0.0).sqrt())
            .collect()
    }
}

pub fn unit_normal(grad: &Vec2, dim: usize) -> SurfaceNormal {
    let norm = (1.0 + (0..dim).map(|k| grad[k] * grad[k]).sum::<f64>()).sqrt();
    let mut spatial = [0.0; 2];
    for k in 0..dim {
        spatial[k] = -grad[k] / norm;
    }
    SurfaceNormal { spatial, time: 1.0 / norm }
}

fn detect_kinks(grid: &SpatialGrid, gradients: &[Vec2]) -> Vec<Interface> {
    let dim = grid.dim();
    let jump = |a: usize, b: usize| -> f64 {
        let (ga, gb) = (gradients[a], gradients[b]);
        (0..dim).map(|k| (ga[k] - gb[k]).powi(2)).sum::<f64>().sqrt()
    };
    let mut kinks = Vec::new();
    for axis in 0..dim {
        let count = grid.cells_per_axis(axis);
        let lines = if dim == 1 { 1 } else { grid.cells_per_axis(1 - axis) };
        for line in 0..lines {
            let cell_at = |i: usize| -> usize {
                let mut m = [0usize; 2];
                m[axis] = i;
                if dim == 2 {
                    m[1 - axis] = line;
                }
                grid.cell_index(m[0], m[1])
            };
            let jumps: Vec<f64> = (0..count - 1).map(|i| jump(cell_at(i), cell_at(i + 1))).collect();
            for (i, &j) in jumps.iter().enumerate() {
                let prev = if i > 0 { jumps[i - 1] } else { 0.0 };
                let next = jumps.get(i + 1).copied().unwrap_or(0.0);
                if j > 1e-9 && j > 4.0 * prev.max(next) {
                    kinks.push(Interface { lower: cell_at(i), upper: cell_at(i + 1), axis });
                }
            }
        }
    }
    kinks
}

/// Causal type of `Γ_S` with respect to `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalKind {
    Spacelike,
    Lightlike,
    Timelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub max_slope: f64,
}

impl CausalClass {
    pub fn is_timelike(&self) -> bool {
        self.kind == CausalKind::Timelike
    }

    pub fn require_non_timelike(&self) -> Result<()> {
        if self.is_timelike() {
            Err(Error::Timelike { max_slope: self.max_slope })
        } else {
            Ok(())
        }
    }
}

/// Spacelike iff `max |∇S|_A < 1 − tol`, lightlike iff within `tol` of 1,
/// timelike iff some cell exceeds `1 + tol`.
pub fn classify(s: &Hypersurface, a: &CoefficientField, grid: &SpatialGrid) -> CausalClass {
    let max_slope = s.cell_slopes(grid, a).into_iter().fold(0.0, f64::max);
    let kind = if max_slope > 1.0 + CLASSIFICATION_TOL {
        CausalKind::Timelike
    } else if max_slope >= 1.0 - CLASSIFICATION_TOL {
        CausalKind::Lightlike
    } else {
        CausalKind::Spacelike
    };
    CausalClass { kind, max_slope }
}

/// First monotonicity failure in a foliation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoliationViolation {
    pub tau_pair: (f64, f64),
    pub node: usize,
    pub lower_value: f64,
    pub upper_value: f64,
    pub violating_nodes: usize,
}

/// Checks `S_{τ₁} ≤ S_{τ₂}` nodewise for consecutive members sorted by τ.
pub fn validate_foliation(family: &[(f64, Hypersurface)]) -> std::result::Result<(), FoliationViolation> {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&i, &j| family[i].0.total_cmp(&family[j].0));
    for w in order.windows(2) {
        let (t1, s1) = (&family[w[0]].0, &family[w[0]].1);
        let (t2, s2) = (&family[w[1]].0, &family[w[1]].1);
        let bad: Vec<usize> = (0..s1.nodal.len()).filter(|&n| s1.nodal[n] > s2.nodal[n]).collect();
        if let Some(&node) = bad.first() {
            return Err(FoliationViolation {
                tau_pair: (*t1, *t2),
                node,
                lower_value: s1.nodal[node],
                upper_value: s2.nodal[node],
                violating_nodes: bad.len(),
            });
        }
    }
    Ok(())
}
