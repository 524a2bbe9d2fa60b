use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Vec2, C};

/// Shape of the spatial domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Interval,
    Rectangle,
}

/// Spatial box together with the time horizon `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub bounds: Vec<[f64; 2]>,
    pub time_horizon: f64,
}

impl Domain {
    pub fn new(kind: DomainKind, bounds: Vec<[f64; 2]>, time_horizon: f64) -> Result<Self> {
        let d = Self { kind, bounds, time_horizon };
        d.validate()?;
        Ok(d)
    }

    pub fn interval(lo: f64, hi: f64, time_horizon: f64) -> Result<Self> {
        Self::new(DomainKind::Interval, vec![[lo, hi]], time_horizon)
    }

    pub fn rectangle(x: [f64; 2], y: [f64; 2], time_horizon: f64) -> Result<Self> {
        Self::new(DomainKind::Rectangle, vec![x, y], time_horizon)
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.dim();
        if self.bounds.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: self.bounds.len() });
        }
        for (axis, [lo, hi]) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDomain(format!("axis {axis}: empty interval [{lo}, {hi}]")));
            }
        }
        if !(self.time_horizon.is_finite() && self.time_horizon > 0.0) {
            return Err(Error::InvalidDomain(format!("time horizon {} must be positive", self.time_horizon)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::Interval => 1,
            DomainKind::Rectangle => 2,
        }
    }

    pub fn side_length(&self, axis: usize) -> f64 {
        self.bounds[axis][1] - self.bounds[axis][0]
    }
}

/// One Σ quadrature sample: a boundary node seen from one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub node: usize,
    /// Outward unit normal of the face.
    pub normal: Vec2,
    /// Trapezoid weight along the face (1 in 1D).
    pub weight: f64,
    /// Face index: `2·axis + (0 low | 1 high)`.
    pub face: usize,
}

/// Uniform tensor grid with `cells[a]` cells along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    domain: Domain,
    cells: [usize; 2],
    h: Vec2,
}

impl SpatialGrid {
    pub fn new(domain: Domain, cells: &[usize]) -> Result<Self> {
        domain.validate()?;
        let dim = domain.dim();
        if cells.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: cells.len() });
        }
        let mut c = [1usize; 2];
        let mut h = [1.0; 2];
        for a in 0..dim {
            if cells[a] < 2 {
                return Err(Error::InvalidParameter(format!("need at least 2 cells per axis, got {}", cells[a])));
            }
            c[a] = cells[a];
            h[a] = domain.side_length(a) / cells[a] as f64;
        }
        Ok(Self { domain, cells: c, h })
    }

    /// Same number of cells along every axis.
    pub fn uniform(domain: Domain, n: usize) -> Result<Self> {
        let dim = domain.dim();
        Self::new(domain, &vec![n; dim])
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn cells_per_axis(&self, axis: usize) -> usize {
        if axis < self.dim() {
            self.cells[axis]
        } else {
            0
        }
    }

    pub fn nodes_per_axis(&self, axis: usize) -> usize {
        if axis < self.dim() {
            self.cells[axis] + 1
        } else {
            1
        }
    }

    pub fn spacing(&self) -> Vec2 {
        self.h
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.h[a]).fold(f64::INFINITY, f64::min)
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis(0) * self.nodes_per_axis(1)
    }

    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        ix + self.nodes_per_axis(0) * iy
    }

    pub fn node_multi(&self, node: usize) -> [usize; 2] {
        let nx = self.nodes_per_axis(0);
        [node % nx, node / nx]
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, count: self.node_count() })
        }
    }

    fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        let [lo, hi] = self.domain.bounds[axis];
        if i == self.cells[axis] {
            hi
        } else {
            lo + i as f64 * self.h[axis]
        }
    }

    /// Node coordinates; the last node on each axis sits exactly on the upper bound.
    pub fn coord(&self, node: usize) -> Vec2 {
        let m = self.node_multi(node);
        let mut x = [0.0; 2];
        for a in 0..self.dim() {
            x[a] = self.axis_coord(a, m[a]);
        }
        x
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let m = self.node_multi(node);
        (0..self.dim()).any(|a| m[a] == 0 || m[a] == self.cells[a])
    }

    /// Neighbour `delta` steps along `axis`, if it exists.
    pub fn neighbor(&self, node: usize, axis: usize, delta: isize) -> Option<usize> {
        let mut m = self.node_multi(node);
        let i = m[axis] as isize + delta;
        if i < 0 || i > self.cells[axis] as isize {
            return None;
        }
        m[axis] = i as usize;
        Some(self.node_index(m[0], m[1]))
    }

    pub fn cell_count(&self) -> usize {
        (0..self.dim()).map(|a| self.cells[a]).product()
    }

    pub fn cell_multi(&self, cell: usize) -> [usize; 2] {
        let cx = self.cells[0];
        if self.dim() == 1 {
            [cell, 0]
        } else {
            [cell % cx, cell / cx]
        }
    }

    pub fn cell_index(&self, cx: usize, cy: usize) -> usize {
        if self.dim() == 1 {
            cx
        } else {
            cx + self.cells[0] * cy
        }
    }

    /// Corner nodes of a cell; only the first `2^dim` entries are meaningful.
    pub fn cell_corners(&self, cell: usize) -> ([usize; 4], usize) {
        let [cx, cy] = self.cell_multi(cell);
        if self.dim() == 1 {
            ([cx, cx + 1, 0, 0], 2)
        } else {
            (
                [
                    self.node_index(cx, cy),
                    self.node_index(cx + 1, cy),
                    self.node_index(cx, cy + 1),
                    self.node_index(cx + 1, cy + 1),
                ],
                4,
            )
        }
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.h[a]).product()
    }

    pub fn cell_center(&self, cell: usize) -> Vec2 {
        let m = self.cell_multi(cell);
        let mut x = [0.0; 2];
        for a in 0..self.dim() {
            x[a] = self.domain.bounds[a][0] + (m[a] as f64 + 0.5) * self.h[a];
        }
        x
    }

    /// Cell gradient of nodal data: difference in 1D, bilinear centre gradient in 2D.
    pub fn cell_gradient(&self, values: &[f64], cell: usize) -> Vec2 {
        let (c, _) = self.cell_corners(cell);
        if self.dim() == 1 {
            [(values[c[1]] - values[c[0]]) / self.h[0], 0.0]
        } else {
            [
                0.5 * ((values[c[1]] - values[c[0]]) + (values[c[3]] - values[c[2]])) / self.h[0],
                0.5 * ((values[c[2]] - values[c[0]]) + (values[c[3]] - values[c[1]])) / self.h[1],
            ]
        }
    }

    pub fn cell_gradient_c(&self, values: &[C], cell: usize) -> [C; 2] {
        let (c, _) = self.cell_corners(cell);
        let zero = C::new(0.0, 0.0);
        if self.dim() == 1 {
            [(values[c[1]] - values[c[0]]) / self.h[0], zero]
        } else {
            [
                ((values[c[1]] - values[c[0]]) + (values[c[3]] - values[c[2]])) * (0.5 / self.h[0]),
                ((values[c[2]] - values[c[0]]) + (values[c[3]] - values[c[1]])) * (0.5 / self.h[1]),
            ]
        }
    }

    /// Boundary nodes in ascending index order.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&n| self.is_boundary(n)).collect()
    }

    /// Face-by-face Σ quadrature samples; rectangle corners appear once per face.
    pub fn boundary_samples(&self) -> Vec<BoundarySample> {
        let dim = self.dim();
        let mut out = Vec::new();
        for axis in 0..dim {
            for side in 0..2 {
                let mut normal = [0.0; 2];
                normal[axis] = if side == 0 { -1.0 } else { 1.0 };
                let fixed = if side == 0 { 0 } else { self.cells[axis] };
                if dim == 1 {
                    out.push(BoundarySample { node: fixed, normal, weight: 1.0, face: 2 * axis + side });
                    continue;
                }
                let other = 1 - axis;
                let count = self.cells[other];
                for j in 0..=count {
                    let mut m = [0usize; 2];
                    m[axis] = fixed;
                    m[other] = j;
                    let w = if j == 0 || j == count { 0.5 } else { 1.0 } * self.h[other];
                    out.push(BoundarySample {
                        node: self.node_index(m[0], m[1]),
                        normal,
                        weight: w,
                        face: 2 * axis + side,
                    });
                }
            }
        }
        out
    }

    /// Trapezoid weights for volume integrals over Ω.
    pub fn nodal_weights(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|n| {
                let m = self.node_multi(n);
                (0..self.dim())
                    .map(|a| if m[a] == 0 || m[a] == self.cells[a] { 0.5 * self.h[a] } else { self.h[a] })
                    .product()
            })
            .collect()
    }
}

/// Uniform time levels `t_n = n·dt`, `n = 0..=steps`, with `t_steps = T` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || steps < 2 {
            return Err(Error::InvalidParameter(format!("time grid needs T > 0 and ≥ 2 steps (T = {horizon}, steps = {steps})")));
        }
        Ok(Self { horizon, steps, dt: horizon / steps as f64 })
    }

    /// Smallest step count whose step does not exceed `dt_max`.
    pub fn with_max_step(horizon: f64, dt_max: f64) -> Result<Self> {
        let steps = ((horizon / dt_max) * (1.0 - 1e-14)).ceil().max(2.0) as usize;
        Self::new(horizon, steps)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn levels(&self) -> usize {
        self.steps + 1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn time(&self, level: usize) -> f64 {
        if level == self.steps {
            self.horizon
        } else {
            level as f64 * self.dt
        }
    }
}
