//! Complex space-time grid functions, boundary data, initial data and
//! region quadrature.

pub mod quadrature;
pub mod stencil;

use std::io::Write;

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{SpatialGrid, TimeGrid};
use crate::linalg::{Vec2, C};

pub use quadrature::{column_integral, l2_region, Region, RegionIntegral};

/// Values over `(level, node)`, stored level-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: SpatialGrid,
    time: TimeGrid,
    values: Vec<C>,
}

impl SpaceTimeField {
    pub fn new(grid: SpatialGrid, time: TimeGrid, values: Vec<C>) -> Result<Self> {
        let want = grid.node_count() * time.levels();
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: values.len() });
        }
        Ok(Self { grid, time, values })
    }

    pub fn zeros(grid: SpatialGrid, time: TimeGrid) -> Self {
        let values = vec![C::new(0.0, 0.0); grid.node_count() * time.levels()];
        Self { grid, time, values }
    }

    /// Samples `f(x, t)` at every node and level.
    pub fn from_fn(grid: SpatialGrid, time: TimeGrid, f: impl Fn(&Vec2, f64) -> C) -> Self {
        let nodes = grid.node_count();
        let coords: Vec<Vec2> = (0..nodes).map(|n| grid.coord(n)).collect();
        let values = (0..time.levels())
            .flat_map(|l| {
                let t = time.time(l);
                coords.iter().map(move |x| (x, t))
            })
            .map(|(x, t)| f(x, t))
            .collect();
        Self { grid, time, values }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn dt(&self) -> f64 {
        self.time.dt()
    }

    pub fn levels(&self) -> usize {
        self.time.levels()
    }

    pub fn nodes(&self) -> usize {
        self.grid.node_count()
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [C] {
        &mut self.values
    }

    pub fn level(&self, level: usize) -> &[C] {
        let n = self.nodes();
        &self.values[level * n..(level + 1) * n]
    }

    pub fn level_mut(&mut self, level: usize) -> &mut [C] {
        let n = self.nodes();
        &mut self.values[level * n..(level + 1) * n]
    }

    pub fn at(&self, level: usize, node: usize) -> C {
        self.values[level * self.nodes() + node]
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level < self.levels() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange { level, count: self.levels() })
        }
    }

    pub fn grad(&self, level: usize, node: usize) -> Result<[C; 2]> {
        self.check_level(level)?;
        stencil::grad(&self.grid, self.level(level), node)
    }

    pub fn div_a_grad(&self, a: &CoefficientField, level: usize, node: usize) -> Result<C> {
        self.check_level(level)?;
        stencil::div_a_grad(&self.grid, a, self.level(level), node)
    }

    /// `∂_t u` at a stored level: central inside, one-sided at the ends.
    pub fn time_derivative(&self, level: usize, node: usize) -> C {
        let dt = self.dt();
        let last = self.levels() - 1;
        let u = |l: usize| self.at(l, node);
        if level == 0 {
            (u(0) * -3.0 + u(1) * 4.0 - u(2)) / (2.0 * dt)
        } else if level == last {
            (u(last) * 3.0 - u(last - 1) * 4.0 + u(last - 2)) / (2.0 * dt)
        } else {
            (u(level + 1) - u(level - 1)) / (2.0 * dt)
        }
    }

    /// Quadratic through the three nearest levels: `(u, u_t)` at time `t`.
    pub fn interp_time(&self, node: usize, t: f64) -> Result<(C, C)> {
        self.grid.check_node(node)?;
        interp_quadratic(&self.time, |l| self.at(l, node), t)
    }

    /// `α·self + β·other` on the same grids.
    pub fn combine(&self, alpha: C, other: &Self, beta: C) -> Result<Self> {
        if self.grid != other.grid || self.time != other.time {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Self { grid: self.grid.clone(), time: self.time, values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV rows `node,x[,y],level,t,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.grid.dim();
        let mut header = vec!["node", "x"];
        if dim == 2 {
            header.push("y");
        }
        header.extend(["level", "t", "re", "im"]);
        w.write_record(&header)?;
        for level in 0..self.levels() {
            let t = self.time.time(level);
            for node in 0..self.nodes() {
                let x = self.grid.coord(node);
                let v = self.at(level, node);
                let mut row = vec![node.to_string(), x[0].to_string()];
                if dim == 2 {
                    row.push(x[1].to_string());
                }
                row.extend([level.to_string(), t.to_string(), v.re.to_string(), v.im.to_string()]);
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: std::io::Read>(grid: SpatialGrid, time: TimeGrid, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let nodes = grid.node_count();
        let mut values = vec![C::new(0.0, 0.0); nodes * time.levels()];
        let mut seen = 0usize;
        let headers = r.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Config(format!("field CSV lacks column '{name}'")));
        let (cn, cl, cre, cim) = (col("node")?, col("level")?, col("re")?, col("im")?);
        for rec in r.records() {
            let rec = rec?;
            let parse_u = |i: usize| rec[i].parse::<usize>().map_err(|e| Error::Config(format!("bad integer '{}': {e}", &rec[i])));
            let parse_f = |i: usize| rec[i].parse::<f64>().map_err(|e| Error::Config(format!("bad number '{}': {e}", &rec[i])));
            let (node, level) = (parse_u(cn)?, parse_u(cl)?);
            if node >= nodes || level >= time.levels() {
                return Err(Error::Config(format!("field CSV entry ({node}, {level}) outside grid")));
            }
            values[level * nodes + node] = C::new(parse_f(cre)?, parse_f(cim)?);
            seen += 1;
        }
        if seen != values.len() {
            return Err(Error::DimensionMismatch { expected: values.len(), got: seen });
        }
        Self::new(grid, time, values)
    }
}

/// Quadratic interpolation of level samples `u(l)` at time `t`.
pub fn interp_quadratic(time: &TimeGrid, u: impl Fn(usize) -> C, t: f64) -> Result<(C, C)> {
    let dt = time.dt();
    let span = time.horizon();
    let slack = 1e-12 * dt;
    if !(t >= -slack && t <= span + slack) {
        return Err(Error::TimeOutOfSpan { t, span });
    }
    let last = time.levels() - 1;
    let nearest = ((t / dt).round().max(0.0) as usize).min(last);
    let c = nearest.clamp(1, last - 1);
    let s = (t - time.time(c)) / dt;
    let (um, u0, up) = (u(c - 1), u(c), u(c + 1));
    let first = (up - um) * 0.5;
    let second = up - u0 * 2.0 + um;
    let value = if (t - time.time(nearest)).abs() <= slack {
        u(nearest)
    } else {
        u0 + first * s + second * (0.5 * s * s)
    };
    Ok((value, (first + second * s) / dt))
}

/// Dirichlet data `f` on every boundary node and level.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    nodes: Vec<usize>,
    slot: Vec<Option<usize>>,
    time: TimeGrid,
    values: Vec<C>,
}

impl BoundaryField {
    pub fn from_fn(grid: &SpatialGrid, time: TimeGrid, f: impl Fn(usize, &Vec2, f64) -> C) -> Self {
        let nodes = grid.boundary_nodes();
        let mut slot = vec![None; grid.node_count()];
        for (b, &n) in nodes.iter().enumerate() {
            slot[n] = Some(b);
        }
        let coords: Vec<Vec2> = nodes.iter().map(|&n| grid.coord(n)).collect();
        let values = (0..time.levels())
            .flat_map(|l| {
                let t = time.time(l);
                nodes.iter().zip(&coords).map(move |(&n, x)| (n, x, t))
            })
            .map(|(n, x, t)| f(n, x, t))
            .collect();
        Self { nodes, slot, time, values }
    }

    pub fn zeros(grid: &SpatialGrid, time: TimeGrid) -> Self {
        Self::from_fn(grid, time, |_, _, _| C::new(0.0, 0.0))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn slot(&self, node: usize) -> Option<usize> {
        self.slot.get(node).copied().flatten()
    }

    pub fn at(&self, level: usize, slot: usize) -> C {
        self.values[level * self.nodes.len() + slot]
    }

    pub fn at_node(&self, level: usize, node: usize) -> Option<C> {
        self.slot(node).map(|b| self.at(level, b))
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    /// Replaces all values (same layout).
    pub fn with_values(&self, values: Vec<C>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), got: values.len() });
        }
        Ok(Self { values, ..self.clone() })
    }

    /// `∂_t f` at a level: central inside, one-sided at the ends.
    pub fn time_derivative(&self, level: usize, slot: usize) -> C {
        let dt = self.time.dt();
        let last = self.time.levels() - 1;
        let f = |l: usize| self.at(l, slot);
        if level == 0 {
            (f(0) * -3.0 + f(1) * 4.0 - f(2)) / (2.0 * dt)
        } else if level == last {
            (f(last) * 3.0 - f(last - 1) * 4.0 + f(last - 2)) / (2.0 * dt)
        } else {
            (f(level + 1) - f(level - 1)) / (2.0 * dt)
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Initial displacement and velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: Vec<C>,
    pub u1: Vec<C>,
}

impl InitialData {
    pub fn zeros(grid: &SpatialGrid) -> Self {
        let z = vec![C::new(0.0, 0.0); grid.node_count()];
        Self { u0: z.clone(), u1: z }
    }

    /// Order-zero compatibility `u0 = f(·, 0)` on boundary nodes, relative to the data scale.
    pub fn check_compatibility(&self, f: &BoundaryField, tol: f64) -> Result<()> {
        let scale = self.u0.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (b, &node) in f.nodes().iter().enumerate() {
            let mismatch = (self.u0[node] - f.at(0, b)).norm();
            if mismatch > tol * scale {
                return Err(Error::Incompatible { node, mismatch });
            }
        }
        Ok(())
    }
}
