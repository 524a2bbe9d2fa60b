use crate::error::{Error, Result};

use super::{Hypersurface, SpatialGrid, TimeGrid};

const SUBSAMPLES: usize = 16;

/// Level range `lo..=hi` of a boundary column inside `Σ_τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaColumn {
    pub node: usize,
    pub top: f64,
    pub levels: Option<(usize, usize)>,
}

/// Grid selections for `Q_τ`, `H_τ`, `Σ_τ` and `Γ_{S,τ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMasks {
    tau: f64,
    t1: f64,
    t2: f64,
    dt: f64,
    levels: usize,
    nodes: usize,
    surface: Vec<f64>,
    q_mask: Vec<bool>,
    h_mask: Vec<bool>,
    sigma: Vec<SigmaColumn>,
    gamma_nodes: Vec<bool>,
    cell_fraction: Vec<f64>,
    empty: bool,
}

impl RegionMasks {
    pub fn new(s: &Hypersurface, tau: f64, grid: &SpatialGrid, time: &TimeGrid) -> Result<Self> {
        let horizon = time.horizon();
        if !(0.0..=horizon).contains(&tau) {
            return Err(Error::InvalidParameter(format!("τ = {tau} outside [0, {horizon}]")));
        }
        if s.nodal().len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        let (t1, t2) = (s.t1(), s.t2());
        let nodes = grid.node_count();
        let levels = time.levels();
        let dt = time.dt();
        let empty = tau > t2;
        let snap = 1e-9 * dt;
        let level_range = |top: f64| -> Option<(usize, usize)> {
            if empty || top < tau {
                return None;
            }
            let lo = ((tau - snap) / dt).ceil().max(0.0) as usize;
            let hi = (((top + snap) / dt).floor() as usize).min(levels - 1);
            (lo <= hi).then_some((lo, hi))
        };
        let mut q_mask = vec![false; levels * nodes];
        for node in 0..nodes {
            if let Some((lo, hi)) = level_range(s.value(node)) {
                for level in lo..=hi {
                    q_mask[level * nodes + node] = true;
                }
            }
        }
        let gamma_nodes: Vec<bool> = (0..nodes).map(|n| !empty && s.value(n) >= tau).collect();
        let sigma = grid
            .boundary_nodes()
            .into_iter()
            .map(|node| SigmaColumn { node, top: s.value(node), levels: level_range(s.value(node)) })
            .collect();
        let cell_fraction = (0..grid.cell_count())
            .map(|c| if empty { 0.0 } else { cell_fraction(grid, s.nodal(), c, tau) })
            .collect();
        Ok(Self {
            tau,
            t1,
            t2,
            dt,
            levels,
            nodes,
            surface: s.nodal().to_vec(),
            q_mask,
            h_mask: gamma_nodes.clone(),
            sigma,
            gamma_nodes,
            cell_fraction,
            empty,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Surface height over `node`.
    pub fn top(&self, node: usize) -> f64 {
        self.surface[node]
    }

    pub fn in_q(&self, node: usize, level: usize) -> bool {
        self.q_mask[level * self.nodes + node]
    }

    pub fn in_h(&self, node: usize) -> bool {
        self.h_mask[node]
    }

    pub fn in_gamma(&self, node: usize) -> bool {
        self.gamma_nodes[node]
    }

    pub fn sigma_columns(&self) -> &[SigmaColumn] {
        &self.sigma
    }

    /// Fraction of the cell where `S ≥ τ` (exact in 1D, sub-sampled in 2D).
    pub fn cell_fraction(&self, cell: usize) -> f64 {
        self.cell_fraction[cell]
    }
}

fn cell_fraction(grid: &SpatialGrid, nodal: &[f64], cell: usize, tau: f64) -> f64 {
    let (c, k) = grid.cell_corners(cell);
    let vals: Vec<f64> = c[..k].iter().map(|&n| nodal[n]).collect();
    if vals.iter().all(|&v| v >= tau) {
        return 1.0;
    }
    if vals.iter().all(|&v| v < tau) {
        return 0.0;
    }
    if k == 2 {
        let (a, b) = (vals[0], vals[1]);
        return if a >= tau { (a - tau) / (a - b) } else { (b - tau) / (b - a) };
    }
    let mut hits = 0usize;
    for i in 0..SUBSAMPLES {
        let u = (i as f64 + 0.5) / SUBSAMPLES as f64;
        for j in 0..SUBSAMPLES {
            let v = (j as f64 + 0.5) / SUBSAMPLES as f64;
            let s = (1.0 - u) * (1.0 - v) * vals[0] + u * (1.0 - v) * vals[1] + (1.0 - u) * v * vals[2] + u * v * vals[3];
            if s >= tau {
                hits += 1;
            }
        }
    }
    hits as f64 / (SUBSAMPLES * SUBSAMPLES) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, SurfaceSpec};

    fn setup(spec: SurfaceSpec, tau: f64) -> (SpatialGrid, RegionMasks) {
        let g = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), 10).unwrap();
        let t = TimeGrid::new(1.0, 10).unwrap();
        let s = spec.build(&g, 0.0).unwrap();
        let m = RegionMasks::new(&s, tau, &g, &t).unwrap();
        (g, m)
    }

    #[test]
    fn horizontal_box() {
        let (g, m) = setup(SurfaceSpec::constant(0.5), 0.0);
        assert_eq!((m.t1(), m.t2()), (0.5, 0.5));
        for n in 0..g.node_count() {
            for l in 0..=10 {
                assert_eq!(m.in_q(n, l), l <= 5);
            }
            assert!(m.in_gamma(n));
        }
    }

    #[test]
    fn affine_extremes() {
        let (_, m) = setup(SurfaceSpec::affine(0.3, &[0.4]), 0.0);
        assert!((m.t1() - 0.3).abs() < 1e-15 && (m.t2() - 0.7).abs() < 1e-15);
        assert_eq!(m.sigma_columns()[0].levels, Some((0, 3)));
        assert_eq!(m.sigma_columns()[1].levels, Some((0, 7)));
    }

    #[test]
    fn tau_at_maximum_keeps_only_argmax() {
        let (g, m) = setup(SurfaceSpec::affine(0.3, &[0.4]), 0.7);
        let kept: Vec<usize> = (0..g.node_count()).filter(|&n| m.in_gamma(n)).collect();
        assert_eq!(kept, vec![10]);
        assert_eq!(m.cell_fraction(9), 0.0);
        assert!(!m.is_empty());
    }

    #[test]
    fn tau_above_maximum_is_empty() {
        let (g, m) = setup(SurfaceSpec::constant(0.5), 0.6);
        assert!(m.is_empty());
        assert!((0..g.node_count()).all(|n| !m.in_gamma(n) && !m.in_h(n)));
    }

    #[test]
    fn one_d_fraction_is_exact() {
        let (_, m) = setup(SurfaceSpec::affine(0.0, &[1.0]), 0.25);
        assert!((m.cell_fraction(2) - 0.5).abs() < 1e-12);
        assert_eq!(m.cell_fraction(1), 0.0);
        assert_eq!(m.cell_fraction(3), 1.0);
    }
}
