//! Boundary vector fields `φ` with `φ = Aν_Σ` on `∂Ω`, extended inward by a ramp.

use serde::Serialize;

use crate::coefficients::{CoefficientFamily, CoefficientField};
use crate::error::{Error, Result};
use crate::geometry::SpatialGrid;
use crate::linalg::{mat2_apply, smoothstep, Mat2, Vec2, ZERO2};

/// A real vector field with a Jacobian, `jacobian(x)[j][k] = ∂_j φ_k`.
pub trait VectorField {
    fn value(&self, x: &Vec2) -> Vec2;
    fn jacobian(&self, x: &Vec2) -> Mat2;

    fn divergence(&self, x: &Vec2, dim: usize) -> f64 {
        let j = self.jacobian(x);
        (0..dim).map(|k| j[k][k]).sum()
    }
}

/// `φ(x) = Mx + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub matrix: Mat2,
    pub offset: Vec2,
}

impl VectorField for AffineField {
    fn value(&self, x: &Vec2) -> Vec2 {
        let m = mat2_apply(&self.matrix, x, 2);
        [m[0] + self.offset[0], m[1] + self.offset[1]]
    }

    fn jacobian(&self, _x: &Vec2) -> Mat2 {
        let m = self.matrix;
        [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Face {
    axis: usize,
    upper: bool,
    coord: f64,
}

impl Face {
    fn normal(&self) -> Vec2 {
        let mut n = [0.0; 2];
        n[self.axis] = if self.upper { 1.0 } else { -1.0 };
        n
    }

    /// Signed distance, positive inside.
    fn distance(&self, x: &Vec2) -> f64 {
        if self.upper {
            self.coord - x[self.axis]
        } else {
            x[self.axis] - self.coord
        }
    }
}

/// Analytic description of the extension: `φ(x) = Σ_f w(d_f) s_f (Aν_f)(p_f x)`,
/// `w(d) = smoothstep(1 − d/d₀)`, `s_f = Π_{g ⊥ f} d_g/(d_f + d_g)` blending at corners.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSpec {
    dim: usize,
    faces: Vec<Face>,
    d0: f64,
    family: CoefficientFamily,
    step: f64,
}

impl MultiplierSpec {
    pub fn new(grid: &SpatialGrid, family: CoefficientFamily) -> Self {
        let domain = grid.domain();
        let dim = grid.dim();
        let faces = (0..dim)
            .flat_map(|axis| {
                let [lo, hi] = domain.bounds[axis];
                [Face { axis, upper: false, coord: lo }, Face { axis, upper: true, coord: hi }]
            })
            .collect();
        let d0 = (0..dim).map(|a| domain.side_length(a)).fold(f64::INFINITY, f64::min) / 4.0;
        Self { dim, faces, d0, family, step: 1e-3 * grid.min_spacing() }
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    fn weight(&self, f: usize, x: &Vec2) -> f64 {
        let face = &self.faces[f];
        let df = face.distance(x);
        let mut w = smoothstep(1.0 - df / self.d0);
        if w == 0.0 {
            return 0.0;
        }
        for g in self.faces.iter().filter(|g| g.axis != face.axis) {
            let dg = g.distance(x);
            let sum = df + dg;
            w *= if sum.abs() < 1e-300 { 0.5 } else { dg / sum };
        }
        w
    }
}

impl VectorField for MultiplierSpec {
    fn value(&self, x: &Vec2) -> Vec2 {
        let mut out = [0.0; 2];
        for (f, face) in self.faces.iter().enumerate() {
            let w = self.weight(f, x);
            if w == 0.0 {
                continue;
            }
            let mut p = *x;
            p[face.axis] = face.coord;
            let an = mat2_apply(&self.family.value(&p, self.dim), &face.normal(), self.dim);
            for k in 0..self.dim {
                out[k] += w * an[k];
            }
        }
        out
    }

    /// Fourth-order central differences of the analytic extension.
    fn jacobian(&self, x: &Vec2) -> Mat2 {
        let mut jac = ZERO2;
        let h = self.step;
        for j in 0..self.dim {
            let at = |s: f64| {
                let mut y = *x;
                y[j] += s * h;
                self.value(&y)
            };
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            for k in 0..self.dim {
                jac[j][k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
            }
        }
        jac
    }
}

/// Nodal samples of an extended multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierField {
    values: Vec<Vec2>,
    jacobian: Vec<Mat2>,
    /// Rectangle corners, where `φ` cannot match both faces; the Jacobian is set to zero there.
    corners: Vec<usize>,
}

/// Diagnostics of the boundary condition and the sup bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierCheck {
    pub boundary_mismatch: f64,
    pub sup_interior: f64,
    pub sup_boundary: f64,
    pub holds: bool,
}

/// Extends `Aν_Σ` inward with a ramp supported within a quarter of the shortest side.
pub fn extend_multiplier(a: &CoefficientField, grid: &SpatialGrid) -> Result<MultiplierField> {
    let family = a.family().cloned().ok_or(Error::NoAnalyticGradient)?;
    let spec = MultiplierSpec::new(grid, family);
    let corners: Vec<usize> = (0..grid.node_count())
        .filter(|&n| {
            let m = grid.node_multi(n);
            grid.dim() == 2 && (0..2).all(|ax| m[ax] == 0 || m[ax] == grid.nodes_per_axis(ax) - 1)
        })
        .collect();
    Ok(MultiplierField::sample(grid, &spec, corners))
}

impl MultiplierField {
    /// Nodal samples of any vector field; `corners` get a zero Jacobian.
    pub fn sample(grid: &SpatialGrid, field: &dyn VectorField, corners: Vec<usize>) -> Self {
        let values = (0..grid.node_count()).map(|n| field.value(&grid.coord(n))).collect();
        let jacobian = (0..grid.node_count())
            .map(|n| if corners.contains(&n) { ZERO2 } else { field.jacobian(&grid.coord(n)) })
            .collect();
        Self { values, jacobian, corners }
    }

    pub fn at(&self, node: usize) -> Vec2 {
        self.values[node]
    }

    pub fn jacobian(&self, node: usize) -> Mat2 {
        self.jacobian[node]
    }

    pub fn divergence(&self, node: usize) -> f64 {
        let j = &self.jacobian[node];
        j[0][0] + j[1][1]
    }

    pub fn corners(&self) -> &[usize] {
        &self.corners
    }

    pub fn check(&self, a: &CoefficientField, grid: &SpatialGrid) -> MultiplierCheck {
        let dim = grid.dim();
        let norm = |v: &Vec2| (0..dim).map(|k| v[k] * v[k]).sum::<f64>().sqrt();
        let mut mismatch: f64 = 0.0;
        let mut sup_boundary: f64 = 0.0;
        for s in grid.boundary_samples() {
            let an = mat2_apply(a.at(s.node), &s.normal, dim);
            sup_boundary = sup_boundary.max(norm(&an));
            if !self.corners.contains(&s.node) {
                let phi = self.values[s.node];
                mismatch = mismatch.max(norm(&[phi[0] - an[0], phi[1] - an[1]]));
            }
        }
        let sup_interior = self.values.iter().map(norm).fold(0.0, f64::max);
        MultiplierCheck {
            boundary_mismatch: mismatch,
            sup_interior,
            sup_boundary,
            holds: mismatch <= 1e-12 * sup_boundary.max(1.0) && sup_interior <= 2.0 * sup_boundary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    #[test]
    fn one_dimensional_identity() {
        let g = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), 64).unwrap();
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let phi = extend_multiplier(&a, &g).unwrap();
        assert_eq!(phi.at(0)[0], -1.0);
        assert_eq!(phi.at(64)[0], 1.0);
        for n in 16..=48 {
            assert_eq!(phi.at(n)[0], 0.0);
        }
        assert!(phi.check(&a, &g).holds);
    }

    #[test]
    fn anisotropic_right_face() {
        let g = SpatialGrid::uniform(Domain::rectangle([0.0, 1.0], [0.0, 1.0], 1.0).unwrap(), 16).unwrap();
        let a = CoefficientField::from_family(&g, CoefficientFamily::Diagonal { values: vec![4.0, 1.0] }).unwrap();
        let phi = extend_multiplier(&a, &g).unwrap();
        for iy in 1..16 {
            assert_eq!(phi.at(g.node_index(16, iy)), [4.0, 0.0]);
        }
        let c = phi.check(&a, &g);
        assert!(c.holds, "{c:?}");
        assert_eq!(phi.corners().len(), 4);
    }

    #[test]
    fn identity_rectangle_sup_bound() {
        let g = SpatialGrid::uniform(Domain::rectangle([0.0, 2.0], [0.0, 1.0], 1.0).unwrap(), 24).unwrap();
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let c = extend_multiplier(&a, &g).unwrap().check(&a, &g);
        assert!(c.sup_interior <= 1.0 + 1e-12 && c.holds);
    }

    #[test]
    fn jacobian_matches_ramp_derivative() {
        let g = SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), 64).unwrap();
        let spec = MultiplierSpec::new(&g, CoefficientFamily::Identity);
        // φ(x) = −smoothstep(1 − 4x) near 0
        let x = 0.1;
        let eps = 1e-6;
        let fd = (-smoothstep(1.0 - 4.0 * (x + eps)) + smoothstep(1.0 - 4.0 * (x - eps))) / (2.0 * eps);
        assert!((spec.jacobian(&[x, 0.0])[0][0] - fd).abs() < 1e-6);
    }

    #[test]
    fn affine_jacobian_is_transpose() {
        let f = AffineField { matrix: [[1.0, 2.0], [3.0, 4.0]], offset: [0.0; 2] };
        let j = f.jacobian(&[0.0; 2]);
        // φ_0 = x + 2y, so ∂_1 φ_0 = 2
        assert_eq!(j[1][0], 2.0);
        assert_eq!(f.divergence(&[0.0; 2], 2), 5.0);
    }
}
