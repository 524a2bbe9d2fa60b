//! Symmetric coefficient fields `A(x)`, the anisotropic norm and ellipticity bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpatialGrid;
use crate::linalg::{mat2_add, mat2_identity, mat2_scale, quad_form_c, sym_eigenvalues, Mat2, Vec2, C, ZERO2};

fn default_wavenumber() -> f64 {
    PI
}

/// Closed-form coefficient families; all are C∞ and carry an analytic gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CoefficientFamily {
    Identity,
    Scalar { value: f64 },
    Diagonal { values: Vec<f64> },
    /// `R(θ) diag(λ₁, λ₂) R(θ)ᵀ`.
    Rotated { eigenvalues: [f64; 2], angle: f64 },
    /// `(base + amplitude·sin(k·x_axis))·I`.
    SineModulated {
        base: f64,
        amplitude: f64,
        #[serde(default = "default_wavenumber")]
        wavenumber: f64,
        #[serde(default)]
        axis: usize,
    },
}

impl CoefficientFamily {
    pub fn value(&self, x: &Vec2, dim: usize) -> Mat2 {
        let eye = mat2_identity();
        let m = match self {
            Self::Identity => eye,
            Self::Scalar { value } => mat2_scale(&eye, *value),
            Self::Diagonal { values } => {
                let mut m = ZERO2;
                for a in 0..dim {
                    m[a][a] = values.get(a).copied().unwrap_or(1.0);
                }
                m
            }
            Self::Rotated { eigenvalues: [l1, l2], angle } => {
                let (s, c) = angle.sin_cos();
                [
                    [c * c * l1 + s * s * l2, c * s * (l1 - l2)],
                    [c * s * (l1 - l2), s * s * l1 + c * c * l2],
                ]
            }
            Self::SineModulated { base, amplitude, wavenumber, axis } => {
                mat2_scale(&eye, base + amplitude * (wavenumber * x[*axis]).sin())
            }
        };
        truncate(m, dim)
    }

    /// `∂A/∂x_j` at `x`.
    pub fn gradient(&self, x: &Vec2, dim: usize, j: usize) -> Mat2 {
        match self {
            Self::SineModulated { amplitude, wavenumber, axis, .. } if *axis == j => {
                truncate(mat2_scale(&mat2_identity(), amplitude * wavenumber * (wavenumber * x[*axis]).cos()), dim)
            }
            _ => ZERO2,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Self::Diagonal { values } if values.len() != dim => {
                Err(Error::DimensionMismatch { expected: dim, got: values.len() })
            }
            Self::SineModulated { axis, .. } if *axis >= dim => {
                Err(Error::InvalidParameter(format!("axis {axis} out of range for dimension {dim}")))
            }
            _ => Ok(()),
        }
    }
}

fn truncate(mut m: Mat2, dim: usize) -> Mat2 {
    if dim == 1 {
        m[0][1] = 0.0;
        m[1][0] = 0.0;
        m[1][1] = 0.0;
    }
    m
}

/// `0 < c1 ≤ |ξ|²_A / |ξ|² ≤ c2` over all nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityBounds {
    pub c1: f64,
    pub c2: f64,
}

/// Per-node symmetric positive definite matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    dim: usize,
    matrices: Vec<Mat2>,
    family: Option<CoefficientFamily>,
    bounds: EllipticityBounds,
}

impl CoefficientField {
    pub fn from_family(grid: &SpatialGrid, family: CoefficientFamily) -> Result<Self> {
        let dim = grid.dim();
        family.validate(dim)?;
        let matrices = (0..grid.node_count()).map(|n| family.value(&grid.coord(n), dim)).collect();
        Self::build(dim, matrices, Some(family))
    }

    /// Arbitrary per-node matrices; no analytic gradient is available.
    pub fn from_matrices(grid: &SpatialGrid, matrices: Vec<Mat2>) -> Result<Self> {
        if matrices.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: matrices.len() });
        }
        Self::build(grid.dim(), matrices, None)
    }

    fn build(dim: usize, matrices: Vec<Mat2>, family: Option<CoefficientFamily>) -> Result<Self> {
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0f64;
        for (node, m) in matrices.iter().enumerate() {
            if m[0][1] != m[1][0] {
                return Err(Error::NotSymmetric { node });
            }
            if m.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite coefficient at node {node}")));
            }
            let (lo, hi) = sym_eigenvalues(m, dim);
            if lo <= 0.0 {
                return Err(Error::NotPositiveDefinite { node, eigenvalue: lo });
            }
            c1 = c1.min(lo);
            c2 = c2.max(hi);
        }
        Ok(Self { dim, matrices, family, bounds: EllipticityBounds { c1, c2 } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn family(&self) -> Option<&CoefficientFamily> {
        self.family.as_ref()
    }

    pub fn at(&self, node: usize) -> &Mat2 {
        &self.matrices[node]
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }

    /// Arithmetic mean of two nodal matrices (face value).
    pub fn face(&self, a: usize, b: usize) -> Mat2 {
        mat2_scale(&mat2_add(&self.matrices[a], &self.matrices[b]), 0.5)
    }

    /// Arithmetic mean over the cell's corner nodes.
    pub fn cell_mean(&self, grid: &SpatialGrid, cell: usize) -> Mat2 {
        let (corners, k) = grid.cell_corners(cell);
        let sum = corners[..k].iter().fold(ZERO2, |acc, &n| mat2_add(&acc, &self.matrices[n]));
        mat2_scale(&sum, 1.0 / k as f64)
    }

    /// `Re(ξ̄ᵀ A(x_node) ξ)`.
    pub fn a_norm_sq(&self, node: usize, xi: &[C]) -> Result<f64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: xi.len() });
        }
        let m = self.matrices.get(node).ok_or(Error::NodeOutOfRange { node, count: self.matrices.len() })?;
        let mut v = [C::new(0.0, 0.0); 2];
        v[..self.dim].copy_from_slice(xi);
        Ok(quad_form_c(m, &v, self.dim))
    }

    pub fn ellipticity_bounds(&self) -> EllipticityBounds {
        self.bounds
    }

    /// `λ·A`; scales bounds exactly.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let matrices = self.matrices.iter().map(|m| mat2_scale(m, factor)).collect();
        let family = match &self.family {
            Some(CoefficientFamily::Identity) => Some(CoefficientFamily::Scalar { value: factor }),
            Some(CoefficientFamily::Scalar { value }) => Some(CoefficientFamily::Scalar { value: value * factor }),
            _ => None,
        };
        Self::build(self.dim, matrices, family)
    }

    /// Analytic `A(x)` at an arbitrary point.
    pub fn value_at(&self, x: &Vec2) -> Result<Mat2> {
        self.family.as_ref().map(|f| f.value(x, self.dim)).ok_or(Error::NoAnalyticGradient)
    }

    /// Analytic `∂_j A(x)` at an arbitrary point.
    pub fn gradient_at(&self, x: &Vec2, j: usize) -> Result<Mat2> {
        self.family.as_ref().map(|f| f.gradient(x, self.dim, j)).ok_or(Error::NoAnalyticGradient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    fn grid1(n: usize) -> SpatialGrid {
        SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), n).unwrap()
    }

    fn grid2(n: usize) -> SpatialGrid {
        SpatialGrid::uniform(Domain::rectangle([0.0, 1.0], [0.0, 1.0], 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn norm_examples() {
        let a = CoefficientField::from_family(&grid2(4), CoefficientFamily::Identity).unwrap();
        assert_eq!(a.a_norm_sq(0, &[C::new(3.0, 0.0), C::new(4.0, 0.0)]).unwrap(), 25.0);
        assert_eq!(a.a_norm_sq(0, &[C::new(0.0, 0.0); 2]).unwrap(), 0.0);
        let d = CoefficientField::from_family(&grid2(4), CoefficientFamily::Diagonal { values: vec![4.0, 1.0] }).unwrap();
        assert_eq!(d.a_norm_sq(3, &[C::new(1.0, 0.0), C::new(1.0, 0.0)]).unwrap(), 5.0);
        assert!(matches!(d.a_norm_sq(3, &[C::new(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bounds_examples() {
        let a = CoefficientField::from_family(&grid2(3), CoefficientFamily::Identity).unwrap();
        assert_eq!(a.ellipticity_bounds(), EllipticityBounds { c1: 1.0, c2: 1.0 });
        let d = CoefficientField::from_family(&grid2(3), CoefficientFamily::Diagonal { values: vec![4.0, 1.0] }).unwrap();
        assert_eq!(d.ellipticity_bounds(), EllipticityBounds { c1: 1.0, c2: 4.0 });
    }

    #[test]
    fn sine_modulated_bounds_match_samples() {
        let g = grid1(64);
        let fam = CoefficientFamily::SineModulated { base: 1.0, amplitude: 0.5, wavenumber: PI, axis: 0 };
        let a = CoefficientField::from_family(&g, fam).unwrap();
        let b = a.ellipticity_bounds();
        assert_eq!(b.c1, 1.0);
        assert!((b.c2 - 1.5).abs() < 1e-15);
    }

    #[test]
    fn non_positive_matrix_names_node() {
        let g = grid1(4);
        let mut mats = vec![mat2_identity(); 5];
        mats[3] = [[-1.0, 0.0], [0.0, 0.0]];
        match CoefficientField::from_matrices(&g, mats) {
            Err(Error::NotPositiveDefinite { node, .. }) => assert_eq!(node, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rotated_family_is_symmetric_with_given_spectrum() {
        let fam = CoefficientFamily::Rotated { eigenvalues: [2.0, 0.5], angle: 0.7 };
        let m = fam.value(&[0.0, 0.0], 2);
        assert_eq!(m[0][1], m[1][0]);
        let (lo, hi) = sym_eigenvalues(&m, 2);
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_gradient_matches_central_difference() {
        let fam = CoefficientFamily::SineModulated { base: 1.0, amplitude: 0.5, wavenumber: PI, axis: 0 };
        let x = 0.37;
        let h = 1e-5;
        let fd = (fam.value(&[x + h, 0.0], 1)[0][0] - fam.value(&[x - h, 0.0], 1)[0][0]) / (2.0 * h);
        assert!((fam.gradient(&[x, 0.0], 1, 0)[0][0] - fd).abs() < 1e-9);
    }

    #[test]
    fn sampled_field_has_no_gradient() {
        let g = grid1(4);
        let a = CoefficientField::from_matrices(&g, vec![mat2_identity(); 5]).unwrap();
        assert!(matches!(a.gradient_at(&[0.5, 0.0], 0), Err(Error::NoAnalyticGradient)));
    }
}
