//! Pointwise linear algebra behind the conormal decomposition, and the
//! Grönwall coefficient minimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{mat2_identity, DenseMatrix, Mat2, Vec2, C};

/// `M = E⁻¹AE⁻ᵀ` with `E = (Aν, e₂, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub m: DenseMatrix,
    /// `|ν|²_A`.
    pub nu_a_sq: f64,
    /// `|ν|²_A·M₁₁`, which is 1 in exact arithmetic.
    pub product: f64,
}

const FRAME_TOL: f64 = 1e-10;

pub fn gradient_decomposition(a: &DenseMatrix, normal: &[f64], frame: &[Vec<f64>]) -> Result<Decomposition> {
    let n = a.size();
    if normal.len() != n || frame.len() + 1 != n || frame.iter().any(|e| e.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: normal.len() });
    }
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) != a.get(j, i) {
                return Err(Error::NotSymmetric { node: 0 });
            }
        }
    }
    let basis: Vec<&[f64]> = std::iter::once(normal).chain(frame.iter().map(Vec::as_slice)).collect();
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let d: f64 = u.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            if (d - if i == j { 1.0 } else { 0.0 }).abs() > FRAME_TOL {
                return Err(Error::InvalidParameter("normal and frame must be orthonormal".into()));
            }
        }
    }
    let a_nu = a.mul_vec(normal);
    let nu_a_sq: f64 = a_nu.iter().zip(normal).map(|(x, y)| x * y).sum();
    if nu_a_sq <= 0.0 {
        return Err(Error::NotPositiveDefinite { node: 0, eigenvalue: nu_a_sq });
    }
    let mut cols = vec![a_nu];
    cols.extend(frame.iter().cloned());
    let e = DenseMatrix::from_columns(&cols)?;
    let e_inv = e.inverse().ok_or_else(|| Error::InvalidParameter("frame matrix is singular".into()))?;
    let m = e_inv.mul(a).mul(&e_inv.transpose());
    let product = nu_a_sq * m.get(0, 0);
    Ok(Decomposition { m, nu_a_sq, product })
}

impl Decomposition {
    /// `|∇u|²_A − [M₁₁|u_{ν,A}|² + 2Re{ū_{ν,A} Σ M₁ⱼ eⱼ·∇u} + Σ M_kl (e_k·∇ū)(e_l·∇u)]`.
    pub fn expansion_residual(&self, a: &DenseMatrix, normal: &[f64], frame: &[Vec<f64>], grad: &[C]) -> f64 {
        let n = a.size();
        let apply = |v: &[f64]| -> C { v.iter().zip(grad).map(|(x, g)| g * x).sum() };
        let a_nu = a.mul_vec(normal);
        let mut coords = vec![apply(&a_nu)];
        coords.extend(frame.iter().map(|e| apply(e)));
        let mut expanded = 0.0;
        for k in 0..n {
            for l in 0..n {
                expanded += self.m.get(k, l) * (coords[k].conj() * coords[l]).re;
            }
        }
        let mut direct = 0.0;
        for i in 0..n {
            for j in 0..n {
                direct += a.get(i, j) * (grad[i].conj() * grad[j]).re;
            }
        }
        direct - expanded
    }
}

/// `max_x ||∇u|² − |u_ν|² − ½Σ_{i≠j}|X_ij u|²|` over `points` equispaced points of the
/// unit circle, `X_ij = x_i∂_j − x_j∂_i`. Only `A = I` is admitted.
pub fn sphere_decomposition_check(a: &Mat2, grad: impl Fn(&Vec2) -> [C; 2], points: usize) -> Result<f64> {
    if *a != mat2_identity() {
        return Err(Error::InvalidParameter("the circle decomposition requires A = I".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / points as f64;
        let x = [theta.cos(), theta.sin()];
        let g = grad(&x);
        let lhs = g[0].norm_sqr() + g[1].norm_sqr();
        let un = g[0] * x[0] + g[1] * x[1];
        let x12 = g[1] * x[0] - g[0] * x[1];
        // X_12 and X_21 contribute equally
        let rhs = un.norm_sqr() + 0.5 * 2.0 * x12.norm_sqr();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Minimizer of `g(K) = 2(K/D)e^{D/K} − 1.5K/D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallMin {
    pub k_star: f64,
    pub value: f64,
    pub in_bracket: bool,
}

pub fn gronwall_coefficient(k: f64, d: f64) -> f64 {
    let r = k / d;
    2.0 * r * (1.0 / r).exp() - 1.5 * r
}

pub fn gronwall_coefficient_min(d: f64) -> Result<GronwallMin> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("D must be positive, got {d}")));
    }
    // golden section in log K
    let f = |s: f64| gronwall_coefficient(d * s.exp(), d);
    let (mut lo, mut hi) = ((0.05f64).ln(), (50.0f64).ln());
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let s = 0.5 * (lo + hi);
    let value = f(s);
    Ok(GronwallMin { k_star: d * s.exp(), value, in_bracket: value > 3.5 && value < 4.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_identity() {
        let a = DenseMatrix::identity(2);
        let d = gradient_decomposition(&a, &[0.6, 0.8], &[vec![-0.8, 0.6]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((d.m.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((d.product - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_hand_inversion() {
        let a = DenseMatrix::from_mat2(&[[4.0, 0.0], [0.0, 1.0]], 2);
        let d = gradient_decomposition(&a, &[1.0, 0.0], &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(d.nu_a_sq, 4.0);
        assert!((d.m.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((d.product - 1.0).abs() < 1e-15);
        let g = [C::new(1.0, 2.0), C::new(-0.5, 0.3)];
        assert!(d.expansion_residual(&a, &[1.0, 0.0], &[vec![0.0, 1.0]], &g).abs() < 1e-13);
    }

    #[test]
    fn non_orthonormal_frame_is_rejected() {
        let a = DenseMatrix::identity(2);
        assert!(gradient_decomposition(&a, &[1.0, 0.0], &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn circle_examples() {
        let eye = mat2_identity();
        let c = |v: f64| C::new(v, 0.0);
        assert!(sphere_decomposition_check(&eye, |_| [c(1.0), c(0.0)], 16).unwrap() < 1e-14);
        assert!(sphere_decomposition_check(&eye, |x| [c(x[1]), c(x[0])], 16).unwrap() < 1e-14);
        assert_eq!(sphere_decomposition_check(&eye, |_| [c(0.0), c(0.0)], 16).unwrap(), 0.0);
        assert!(sphere_decomposition_check(&[[2.0, 0.0], [0.0, 1.0]], |_| [c(0.0); 2], 4).is_err());
    }

    #[test]
    fn gronwall_minimum() {
        let one = gronwall_coefficient_min(1.0).unwrap();
        assert!(one.in_bracket);
        assert!((one.k_star - 1.7).abs() < 0.05);
        let ten = gronwall_coefficient_min(10.0).unwrap();
        assert!((one.value - ten.value).abs() < 1e-8);
        assert!(gronwall_coefficient(1e-3, 1.0) > 1e100);
        assert!(gronwall_coefficient(1e6, 1.0) > 1e5);
        assert!(gronwall_coefficient_min(0.0).is_err());
    }
}
