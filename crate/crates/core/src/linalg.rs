//! Small dense real linear algebra: 2×2 helpers and an n×n matrix with
//! Gauss-Jordan inversion.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C = Complex64;
pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const ZERO2: Mat2 = [[0.0; 2]; 2];

/// `C^∞` step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, `ψ(s)/(ψ(s)+ψ(1−s))` with `ψ(s) = e^{−1/s}` between.
pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

pub fn mat2_identity() -> Mat2 {
    [[1.0, 0.0], [0.0, 1.0]]
}

pub fn mat2_scale(a: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// `A x` restricted to the leading `dim` components.
pub fn mat2_apply(a: &Mat2, x: &Vec2, dim: usize) -> Vec2 {
    let mut out = [0.0; 2];
    for j in 0..dim {
        for k in 0..dim {
            out[j] += a[j][k] * x[k];
        }
    }
    out
}

pub fn mat2_apply_c(a: &Mat2, x: &[C; 2], dim: usize) -> [C; 2] {
    let mut out = [C::new(0.0, 0.0); 2];
    for j in 0..dim {
        for k in 0..dim {
            out[j] += x[k] * a[j][k];
        }
    }
    out
}

/// Real quadratic form `Re(ξ̄ᵀ A ξ)`.
pub fn quad_form_c(a: &Mat2, xi: &[C; 2], dim: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            acc += a[j][k] * (xi[j].conj() * xi[k]).re;
        }
    }
    acc
}

pub fn quad_form(a: &Mat2, xi: &Vec2, dim: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            acc += a[j][k] * xi[j] * xi[k];
        }
    }
    acc
}

pub fn dot(a: &Vec2, b: &Vec2, dim: usize) -> f64 {
    (0..dim).map(|k| a[k] * b[k]).sum()
}

/// Eigenvalues `(λ_min, λ_max)` of the leading `dim`×`dim` symmetric block.
pub fn sym_eigenvalues(a: &Mat2, dim: usize) -> (f64, f64) {
    if dim == 1 {
        return (a[0][0], a[0][0]);
    }
    let mean = 0.5 * (a[0][0] + a[1][1]);
    let half_diff = 0.5 * (a[0][0] - a[1][1]);
    let r = half_diff.hypot(a[0][1]);
    (mean - r, mean + r)
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            for (i, v) in c.iter().enumerate() {
                m.data[i * n + j] = *v;
            }
        }
        Ok(m)
    }

    pub fn from_mat2(a: &Mat2, dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = a[i][j];
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.data[i * self.n + j] * x[j]).sum())
            .collect()
    }

    /// Gauss-Jordan inversion with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))?;
            if a[pivot * n + col].abs() <= 1e-14 * scale {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv[r * n + j] -= f * inv[col * n + j];
                }
            }
        }
        Some(Self { n, data: inv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal() {
        assert_eq!(sym_eigenvalues(&[[4.0, 0.0], [0.0, 1.0]], 2), (1.0, 4.0));
        assert_eq!(sym_eigenvalues(&[[3.0, 0.0], [0.0, 0.0]], 1), (3.0, 3.0));
    }

    #[test]
    fn eigenvalues_of_rotated_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let (lo, hi) = sym_eigenvalues(&[[2.0, 1.0], [1.0, 2.0]], 2);
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let m = DenseMatrix::from_columns(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let p = m.mul(&m.inverse().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = DenseMatrix::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(m.inverse().is_none());
    }

    #[test]
    fn quad_form_matches_hand_values() {
        let a = [[4.0, 0.0], [0.0, 1.0]];
        assert_eq!(quad_form(&a, &[1.0, 1.0], 2), 5.0);
        let xi = [C::new(3.0, 0.0), C::new(0.0, 4.0)];
        assert_eq!(quad_form_c(&mat2_identity(), &xi, 2), 25.0);
    }
}
