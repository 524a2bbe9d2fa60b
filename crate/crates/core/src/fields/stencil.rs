//! Second-order finite-difference stencils on one time level.

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::SpatialGrid;
use crate::linalg::C;

/// `[a₊(u₊ − u₀) − a₋(u₀ − u₋)]/h²`.
#[inline]
pub fn flux_difference(a_minus: f64, a_plus: f64, u_minus: C, u0: C, u_plus: C, h: f64) -> C {
    ((u_plus - u0) * a_plus - (u0 - u_minus) * a_minus) / (h * h)
}

/// First derivative along `axis`: central inside, one-sided second order at the ends.
pub fn d1(grid: &SpatialGrid, f: impl Fn(usize) -> C, node: usize, axis: usize) -> C {
    let h = grid.h(axis);
    match (grid.neighbor(node, axis, -1), grid.neighbor(node, axis, 1)) {
        (Some(m), Some(p)) => (f(p) - f(m)) / (2.0 * h),
        (None, Some(p)) => {
            let p2 = grid.neighbor(node, axis, 2).expect("grid has at least two cells");
            (f(node) * -3.0 + f(p) * 4.0 - f(p2)) / (2.0 * h)
        }
        (Some(m), None) => {
            let m2 = grid.neighbor(node, axis, -2).expect("grid has at least two cells");
            (f(node) * 3.0 - f(m) * 4.0 + f(m2)) / (2.0 * h)
        }
        (None, None) => unreachable!("axis has at least two cells"),
    }
}

/// Second derivative along `axis`; one-sided four-point stencil at the ends.
pub fn d2(grid: &SpatialGrid, f: impl Fn(usize) -> C, node: usize, axis: usize) -> Result<C> {
    let h2 = grid.h(axis).powi(2);
    let step = |k: isize| grid.neighbor(node, axis, k);
    Ok(match (step(-1), step(1)) {
        (Some(m), Some(p)) => (f(p) - f(node) * 2.0 + f(m)) / h2,
        (None, Some(p)) => {
            let (p2, p3) = (step(2), step(3));
            let (p2, p3) = p2.zip(p3).ok_or_else(|| Error::InvalidParameter("one-sided second derivative needs 3 cells".into()))?;
            (f(node) * 2.0 - f(p) * 5.0 + f(p2) * 4.0 - f(p3)) / h2
        }
        (Some(m), None) => {
            let (m2, m3) = step(-2).zip(step(-3)).ok_or_else(|| Error::InvalidParameter("one-sided second derivative needs 3 cells".into()))?;
            (f(node) * 2.0 - f(m) * 5.0 + f(m2) * 4.0 - f(m3)) / h2
        }
        (None, None) => unreachable!("axis has at least two cells"),
    })
}

/// Gradient of nodal data at any node.
pub fn grad(grid: &SpatialGrid, values: &[C], node: usize) -> Result<[C; 2]> {
    grid.check_node(node)?;
    let mut g = [C::new(0.0, 0.0); 2];
    for (axis, slot) in g.iter_mut().enumerate().take(grid.dim()) {
        *slot = d1(grid, |n| values[n], node, axis);
    }
    Ok(g)
}

/// Flux-form `∇·(A∇u)` at an interior node, face values as arithmetic means.
pub fn div_a_grad(grid: &SpatialGrid, a: &CoefficientField, values: &[C], node: usize) -> Result<C> {
    grid.check_node(node)?;
    if grid.is_boundary(node) {
        return Err(Error::NotInterior { node });
    }
    Ok(div_a_grad_interior(grid, a, values, node))
}

/// Unchecked interior kernel used by the time stepper.
#[inline]
pub fn div_a_grad_interior(grid: &SpatialGrid, a: &CoefficientField, values: &[C], node: usize) -> C {
    let dim = grid.dim();
    let mut acc = C::new(0.0, 0.0);
    for axis in 0..dim {
        let m = grid.neighbor(node, axis, -1).unwrap();
        let p = grid.neighbor(node, axis, 1).unwrap();
        let am = 0.5 * (a.at(m)[axis][axis] + a.at(node)[axis][axis]);
        let ap = 0.5 * (a.at(p)[axis][axis] + a.at(node)[axis][axis]);
        acc += flux_difference(am, ap, values[m], values[node], values[p], grid.h(axis));
    }
    if dim == 2 {
        let xm = grid.neighbor(node, 0, -1).unwrap();
        let xp = grid.neighbor(node, 0, 1).unwrap();
        let ym = grid.neighbor(node, 1, -1).unwrap();
        let yp = grid.neighbor(node, 1, 1).unwrap();
        let (axp, axm, ayp, aym) = (a.at(xp)[0][1], a.at(xm)[0][1], a.at(yp)[0][1], a.at(ym)[0][1]);
        if axp != 0.0 || axm != 0.0 || ayp != 0.0 || aym != 0.0 {
            let corner = |dx: isize, dy: isize| {
                let n = grid.neighbor(node, 0, dx).unwrap();
                values[grid.neighbor(n, 1, dy).unwrap()]
            };
            let s = 1.0 / (4.0 * grid.h(0) * grid.h(1));
            let t1 = (corner(1, 1) - corner(1, -1)) * axp - (corner(-1, 1) - corner(-1, -1)) * axm;
            let t2 = (corner(1, 1) - corner(-1, 1)) * ayp - (corner(1, -1) - corner(-1, -1)) * aym;
            acc += (t1 + t2) * s;
        }
    }
    acc
}

/// `∇·(A∇u)` at any node: flux form inside, non-conservative one-sided form
/// `Σ a_jk ∂_jk u + (∂_j a_jk) ∂_k u` on the boundary.
pub fn div_a_grad_any(grid: &SpatialGrid, a: &CoefficientField, values: &[C], node: usize) -> Result<C> {
    grid.check_node(node)?;
    if !grid.is_boundary(node) {
        return Ok(div_a_grad_interior(grid, a, values, node));
    }
    let dim = grid.dim();
    let coef = |j: usize, k: usize| move |n: usize| C::new(a.at(n)[j][k], 0.0);
    let mut acc = C::new(0.0, 0.0);
    for j in 0..dim {
        for k in 0..dim {
            let ajk = a.at(node)[j][k];
            let second = if j == k {
                d2(grid, |n| values[n], node, j)?
            } else {
                d1(grid, |n| d1(grid, |m| values[m], n, k), node, j)
            };
            let da = d1(grid, coef(j, k), node, j);
            let du = d1(grid, |n| values[n], node, k);
            acc += second * ajk + da * du;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientFamily;
    use crate::geometry::Domain;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> SpatialGrid {
        SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), n).unwrap()
    }

    fn sample(g: &SpatialGrid, f: impl Fn(f64, f64) -> f64) -> Vec<C> {
        (0..g.node_count()).map(|n| {
            let x = g.coord(n);
            C::new(f(x[0], x[1]), 0.0)
        }).collect()
    }

    #[test]
    fn linear_and_quadratic_exactness() {
        let g = grid1(8);
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let lin = sample(&g, |x, _| x);
        let quad = sample(&g, |x, _| x * x);
        for n in 1..8 {
            assert!((grad(&g, &lin, n).unwrap()[0].re - 1.0).abs() < 1e-13);
            assert!(div_a_grad(&g, &a, &lin, n).unwrap().norm() < 1e-11);
            assert!((div_a_grad(&g, &a, &quad, n).unwrap().re - 2.0).abs() < 1e-10);
        }
        for n in [0, 8] {
            assert!((grad(&g, &quad, n).unwrap()[0].re - 2.0 * g.coord(n)[0]).abs() < 1e-12);
            assert!((div_a_grad_any(&g, &a, &quad, n).unwrap().re - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_and_range_errors() {
        let g = grid1(8);
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let u = vec![C::new(0.0, 0.0); 9];
        assert!(matches!(div_a_grad(&g, &a, &u, 0), Err(Error::NotInterior { node: 0 })));
        assert!(matches!(grad(&g, &u, 9), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn sine_laplacian_converges_at_second_order() {
        let err = |n: usize| {
            let g = grid1(n);
            let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
            let u = sample(&g, |x, _| (PI * x).sin());
            (1..n)
                .map(|i| (div_a_grad(&g, &a, &u, i).unwrap().re + PI * PI * (PI * g.coord(i)[0]).sin()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        for (c, f) in [(e1, e2), (e2, e3)] {
            let order = (c / f).log2();
            assert!((1.9..=2.1).contains(&order), "order {order}");
        }
    }

    #[test]
    fn cross_terms_are_exact_on_bilinear_products() {
        let g = SpatialGrid::uniform(Domain::rectangle([0.0, 1.0], [0.0, 1.0], 1.0).unwrap(), 6).unwrap();
        let a = CoefficientField::from_family(&g, CoefficientFamily::Rotated { eigenvalues: [2.0, 1.0], angle: 0.4 }).unwrap();
        let m = *a.at(0);
        // ∇·(A∇(xy)) = 2 a_xy for constant A
        let u = sample(&g, |x, y| x * y);
        for n in 0..g.node_count() {
            let v = div_a_grad_any(&g, &a, &u, n).unwrap().re;
            assert!((v - 2.0 * m[0][1]).abs() < 1e-9, "node {n}: {v}");
        }
    }

    #[test]
    fn variable_coefficient_boundary_form_converges() {
        let fam = CoefficientFamily::SineModulated { base: 1.0, amplitude: 0.5, wavenumber: PI, axis: 0 };
        let err = |n: usize| {
            let g = grid1(n);
            let a = CoefficientField::from_family(&g, fam.clone()).unwrap();
            let u = sample(&g, |x, _| (PI * x + 0.3).sin());
            let exact = |x: f64| {
                let (aa, da) = (1.0 + 0.5 * (PI * x).sin(), 0.5 * PI * (PI * x).cos());
                da * PI * (PI * x + 0.3).cos() - aa * PI * PI * (PI * x + 0.3).sin()
            };
            [0, n].iter().map(|&i| (div_a_grad_any(&g, &a, &u, i).unwrap().re - exact(g.coord(i)[0])).abs()).fold(0.0, f64::max)
        };
        let order = (err(64) / err(128)).log2();
        assert!(order > 1.8, "order {order}");
    }
}
