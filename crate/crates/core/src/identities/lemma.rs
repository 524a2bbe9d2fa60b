//! Pointwise energy and multiplier identities.
//!
//! Stencil mode differences flux vectors built from sampled fields; it is exact
//! on quadratics with constant coefficients and otherwise `O(h² + dt²)`.
//! Jet mode expands every divergence by the product rule from exact derivatives
//! and is exact up to rounding.

use crate::coefficients::{CoefficientFamily, CoefficientField};
use crate::error::{Error, Result};
use crate::fields::{stencil, SpaceTimeField};
use crate::linalg::{mat2_apply_c, quad_form_c, Mat2, Vec2, C};
use crate::solver::ExactSolution;

use super::multiplier::{MultiplierField, VectorField};

fn require_inner(u: &SpaceTimeField, node: usize, level: usize) -> Result<()> {
    let grid = u.grid();
    grid.check_node(node)?;
    let m = grid.node_multi(node);
    for axis in 0..grid.dim() {
        if m[axis] < 2 || m[axis] + 2 >= grid.nodes_per_axis(axis) {
            return Err(Error::NotInterior { node });
        }
    }
    if level < 2 || level + 2 >= u.levels() {
        return Err(Error::LevelOutOfRange { level, count: u.levels() });
    }
    Ok(())
}

fn central_t(u: &SpaceTimeField, level: usize, node: usize) -> C {
    (u.at(level + 1, node) - u.at(level - 1, node)) / (2.0 * u.dt())
}

fn grad_at(u: &SpaceTimeField, level: usize, node: usize) -> [C; 2] {
    stencil::grad(u.grid(), u.level(level), node).expect("node checked")
}

fn wave_operator(u: &SpaceTimeField, a: &CoefficientField, level: usize, node: usize) -> C {
    let dt = u.dt();
    let utt = (u.at(level + 1, node) - u.at(level, node) * 2.0 + u.at(level - 1, node)) / (dt * dt);
    utt - stencil::div_a_grad_interior(u.grid(), a, u.level(level), node)
}

/// Divergence of a nodal vector flux `F(node)` plus `∂_t` of a scalar `Ft(level)`, by central differences.
fn space_time_divergence(
    u: &SpaceTimeField,
    node: usize,
    level: usize,
    flux_x: impl Fn(usize, usize) -> [C; 2],
    flux_t: impl Fn(usize, usize) -> C,
) -> C {
    let grid = u.grid();
    let mut div = (flux_t(level + 1, node) - flux_t(level - 1, node)) / (2.0 * u.dt());
    for axis in 0..grid.dim() {
        let p = grid.neighbor(node, axis, 1).expect("interior");
        let m = grid.neighbor(node, axis, -1).expect("interior");
        div += (flux_x(level, p)[axis] - flux_x(level, m)[axis]) / (2.0 * grid.h(axis));
    }
    div
}

/// `2Re{ū_t[u_tt − ∇·(A∇u)]} − Re div_{x,t}[−2ū_t A∇u, |u_t|² + |∇u|²_A]`.
pub fn residual_energy_identity(u: &SpaceTimeField, a: &CoefficientField, node: usize, level: usize) -> Result<C> {
    require_inner(u, node, level)?;
    let dim = u.grid().dim();
    let lhs = 2.0 * (central_t(u, level, node).conj() * wave_operator(u, a, level, node)).re;
    let rhs = space_time_divergence(
        u,
        node,
        level,
        |l, n| {
            let ag = mat2_apply_c(a.at(n), &grad_at(u, l, n), dim);
            let ut = central_t(u, l, n).conj() * -2.0;
            [ut * ag[0], ut * ag[1]]
        },
        |l, n| C::new(central_t(u, l, n).norm_sqr() + quad_form_c(a.at(n), &grad_at(u, l, n), dim), 0.0),
    );
    Ok(C::new(lhs - rhs.re, 0.0))
}

fn phi_dot(phi: &Vec2, g: &[C; 2], dim: usize) -> C {
    (0..dim).map(|k| g[k].conj() * phi[k]).sum()
}

/// Lower-order terms: `(∇·φ)(|u_t|² − |∇u|²_A) − (φ·∇A)(∇u,∇u) + 2(∂_jφ_k)Re(ū_k a_jl u_l)`.
fn multiplier_lower_order(phi: &Vec2, jac: &Mat2, grad_a: &[Mat2; 2], a: &Mat2, g: &[C; 2], ut: C, dim: usize) -> f64 {
    let div_phi: f64 = (0..dim).map(|k| jac[k][k]).sum();
    let mut phi_grad_a = [[0.0; 2]; 2];
    for j in 0..dim {
        for r in 0..dim {
            for c in 0..dim {
                phi_grad_a[r][c] += phi[j] * grad_a[j][r][c];
            }
        }
    }
    let ag = mat2_apply_c(a, g, dim);
    let mut cross = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            cross += jac[j][k] * (g[k].conj() * ag[j]).re;
        }
    }
    div_phi * (ut.norm_sqr() - quad_form_c(a, g, dim)) - quad_form_c(&phi_grad_a, g, dim) + 2.0 * cross
}

/// Residual of the multiplier identity, evaluated with stencils; `∇A` is analytic.
pub fn residual_multiplier_identity(
    u: &SpaceTimeField,
    a: &CoefficientField,
    phi: &MultiplierField,
    node: usize,
    level: usize,
) -> Result<C> {
    require_inner(u, node, level)?;
    let grid = u.grid();
    let dim = grid.dim();
    let x = grid.coord(node);
    let grad_a = [a.gradient_at(&x, 0)?, a.gradient_at(&x, 1)?];
    let g = grad_at(u, level, node);
    let ut = central_t(u, level, node);
    let lhs = 2.0 * (phi_dot(&phi.at(node), &g, dim) * wave_operator(u, a, level, node)).re;
    let div = space_time_divergence(
        u,
        node,
        level,
        |l, n| {
            let gn = grad_at(u, l, n);
            let p = phi.at(n);
            let q = quad_form_c(a.at(n), &gn, dim) - central_t(u, l, n).norm_sqr();
            let ag = mat2_apply_c(a.at(n), &gn, dim);
            let pg = phi_dot(&p, &gn, dim) * 2.0;
            [C::new(p[0] * q, 0.0) - pg * ag[0], C::new(p[1] * q, 0.0) - pg * ag[1]]
        },
        |l, n| phi_dot(&phi.at(n), &grad_at(u, l, n), dim) * central_t(u, l, n) * 2.0,
    );
    let rhs = div.re + multiplier_lower_order(&phi.at(node), &phi.jacobian(node), &grad_a, a.at(node), &g, ut, dim);
    Ok(C::new(lhs - rhs, 0.0))
}

/// First and second derivatives of `u` and `u_t` at a point.
struct Jet {
    ut: C,
    utt: C,
    g: [C; 2],
    /// `∂_j u_t`.
    gt: [C; 2],
    /// `∂_j ∂_k u`.
    h: [[C; 2]; 2],
}

impl Jet {
    fn new(u: &dyn ExactSolution, x: &Vec2, t: f64) -> Self {
        let dim = u.dim();
        let z = C::new(0.0, 0.0);
        let mut jet = Jet { ut: u.derivative(x, t, 1, &[]), utt: u.derivative(x, t, 2, &[]), g: [z; 2], gt: [z; 2], h: [[z; 2]; 2] };
        for j in 0..dim {
            jet.g[j] = u.derivative(x, t, 0, &[j]);
            jet.gt[j] = u.derivative(x, t, 1, &[j]);
            for k in 0..dim {
                jet.h[j][k] = u.derivative(x, t, 0, &[j, k]);
            }
        }
        jet
    }
}

fn family_grad(family: &CoefficientFamily, x: &Vec2, dim: usize) -> [Mat2; 2] {
    [family.gradient(x, dim, 0), family.gradient(x, dim, 1)]
}

/// `∇·(A∇u) = Σ_j (∂_j a_jk) u_k + a_jk u_jk`.
fn div_a_grad_jet(a: &Mat2, ga: &[Mat2; 2], jet: &Jet, dim: usize) -> C {
    let mut acc = C::new(0.0, 0.0);
    for j in 0..dim {
        for k in 0..dim {
            acc += jet.g[k] * ga[j][j][k] + jet.h[j][k] * a[j][k];
        }
    }
    acc
}

/// `∂_j |∇u|²_A = (∂_j A)(∇u,∇u) + 2Re Σ a_kl ū_kj u_l`.
fn d_anorm(a: &Mat2, ga: &[Mat2; 2], jet: &Jet, j: usize, dim: usize) -> f64 {
    let mut acc = quad_form_c(&ga[j], &jet.g, dim);
    for k in 0..dim {
        for l in 0..dim {
            acc += 2.0 * a[k][l] * (jet.h[k][j].conj() * jet.g[l]).re;
        }
    }
    acc
}

/// Energy identity residual from exact derivatives.
pub fn jet_energy_identity(u: &dyn ExactSolution, family: &CoefficientFamily, x: &Vec2, t: f64) -> f64 {
    let dim = u.dim();
    let jet = Jet::new(u, x, t);
    let a = family.value(x, dim);
    let ga = family_grad(family, x, dim);
    let lhs = 2.0 * (jet.ut.conj() * (jet.utt - div_a_grad_jet(&a, &ga, &jet, dim))).re;
    // ∂_j(−2ū_t (A∇u)_j) and ∂_t(|u_t|² + |∇u|²_A)
    let ag = mat2_apply_c(&a, &jet.g, dim);
    let mut div = C::new(0.0, 0.0);
    for j in 0..dim {
        div -= jet.gt[j].conj() * ag[j] * 2.0;
    }
    div -= jet.ut.conj() * div_a_grad_jet(&a, &ga, &jet, dim) * 2.0;
    let mut dt_anorm = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            dt_anorm += 2.0 * a[k][l] * (jet.gt[k].conj() * jet.g[l]).re;
        }
    }
    let rhs = div.re + 2.0 * (jet.ut.conj() * jet.utt).re + dt_anorm;
    lhs - rhs
}

/// Multiplier identity residual from exact derivatives of `u`, `A` and `φ`.
pub fn jet_multiplier_identity(
    u: &dyn ExactSolution,
    family: &CoefficientFamily,
    phi: &dyn VectorField,
    x: &Vec2,
    t: f64,
) -> f64 {
    let dim = u.dim();
    let jet = Jet::new(u, x, t);
    let a = family.value(x, dim);
    let ga = family_grad(family, x, dim);
    let p = phi.value(x);
    let jac = phi.jacobian(x);
    let pg = phi_dot(&p, &jet.g, dim);
    let lhs = 2.0 * (pg * (jet.utt - div_a_grad_jet(&a, &ga, &jet, dim))).re;

    let ag = mat2_apply_c(&a, &jet.g, dim);
    let q = quad_form_c(&a, &jet.g, dim) - jet.ut.norm_sqr();
    let mut div = 0.0;
    for j in 0..dim {
        // ∂_j [φ_j q]
        let dq = d_anorm(&a, &ga, &jet, j, dim) - 2.0 * (jet.gt[j].conj() * jet.ut).re;
        div += jac[j][j] * q + p[j] * dq;
        // ∂_j [(φ·∇ū)] (A∇u)_j
        let mut dpg = C::new(0.0, 0.0);
        for m in 0..dim {
            dpg += jet.g[m].conj() * jac[j][m] + jet.h[m][j].conj() * p[m];
        }
        div -= 2.0 * (dpg * ag[j]).re;
    }
    div -= 2.0 * (pg * div_a_grad_jet(&a, &ga, &jet, dim)).re;
    // ∂_t [2(φ·∇ū)u_t]
    div += 2.0 * (phi_dot(&p, &jet.gt, dim) * jet.ut + pg * jet.utt).re;
    let rhs = div + multiplier_lower_order(&p, &jac, &ga, &a, &jet.g, jet.ut, dim);
    lhs - rhs
}
