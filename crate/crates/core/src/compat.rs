//! Compatibility hierarchy, the smooth cutoff and mollified boundary data.

use serde::Serialize;

use crate::coefficients::CoefficientField;
use crate::energy::boundary_h1_sq;
use crate::error::{Error, Result};
use crate::fields::{stencil, BoundaryField};
use crate::geometry::{Hypersurface, RegionMasks, SpatialGrid};
use crate::linalg::{smoothstep, C};
use crate::solver::Scenario;

/// `χ(t) = smoothstep(2 − |t|)`: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cutoff;

impl Cutoff {
    pub fn value(&self, t: f64) -> f64 {
        smoothstep(2.0 - t.abs())
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = 2.0 - t.abs();
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let psi = |s: f64| (-1.0 / s).exp();
        let (a, b) = (psi(s), psi(1.0 - s));
        let ds = (a / (s * s) * b + a * b / ((1.0 - s) * (1.0 - s))) / ((a + b) * (a + b));
        -t.signum() * ds
    }
}

/// Default hierarchy order `⌈n/2⌉ + 2`.
pub fn default_order(dim: usize) -> usize {
    dim.div_ceil(2) + 2
}

/// `u_0 = u0`, `u_1 = u1`, `u_k = ∂_t^{k−2}G(·,0) + ∇·(A∇u_{k−2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatHierarchy {
    pub terms: Vec<Vec<C>>,
}

impl CompatHierarchy {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, k: usize) -> &[C] {
        &self.terms[k]
    }
}

pub fn build_hierarchy(
    grid: &SpatialGrid,
    a: &CoefficientField,
    u0: &[C],
    u1: &[C],
    g_derivative: impl Fn(usize, usize) -> Result<C>,
    order: usize,
) -> Result<CompatHierarchy> {
    let nodes = grid.node_count();
    if u0.len() != nodes || u1.len() != nodes {
        return Err(Error::GridMismatch);
    }
    let mut terms = vec![u0.to_vec(), u1.to_vec()];
    for k in 2..=order.max(1) {
        let prev = &terms[k - 2];
        let next = (0..nodes)
            .map(|n| Ok(g_derivative(n, k - 2)? + stencil::div_a_grad_any(grid, a, prev, n)?))
            .collect::<Result<Vec<_>>>()?;
        terms.push(next);
    }
    terms.truncate(order + 1);
    Ok(CompatHierarchy { terms })
}

/// Hierarchy from a scenario's data and analytic source.
pub fn scenario_hierarchy(s: &Scenario, order: usize) -> Result<CompatHierarchy> {
    build_hierarchy(&s.grid, &s.coefficients, &s.initial.u0, &s.initial.u1, |n, k| s.source_time_derivative_at_zero(n, k), order)
}

/// Mollified boundary data with the Taylor coefficients it blends in near `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mollified {
    pub field: BoundaryField,
    pub eps: f64,
    /// `taylor[k][slot]`: the `t^k/k!` coefficient on boundary slot `slot`.
    pub taylor: Vec<Vec<C>>,
}

impl Mollified {
    /// `∂_t^k f_ε(x, 0)` from the closed form: `χ(t/ε) ≡ 1` on `[0, ε]`, so only
    /// the Taylor polynomial contributes.
    pub fn derivative_at_zero(&self, slot: usize, k: usize) -> C {
        self.taylor.get(k).map_or(C::new(0.0, 0.0), |c| c[slot])
    }
}

fn check_eps(f: &BoundaryField, eps: f64) -> Result<()> {
    let time = f.time();
    let inside = (0..time.levels()).filter(|&l| time.time(l) <= 2.0 * eps).count();
    if !(eps > 0.0) || 2.0 * eps >= time.horizon() || inside < 4 {
        return Err(Error::EpsilonOutOfRange { eps, inside });
    }
    Ok(())
}

fn taylor(coeffs: &[Vec<C>], slot: usize, t: f64) -> C {
    let mut acc = C::new(0.0, 0.0);
    let mut w = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            w *= t / k as f64;
        }
        acc += c[slot] * w;
    }
    acc
}

fn blend(f: &BoundaryField, eps: f64, coeffs: Vec<Vec<C>>) -> Result<Mollified> {
    check_eps(f, eps)?;
    let chi = Cutoff;
    let time = *f.time();
    let slots = f.nodes().len();
    let mut values = Vec::with_capacity(f.values().len());
    for level in 0..time.levels() {
        let w = chi.value(time.time(level) / eps);
        for slot in 0..slots {
            let base = f.at(level, slot);
            values.push(if w == 0.0 {
                base
            } else if w == 1.0 {
                taylor(&coeffs, slot, time.time(level))
            } else {
                base + (taylor(&coeffs, slot, time.time(level)) - base) * w
            });
        }
    }
    Ok(Mollified { field: f.with_values(values)?, eps, taylor: coeffs })
}

fn on_boundary(f: &BoundaryField, nodal: &[C]) -> Vec<C> {
    f.nodes().iter().map(|&n| nodal[n]).collect()
}

/// `f_ε = χ(t/ε) Σ_k t^k/k! u_k + (1 − χ(t/ε)) f`.
pub fn mollify_high_order(f: &BoundaryField, hier: &CompatHierarchy, eps: f64) -> Result<Mollified> {
    let coeffs = hier.terms.iter().map(|u| on_boundary(f, u)).collect();
    blend(f, eps, coeffs)
}

/// `f_ε = χ(t/ε) u0 + (1 − χ(t/ε)) f̃`.
pub fn mollify_first_order(f: &BoundaryField, u0: &[C], eps: f64) -> Result<Mollified> {
    blend(f, eps, vec![on_boundary(f, u0)])
}

/// `max_x |∂_t^k f_ε(x, 0) − u_k(x)|` over boundary nodes.
pub fn compatibility_residual(m: &Mollified, hier: &CompatHierarchy, k: usize) -> Result<f64> {
    if k > hier.order() {
        return Err(Error::OrderTooHigh { k, max: hier.order() });
    }
    Ok(m.field
        .nodes()
        .iter()
        .enumerate()
        .map(|(slot, &n)| (m.derivative_at_zero(slot, k) - hier.terms[k][n]).norm())
        .fold(0.0, f64::max))
}

/// `‖f − g‖_{H¹(Σ)}` over all of `∂Ω × (0, T)`.
pub fn h1_sigma_distance(grid: &SpatialGrid, f: &BoundaryField, g: &BoundaryField) -> Result<f64> {
    if f.nodes() != g.nodes() || f.time() != g.time() {
        return Err(Error::GridMismatch);
    }
    let diff = f.with_values(f.values().iter().zip(g.values()).map(|(a, b)| a - b).collect())?;
    let top = Hypersurface::from_nodal(grid, vec![f.time().horizon(); grid.node_count()])?;
    let masks = RegionMasks::new(&top, 0.0, grid, f.time())?;
    Ok(boundary_h1_sq(&diff, grid, &masks).sqrt())
}

/// True when `f_ε` and `f` agree bit for bit on every level with `t ≥ 2ε`.
pub fn support_is_exact(m: &Mollified, f: &BoundaryField) -> bool {
    let time = f.time();
    let slots = f.nodes().len();
    (0..time.levels())
        .filter(|&l| time.time(l) >= 2.0 * m.eps)
        .all(|l| (0..slots).all(|s| m.field.at(l, s).to_bits_pair() == f.at(l, s).to_bits_pair()))
}

trait BitsPair {
    fn to_bits_pair(&self) -> (u64, u64);
}

impl BitsPair for C {
    fn to_bits_pair(&self) -> (u64, u64) {
        (self.re.to_bits(), self.im.to_bits())
    }
}

/// One row of an ε-sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatRow {
    pub eps: f64,
    pub h1_distance: f64,
    /// Order-k compatibility residuals, `k = 0..=K`.
    pub residuals: Vec<f64>,
    pub support_exact: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientFamily;
    use crate::geometry::{Domain, TimeGrid};
    use std::f64::consts::PI;

    fn grid(n: usize) -> SpatialGrid {
        SpatialGrid::uniform(Domain::interval(0.0, 1.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn cutoff_plateau_and_support() {
        let chi = Cutoff;
        assert_eq!(chi.value(0.0), 1.0);
        assert_eq!(chi.value(-1.0), 1.0);
        assert_eq!(chi.value(2.0), 0.0);
        assert_eq!(chi.value(-3.0), 0.0);
        assert_eq!(chi.derivative(0.5), 0.0);
        for t in [1.2, 1.5, 1.8] {
            let fd = (chi.value(t + 1e-6) - chi.value(t - 1e-6)) / 2e-6;
            assert!((chi.derivative(t) - fd).abs() < 1e-6);
            assert!(chi.derivative(t) < 0.0 && chi.derivative(-t) > 0.0);
        }
    }

    #[test]
    fn zero_data_gives_zero_hierarchy() {
        let g = grid(16);
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let z = vec![C::new(0.0, 0.0); 17];
        let h = build_hierarchy(&g, &a, &z, &z, |_, _| Ok(C::new(0.0, 0.0)), 3).unwrap();
        assert_eq!(h.order(), 3);
        assert!(h.terms.iter().flatten().all(|v| *v == C::new(0.0, 0.0)));
    }

    #[test]
    fn sine_hierarchy_matches_laplacian() {
        let g = grid(128);
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let u0: Vec<C> = (0..129).map(|n| C::new((PI * g.coord(n)[0]).sin(), 0.0)).collect();
        let z = vec![C::new(0.0, 0.0); 129];
        let h = build_hierarchy(&g, &a, &u0, &z, |_, _| Ok(C::new(0.0, 0.0)), 3).unwrap();
        for n in 0..129 {
            assert!((h.term(2)[n].re + PI * PI * u0[n].re).abs() < 2e-3);
            assert_eq!(h.term(3)[n], C::new(0.0, 0.0));
        }
    }

    #[test]
    fn linear_source_enters_third_term() {
        let g = grid(16);
        let a = CoefficientField::from_family(&g, CoefficientFamily::Identity).unwrap();
        let u0: Vec<C> = (0..17).map(|n| C::new(g.coord(n)[0].powi(2), 0.0)).collect();
        let u1: Vec<C> = (0..17).map(|n| C::new(g.coord(n)[0], 0.0)).collect();
        // G = t·g(x) with g = 5: ∂_t G(·,0) = 5
        let h = build_hierarchy(&g, &a, &u0, &u1, |_, k| Ok(C::new(if k == 1 { 5.0 } else { 0.0 }, 0.0)), 3).unwrap();
        for n in 0..17 {
            assert!((h.term(2)[n].re - 2.0).abs() < 1e-10);
            assert!((h.term(3)[n].re - 5.0).abs() < 1e-10);
        }
    }

    fn boundary(g: &SpatialGrid, f: impl Fn(f64, f64) -> f64) -> BoundaryField {
        BoundaryField::from_fn(g, TimeGrid::new(1.0, 200).unwrap(), |_, x, t| C::new(f(x[0], t), 0.0))
    }

    #[test]
    fn taylor_data_is_left_unchanged() {
        let g = grid(16);
        let f = boundary(&g, |x, t| x + 2.0 * t);
        let hier = CompatHierarchy {
            terms: vec![
                (0..17).map(|n| C::new(g.coord(n)[0], 0.0)).collect(),
                vec![C::new(2.0, 0.0); 17],
            ],
        };
        let m = mollify_high_order(&f, &hier, 0.1).unwrap();
        for (a, b) in m.field.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-15);
        }
        assert!(support_is_exact(&m, &f));
        assert_eq!(compatibility_residual(&m, &hier, 1).unwrap(), 0.0);
        assert!(matches!(compatibility_residual(&m, &hier, 2), Err(Error::OrderTooHigh { .. })));
    }

    #[test]
    fn first_order_repairs_mismatch() {
        let g = grid(16);
        let delta = 0.3;
        let f = boundary(&g, |_, t| (3.0 * t).sin());
        let u0: Vec<C> = vec![C::new(delta, 0.0); 17];
        let m = mollify_first_order(&f, &u0, 0.1).unwrap();
        for slot in 0..2 {
            assert_eq!(m.field.at(0, slot), C::new(delta, 0.0));
        }
        let time = f.time();
        for l in 0..time.levels() {
            for slot in 0..2 {
                let d = (m.field.at(l, slot) - f.at(l, slot)).norm();
                assert!(d <= delta + 1e-15);
                if time.time(l) >= 0.2 {
                    assert_eq!(d, 0.0);
                }
            }
        }
    }

    #[test]
    fn perturbed_hierarchy_is_detected() {
        let g = grid(16);
        let f = boundary(&g, |_, _| 0.0);
        let z = vec![C::new(0.0, 0.0); 17];
        let hier = CompatHierarchy { terms: vec![z.clone(); 4] };
        let mut probe = hier.clone();
        probe.terms[2][0] += 1e-3;
        let m = mollify_high_order(&f, &probe, 0.1).unwrap();
        assert_eq!(compatibility_residual(&m, &hier, 2).unwrap(), 1e-3);
        assert_eq!(compatibility_residual(&m, &hier, 0).unwrap(), 0.0);
    }

    #[test]
    fn unresolved_eps_is_rejected() {
        let g = grid(16);
        let f = boundary(&g, |_, _| 0.0);
        let hier = CompatHierarchy { terms: vec![vec![C::new(0.0, 0.0); 17]] };
        assert!(matches!(mollify_high_order(&f, &hier, 0.001), Err(Error::EpsilonOutOfRange { .. })));
        assert!(mollify_high_order(&f, &hier, 0.6).is_err());
    }

    #[test]
    fn distance_shrinks_with_eps() {
        let g = grid(16);
        let f = boundary(&g, |_, t| 0.2 * (5.0 * t).sin());
        let hier = CompatHierarchy { terms: vec![vec![C::new(0.0, 0.0); 17]; 4] };
        let d: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| h1_sigma_distance(&g, &mollify_high_order(&f, &hier, e).unwrap().field, &f).unwrap())
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }
}
