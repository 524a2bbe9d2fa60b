//! Randomized invariants across geometry, coefficients, fields, solver,
//! energy, identities and compatibility.

use hypersurface_energy::coefficients::{CoefficientField, CoefficientFamily};
use hypersurface_energy::compat::{compatibility_residual, mollify_high_order, scenario_hierarchy, support_is_exact};
use hypersurface_energy::config::{ScenarioConfig, Tolerances};
use hypersurface_energy::energy::bound_report;
use hypersurface_energy::experiments::{decomposition_suite, triangle_suite};
use hypersurface_energy::fields::quadrature::{l2_region, Constant, Region};
use hypersurface_energy::fields::SpaceTimeField;
use hypersurface_energy::geometry::{classify, CausalKind, Domain, RegionMasks, SpatialGrid, SurfaceSpec, TimeGrid};
use hypersurface_energy::identities::{gronwall_coefficient, gronwall_coefficient_min};
use hypersurface_energy::linalg::C;
use hypersurface_energy::solver::{solve, Scenario};
use proptest::prelude::*;

fn unit_square(n: usize, horizon: f64) -> SpatialGrid {
    SpatialGrid::uniform(Domain::rectangle([0.0, 1.0], [0.0, 1.0], horizon).unwrap(), n).unwrap()
}

fn unit_interval(n: usize, horizon: f64) -> SpatialGrid {
    SpatialGrid::uniform(Domain::interval(0.0, 1.0, horizon).unwrap(), n).unwrap()
}

fn rank(k: CausalKind) -> u8 {
    match k {
        CausalKind::Spacelike => 0,
        CausalKind::Lightlike => 1,
        CausalKind::Timelike => 2,
    }
}

fn complex() -> impl Strategy<Value = C> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C::new(re, im))
}

fn rotated() -> impl Strategy<Value = CoefficientFamily> {
    (0.1..5.0f64, 0.1..5.0f64, 0.0..std::f64::consts::PI)
        .prop_map(|(l1, l2, angle)| CoefficientFamily::Rotated { eigenvalues: [l1, l2], angle })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normals_are_unit(a in -0.9..0.9f64, b in -0.9..0.9f64, amp in 0.0..0.3f64) {
        let g = unit_square(8, 5.0);
        let spec = SurfaceSpec::Sum { parts: vec![
            SurfaceSpec::affine(2.5, &[a, b]),
            SurfaceSpec::Sine { offset: 0.0, amplitude: amp, wavenumber: 5.0, axis: 1 },
        ]};
        let s = spec.build(&g, 0.0).unwrap();
        for c in 0..g.cell_count() {
            let n = s.normal(hypersurface_energy::geometry::SurfacePoint::Cell(c)).unwrap();
            let len = n.spatial[0].powi(2) + n.spatial[1].powi(2) + n.time.powi(2);
            prop_assert!((len - 1.0).abs() < 1e-14);
            prop_assert!(n.time > 0.0);
        }
    }

    #[test]
    fn scaling_a_scales_slopes(fam in rotated(), a in -0.6..0.6f64, b in -0.6..0.6f64, lambda in 1.0..3.0f64) {
        let g = unit_square(6, 3.0);
        let s = SurfaceSpec::affine(1.5, &[a, b]).build(&g, 0.0).unwrap();
        let field = CoefficientField::from_family(&g, fam).unwrap();
        let big = field.scaled(lambda * lambda).unwrap();
        for (p, q) in s.cell_slopes(&g, &field).iter().zip(s.cell_slopes(&g, &big)) {
            prop_assert!((q - lambda * p).abs() <= 1e-13 * q.max(1.0));
        }
        prop_assert!(rank(classify(&s, &big, &g).kind) >= rank(classify(&s, &field, &g).kind));
    }

    #[test]
    fn q_regions_nest(t1 in 0.0..1.0f64, dt in 0.0..1.0f64, amp in 0.0..0.4f64, k in 1.0..8.0f64) {
        let g = unit_interval(24, 2.0);
        let time = TimeGrid::new(2.0, 40).unwrap();
        let s = SurfaceSpec::Sine { offset: 1.0, amplitude: amp, wavenumber: k, axis: 0 }.build(&g, 0.0).unwrap();
        let lo = RegionMasks::new(&s, t1, &g, &time).unwrap();
        let hi = RegionMasks::new(&s, (t1 + dt).min(2.0), &g, &time).unwrap();
        for n in 0..g.node_count() {
            for l in 0..time.levels() {
                prop_assert!(!hi.in_q(n, l) || lo.in_q(n, l));
            }
            prop_assert!(!hi.in_gamma(n) || lo.in_gamma(n));
        }
    }

    #[test]
    fn horizontal_gamma_mask(c in 0.0..2.0f64, tau in 0.0..2.0f64) {
        let g = unit_square(5, 2.0);
        let time = TimeGrid::new(2.0, 10).unwrap();
        let s = SurfaceSpec::constant(c).build(&g, 0.0).unwrap();
        let m = RegionMasks::new(&s, tau, &g, &time).unwrap();
        for n in 0..g.node_count() {
            prop_assert_eq!(m.in_gamma(n), tau <= c);
        }
    }

    #[test]
    fn a_norm_scales_quadratically(fam in rotated(), xi in prop::array::uniform2(complex()), lambda in 0.1..4.0f64) {
        let g = unit_square(3, 1.0);
        let a = CoefficientField::from_family(&g, fam).unwrap();
        let big = a.scaled(lambda * lambda).unwrap();
        let (p, q) = (a.a_norm_sq(4, &xi).unwrap(), big.a_norm_sq(4, &xi).unwrap());
        prop_assert!((q - lambda * lambda * p).abs() <= 4.0 * f64::EPSILON * q.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn a_seminorm_triangle(fam in rotated(), x in prop::array::uniform2(complex()), y in prop::array::uniform2(complex())) {
        let g = unit_square(2, 1.0);
        let a = CoefficientField::from_family(&g, fam).unwrap();
        let sum = [x[0] + y[0], x[1] + y[1]];
        let lhs = a.a_norm_sq(0, &sum).unwrap().sqrt();
        let rhs = a.a_norm_sq(0, &x).unwrap().sqrt() + a.a_norm_sq(0, &y).unwrap().sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-14));
    }

    #[test]
    fn ellipticity_sandwich(base in 1.0..3.0f64, amp in 0.0..0.9f64, node in 0usize..81, angle in 0.0..std::f64::consts::TAU) {
        let g = unit_square(8, 1.0);
        let a = CoefficientField::from_family(&g, CoefficientFamily::SineModulated { base, amplitude: amp, wavenumber: 3.0, axis: 0 }).unwrap();
        let bounds = a.ellipticity_bounds();
        let v = a.a_norm_sq(node, &[C::new(angle.cos(), 0.0), C::new(angle.sin(), 0.0)]).unwrap();
        prop_assert!(bounds.c1 * (1.0 - 1e-12) <= v && v <= bounds.c2 * (1.0 + 1e-12));
    }

    #[test]
    fn interp_time_reproduces_quadratics(c0 in complex(), c1 in complex(), c2 in complex(), t in 0.0..1.0f64) {
        let g = unit_interval(4, 1.0);
        let time = TimeGrid::new(1.0, 9).unwrap();
        let u = SpaceTimeField::from_fn(g, time, |x, s| c0 + c1 * s + c2 * s * s + x[0]);
        let (v, vt) = u.interp_time(2, t).unwrap();
        prop_assert!((v - (c0 + c1 * t + c2 * t * t + 0.5)).norm() < 1e-12);
        prop_assert!((vt - (c1 + 2.0 * c2 * t)).norm() < 1e-11);
    }

    #[test]
    fn quadrature_exact_for_constants(c in complex(), offset in 0.6..1.0f64, slope in -0.5..0.5f64, tau in 0.0..0.1f64) {
        let g = unit_interval(16, 2.0);
        let time = TimeGrid::new(2.0, 32).unwrap();
        let s = SurfaceSpec::affine(offset, &[slope]).build(&g, 0.0).unwrap();
        let m = RegionMasks::new(&s, tau, &g, &time).unwrap();
        let q = l2_region(&g, &m, &time, Region::Q, &Constant(c)).unwrap().value;
        let expected = c.norm_sqr() * (offset + slope / 2.0 - tau);
        prop_assert!((q - expected).abs() < 1e-12 * expected.max(1.0));
        let gamma = l2_region(&g, &m, &time, Region::Gamma, &Constant(c)).unwrap().value;
        prop_assert!((gamma - c.norm_sqr()).abs() < 1e-12 * c.norm_sqr().max(1.0));
    }

    #[test]
    fn gronwall_minimum_is_scale_free(d in 0.01..100.0f64) {
        let m = gronwall_coefficient_min(d).unwrap();
        prop_assert!(m.in_bracket);
        prop_assert!((m.value - 3.572546259759025).abs() < 1e-8);
        prop_assert!(gronwall_coefficient(m.k_star * 1.1, d) >= m.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_is_linear(ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64) {
        let s1 = ScenarioConfig::named("standing").build(Some(24)).unwrap();
        let s2 = ScenarioConfig::named("traveling").build(Some(24)).unwrap();
        let (alpha, beta) = (C::new(ar, ai), C::new(br, bi));
        let joint = solve(&Scenario::combine(alpha, &s1, beta, &s2).unwrap()).unwrap().u;
        let parts = solve(&s1).unwrap().u.combine(alpha, &solve(&s2).unwrap().u, beta).unwrap();
        let err = joint.combine(C::new(1.0, 0.0), &parts, C::new(-1.0, 0.0)).unwrap().max_abs();
        prop_assert!(err <= 1e-12 * parts.max_abs().max(1.0));
    }

    #[test]
    fn ut_is_controlled_on_spacelike_surfaces(offset in 0.1..0.2f64, slope in -0.8..0.8f64) {
        let sc = ScenarioConfig::named("variable-a").build(Some(32)).unwrap();
        let r = solve(&sc).unwrap();
        let s = SurfaceSpec::affine(offset + slope.abs(), &[-slope.abs()]).build(&sc.grid, 0.0).unwrap();
        let rep = bound_report(&sc, &r, &s).unwrap();
        if let Some(bound) = rep.ut_bound {
            prop_assert!(rep.ut_sq <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mollification_support_and_residuals(eps in 0.06..0.2f64, delta in -0.5..0.5f64) {
        let sc = ScenarioConfig::named("standing").build(Some(32)).unwrap();
        let hier = scenario_hierarchy(&sc, 3).unwrap();
        let f = sc.boundary.with_values(
            (0..sc.time.levels())
                .flat_map(|l| (0..sc.boundary.nodes().len()).map(move |s| (l, s)))
                .map(|(l, s)| sc.boundary.at(l, s) + delta * (2.0 * sc.time.time(l)).sin())
                .collect(),
        ).unwrap();
        let m = mollify_high_order(&f, &hier, eps).unwrap();
        prop_assert!(support_is_exact(&m, &f));
        for k in 0..=3 {
            prop_assert!(compatibility_residual(&m, &hier, k).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn randomized_suites_hold_for_any_seed(seed in any::<u64>()) {
        let tol = Tolerances::default();
        prop_assert!(decomposition_suite(seed, 20, 5, &tol).unwrap().passed());
        prop_assert!(triangle_suite(seed, 2, &tol).unwrap().passed());
    }
}
