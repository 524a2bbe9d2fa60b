//! Closed-form solutions, the manufactured source they induce, and the
//! scenario catalog.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Debug;
use std::sync::Arc;

use crate::coefficients::{CoefficientField, CoefficientFamily};
use crate::error::{Error, Result};
use crate::fields::{BoundaryField, InitialData};
use crate::geometry::{Domain, SpatialGrid, TimeGrid};
use crate::linalg::{Vec2, C};

use super::{cfl_limit, Scenario, SourceFunction, DEFAULT_CFL_SAFETY};

/// Analytic `u(x, t)` with mixed derivatives.
pub trait ExactSolution: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// `∂_t^k ∂_{axes[0]} ∂_{axes[1]} … u` at `(x, t)`.
    fn derivative(&self, x: &Vec2, t: f64, k: usize, axes: &[usize]) -> C;

    fn value(&self, x: &Vec2, t: f64) -> C {
        self.derivative(x, t, 0, &[])
    }
}

/// One-variable factor with closed-form derivatives of any order.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    One,
    /// `sin(k·s + phase)`.
    Sin { k: f64, phase: f64 },
    /// `e^{i k s}`.
    ExpI { k: f64 },
    /// `Σ c_j s^j`.
    Poly(Vec<f64>),
}

impl Factor {
    pub fn derivative(&self, s: f64, n: usize) -> C {
        match self {
            Self::One => C::new(if n == 0 { 1.0 } else { 0.0 }, 0.0),
            Self::Sin { k, phase } => C::new(k.powi(n as i32) * (k * s + phase + n as f64 * FRAC_PI_2).sin(), 0.0),
            Self::ExpI { k } => C::new(0.0, *k).powu(n as u32) * C::new(0.0, k * s).exp(),
            Self::Poly(c) => {
                let mut acc = 0.0;
                for (j, cj) in c.iter().enumerate().skip(n) {
                    let falling: f64 = ((j - n + 1)..=j).map(|v| v as f64).product();
                    acc += cj * falling * s.powi((j - n) as i32);
                }
                C::new(acc, 0.0)
            }
        }
    }
}

/// `coeff · X(x) · Y(y) · T(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C,
    pub space: [Factor; 2],
    pub time: Factor,
}

/// Finite sum of separable terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Separable {
    pub dim: usize,
    pub terms: Vec<Term>,
}

impl ExactSolution for Separable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivative(&self, x: &Vec2, t: f64, k: usize, axes: &[usize]) -> C {
        let mut counts = [0usize; 2];
        for &a in axes {
            counts[a] += 1;
        }
        self.terms
            .iter()
            .map(|term| {
                term.coeff
                    * term.space[0].derivative(x[0], counts[0])
                    * term.space[1].derivative(x[1], counts[1])
                    * term.time.derivative(t, k)
            })
            .sum()
    }
}

/// One-dimensional wave profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    /// `amplitude · exp(−((s − center)/width)²/2)`.
    Gaussian { center: f64, width: f64, amplitude: f64 },
    /// `amplitude · (1 − r²)^power` for `|r| < 1`, `r = (s − center)/radius`.
    Bump { center: f64, radius: f64, amplitude: f64, power: u32 },
}

impl Profile {
    pub fn derivative(&self, s: f64, n: usize) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Gaussian { center, width, amplitude } => {
                let z = (s - center) / width;
                // probabilists' Hermite: He_{n+1} = z He_n − n He_{n−1}
                let (mut h0, mut h1) = (1.0, z);
                let he = match n {
                    0 => 1.0,
                    _ => {
                        for m in 1..n {
                            let h2 = z * h1 - m as f64 * h0;
                            h0 = h1;
                            h1 = h2;
                        }
                        h1
                    }
                };
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                amplitude * sign * he * (-0.5 * z * z).exp() / width.powi(n as i32)
            }
            Self::Bump { center, radius, amplitude, power } => {
                let r = (s - center) / radius;
                if r.abs() >= 1.0 {
                    return 0.0;
                }
                // (1 − r²)^p = Σ_j C(p, j) (−1)^j r^{2j}
                let p = power as usize;
                let mut coeffs = vec![0.0; 2 * p + 1];
                let mut binom = 1.0;
                for j in 0..=p {
                    coeffs[2 * j] = if j % 2 == 0 { binom } else { -binom };
                    binom = binom * (p - j) as f64 / (j + 1) as f64;
                }
                amplitude * Factor::Poly(coeffs).derivative(r, n).re / radius.powi(n as i32)
            }
        }
    }

    /// Half-width outside which the profile vanishes identically.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Self::Zero => Some(0.0),
            Self::Bump { radius, .. } => Some(*radius),
            Self::Gaussian { .. } => None,
        }
    }
}

/// `F(x − t) + H(x + t)` in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DAlembert {
    pub right: Profile,
    pub left: Profile,
}

impl ExactSolution for DAlembert {
    fn dim(&self) -> usize {
        1
    }

    fn derivative(&self, x: &Vec2, t: f64, k: usize, axes: &[usize]) -> C {
        if axes.iter().any(|&a| a != 0) {
            return C::new(0.0, 0.0);
        }
        let n = k + axes.len();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        C::new(sign * self.right.derivative(x[0] - t, n) + self.left.derivative(x[0] + t, n), 0.0)
    }
}

/// `∂_t^k G` for `G := u_tt − ∇·(A∇u)` with analytic `A`.
#[derive(Debug, Clone)]
pub struct ManufacturedSource {
    pub exact: Arc<dyn ExactSolution>,
    pub family: CoefficientFamily,
}

impl SourceFunction for ManufacturedSource {
    fn time_derivative(&self, x: &Vec2, t: f64, k: usize) -> C {
        let dim = self.exact.dim();
        let a = self.family.value(x, dim);
        let mut g = self.exact.derivative(x, t, k + 2, &[]);
        for j in 0..dim {
            let da = self.family.gradient(x, dim, j);
            for l in 0..dim {
                if da[j][l] != 0.0 {
                    g -= self.exact.derivative(x, t, k, &[l]) * da[j][l];
                }
                if a[j][l] != 0.0 {
                    g -= self.exact.derivative(x, t, k, &[j, l]) * a[j][l];
                }
            }
        }
        g
    }
}

/// Numeric parameters of a catalog entry.
pub type Params = BTreeMap<String, f64>;

fn param(p: &Params, key: &str, default: f64) -> f64 {
    p.get(key).copied().unwrap_or(default)
}

/// Registered catalog names.
pub const CATALOG: &[&str] = &["zero", "standing", "variable-a", "traveling", "gaussian-bump", "plane-wave", "gaussian-pulse", "quadratic"];

fn sin_term(coeff: f64, space: [Factor; 2], time: Factor) -> Term {
    Term { coeff: C::new(coeff, 0.0), space, time }
}

/// Closed form, domain and coefficient family of a catalog entry.
pub struct CatalogEntry {
    pub exact: Arc<dyn ExactSolution>,
    pub domain: Domain,
    pub family: CoefficientFamily,
    pub default_cells: usize,
}

pub fn catalog_entry(name: &str, p: &Params) -> Result<CatalogEntry> {
    let dim = param(p, "dim", 1.0) as usize;
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dim must be 1 or 2, got {dim}")));
    }
    let horizon = param(p, "T", 1.0);
    let unit = |t: f64| -> Result<Domain> {
        if dim == 1 {
            Domain::interval(0.0, 1.0, t)
        } else {
            Domain::rectangle([0.0, 1.0], [0.0, 1.0], t)
        }
    };
    let one_d = |what: &str| -> Result<()> {
        if dim != 1 {
            return Err(Error::InvalidParameter(format!("'{what}' is one-dimensional")));
        }
        Ok(())
    };
    let sin = |k: f64, phase: f64| Factor::Sin { k, phase };
    let cos_t = |w: f64| Factor::Sin { k: w, phase: FRAC_PI_2 };
    let entry = match name {
        "zero" => CatalogEntry {
            exact: Arc::new(Separable { dim, terms: vec![] }),
            domain: unit(horizon)?,
            family: CoefficientFamily::Identity,
            default_cells: 64,
        },
        "standing" => {
            let terms = if dim == 1 {
                vec![sin_term(1.0, [sin(PI, 0.0), Factor::One], cos_t(PI))]
            } else {
                vec![sin_term(1.0, [sin(PI, 0.0), sin(PI, 0.0)], cos_t(PI * 2f64.sqrt()))]
            };
            CatalogEntry {
                exact: Arc::new(Separable { dim, terms }),
                domain: unit(horizon)?,
                family: CoefficientFamily::Identity,
                default_cells: 128,
            }
        }
        "variable-a" => {
            one_d(name)?;
            let phase = param(p, "phase", 0.3);
            CatalogEntry {
                exact: Arc::new(Separable { dim, terms: vec![sin_term(1.0, [sin(PI, phase), Factor::One], cos_t(PI))] }),
                domain: unit(horizon)?,
                family: CoefficientFamily::SineModulated { base: 1.0, amplitude: 0.5, wavenumber: PI, axis: 0 },
                default_cells: 128,
            }
        }
        "traveling" => {
            one_d(name)?;
            CatalogEntry {
                exact: Arc::new(Separable {
                    dim,
                    terms: vec![Term { coeff: C::new(1.0, 0.0), space: [Factor::ExpI { k: PI }, Factor::One], time: Factor::ExpI { k: -PI } }],
                }),
                domain: unit(horizon)?,
                family: CoefficientFamily::Identity,
                default_cells: 128,
            }
        }
        "gaussian-bump" => {
            one_d(name)?;
            let bump = Profile::Bump {
                center: param(p, "center", 0.5),
                radius: param(p, "radius", 0.15),
                amplitude: 0.5 * param(p, "amplitude", 1.0),
                power: param(p, "power", 8.0) as u32,
            };
            CatalogEntry {
                exact: Arc::new(DAlembert { right: bump.clone(), left: bump }),
                domain: Domain::interval(param(p, "lo", 0.0), param(p, "hi", 1.0), param(p, "T", 0.3))?,
                family: CoefficientFamily::Identity,
                default_cells: 256,
            }
        }
        "plane-wave" => {
            one_d(name)?;
            // sin(π(x − t)) = sin πx cos πt − cos πx sin πt
            let terms = vec![
                sin_term(1.0, [sin(PI, 0.0), Factor::One], cos_t(PI)),
                sin_term(-1.0, [sin(PI, FRAC_PI_2), Factor::One], sin(PI, 0.0)),
            ];
            CatalogEntry {
                exact: Arc::new(Separable { dim, terms }),
                domain: Domain::interval(param(p, "lo", -3.0), param(p, "hi", 3.0), param(p, "T", 3.0))?,
                family: CoefficientFamily::Identity,
                default_cells: 256,
            }
        }
        "gaussian-pulse" => {
            one_d(name)?;
            let g = Profile::Gaussian { center: param(p, "center", 0.0), width: param(p, "width", 0.25), amplitude: 0.5 };
            CatalogEntry {
                exact: Arc::new(DAlembert { right: g.clone(), left: g }),
                domain: Domain::interval(param(p, "lo", -3.0), param(p, "hi", 3.0), param(p, "T", 3.0))?,
                family: CoefficientFamily::Identity,
                default_cells: 256,
            }
        }
        "quadratic" => {
            one_d(name)?;
            // x² + x t + t²
            let terms = vec![
                sin_term(1.0, [Factor::Poly(vec![0.0, 0.0, 1.0]), Factor::One], Factor::One),
                sin_term(1.0, [Factor::Poly(vec![0.0, 1.0]), Factor::One], Factor::Poly(vec![0.0, 1.0])),
                sin_term(1.0, [Factor::One, Factor::One], Factor::Poly(vec![0.0, 0.0, 1.0])),
            ];
            CatalogEntry {
                exact: Arc::new(Separable { dim, terms }),
                domain: unit(horizon)?,
                family: CoefficientFamily::Identity,
                default_cells: 32,
            }
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(entry)
}

/// Builds a catalog scenario: `u0, u1, f` from the closed form and
/// `G := u_tt − ∇·(A∇u)` from its derivatives. Optional keys: `n` (cells per
/// axis), `T`, `cfl`, `steps`, plus per-entry shape parameters.
pub fn manufactured(name: &str, p: &Params) -> Result<Scenario> {
    manufactured_with(name, p, None)
}

/// As [`manufactured`], optionally overriding the coefficient family.
pub fn manufactured_with(name: &str, p: &Params, family: Option<CoefficientFamily>) -> Result<Scenario> {
    let entry = catalog_entry(name, p)?;
    let family = family.unwrap_or(entry.family);
    let cells = param(p, "n", entry.default_cells as f64) as usize;
    let grid = SpatialGrid::uniform(entry.domain.clone(), cells)?;
    let a = CoefficientField::from_family(&grid, family.clone())?;
    let safety = param(p, "cfl", DEFAULT_CFL_SAFETY);
    let time = match p.get("steps") {
        Some(&steps) => TimeGrid::new(entry.domain.time_horizon, steps as usize)?,
        None => TimeGrid::with_max_step(entry.domain.time_horizon, cfl_limit(&grid, &a, safety))?,
    };
    from_exact(name, grid, time, a, entry.exact, safety)
}

/// Scenario whose data are induced by `exact` on the given grids.
pub fn from_exact(
    name: &str,
    grid: SpatialGrid,
    time: TimeGrid,
    a: CoefficientField,
    exact: Arc<dyn ExactSolution>,
    cfl_safety: f64,
) -> Result<Scenario> {
    let family = a.family().cloned().ok_or(Error::NoAnalyticGradient)?;
    let initial = InitialData {
        u0: (0..grid.node_count()).map(|n| exact.value(&grid.coord(n), 0.0)).collect(),
        u1: (0..grid.node_count()).map(|n| exact.derivative(&grid.coord(n), 0.0, 1, &[])).collect(),
    };
    let boundary = BoundaryField::from_fn(&grid, time, |_, x, t| exact.value(x, t));
    let source = ManufacturedSource { exact: exact.clone(), family };
    let nodes = grid.node_count();
    let coords: Vec<Vec2> = (0..nodes).map(|n| grid.coord(n)).collect();
    let sampled: Vec<C> = (0..time.levels())
        .flat_map(|l| coords.iter().map(move |x| (x, l)))
        .map(|(x, l)| source.time_derivative(x, time.time(l), 0))
        .collect();
    // exact cancellations (e.g. G ≡ 0 for A = I standing waves) leave rounding residue
    let scale = (0..time.levels())
        .flat_map(|l| coords.iter().map(move |x| (x, l)))
        .map(|(x, l)| exact.derivative(x, time.time(l), 2, &[]).norm())
        .fold(1.0, f64::max);
    let zero = sampled.iter().all(|v| v.norm() <= 1e-12 * scale);
    Ok(Scenario {
        name: name.to_string(),
        grid,
        time,
        coefficients: a,
        initial,
        boundary,
        source: if zero { None } else { Some(sampled) },
        source_fn: Some(Arc::new(source)),
        exact: Some(exact),
        cfl_safety,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn factor_derivatives_cycle() {
        let f = Factor::Sin { k: 2.0, phase: 0.1 };
        let s = 0.4;
        assert!((f.derivative(s, 1).re - 2.0 * (2.0 * s + 0.1).cos()).abs() < 1e-14);
        assert!((f.derivative(s, 2).re + 4.0 * (2.0 * s + 0.1).sin()).abs() < 1e-14);
        let e = Factor::ExpI { k: 3.0 };
        assert!((e.derivative(s, 2) + C::new(0.0, 3.0 * s).exp() * 9.0).norm() < 1e-13);
        let q = Factor::Poly(vec![1.0, 2.0, 3.0]);
        assert_eq!(q.derivative(2.0, 0).re, 17.0);
        assert_eq!(q.derivative(2.0, 1).re, 14.0);
        assert_eq!(q.derivative(2.0, 2).re, 6.0);
        assert_eq!(q.derivative(2.0, 3).re, 0.0);
    }

    fn fd_derivative(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
        (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn profile_derivatives_match_finite_differences() {
        let profiles = [
            Profile::Gaussian { center: 0.1, width: 0.3, amplitude: 1.2 },
            Profile::Bump { center: 0.5, radius: 0.2, amplitude: 1.0, power: 8 },
        ];
        for prof in &profiles {
            for &s in &[0.05, 0.37, 0.55, 0.61] {
                for n in 0..4 {
                    let fd = fd_derivative(|y| prof.derivative(y, n), s, 1e-4);
                    let an = prof.derivative(s, n + 1);
                    assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "{prof:?} n={n} s={s}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let b = Profile::Bump { center: 0.5, radius: 0.2, amplitude: 1.0, power: 8 };
        assert_eq!(b.derivative(0.29, 0), 0.0);
        assert_eq!(b.derivative(0.71, 3), 0.0);
        assert_eq!(b.derivative(0.5, 0), 1.0);
    }

    #[test]
    fn standing_has_zero_source() {
        let s = manufactured("standing", &p(&[("n", 16.0)])).unwrap();
        assert!(s.source.is_none());
        let s2 = manufactured("standing", &p(&[("n", 8.0), ("dim", 2.0)])).unwrap();
        assert!(s2.source.is_none());
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(manufactured("nope", &Params::new()), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn traveling_wave_source_vanishes() {
        let e = catalog_entry("traveling", &Params::new()).unwrap();
        let src = ManufacturedSource { exact: e.exact, family: e.family };
        for k in 0..3 {
            assert!(src.time_derivative(&[0.3, 0.0], 0.2, k).norm() < 1e-12);
        }
    }
}
