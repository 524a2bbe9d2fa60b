//! Discrete checks of the exact identities: pointwise energy and multiplier
//! identities, integrated balances, the conormal gradient decomposition and
//! the Grönwall coefficient.

pub mod algebra;
pub mod balance;
pub mod lemma;
pub mod multiplier;

pub use algebra::{gradient_decomposition, gronwall_coefficient, gronwall_coefficient_min, sphere_decomposition_check, Decomposition, GronwallMin};
pub use balance::{flux_balance, multiplier_balance, FluxBalance, MultiplierBalance};
pub use lemma::{jet_energy_identity, jet_multiplier_identity, residual_energy_identity, residual_multiplier_identity};
pub use multiplier::{extend_multiplier, AffineField, MultiplierCheck, MultiplierField, MultiplierSpec, VectorField};

use serde::Serialize;

/// One grid of a refinement sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSample {
    pub cells: usize,
    pub h: f64,
    pub max_pointwise: f64,
    pub integrated: f64,
}

/// Residuals of one identity across grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidualReport {
    pub identity: String,
    pub samples: Vec<ResidualSample>,
    /// Least-squares slope of `log(max_pointwise)` against `log h`; needs three grids.
    pub order: Option<f64>,
    pub integrated_order: Option<f64>,
}

impl IdentityResidualReport {
    pub fn new(identity: impl Into<String>, samples: Vec<ResidualSample>) -> Self {
        let hs: Vec<f64> = samples.iter().map(|s| s.h).collect();
        let order = estimate_order(&hs, &samples.iter().map(|s| s.max_pointwise).collect::<Vec<_>>());
        let integrated_order = estimate_order(&hs, &samples.iter().map(|s| s.integrated).collect::<Vec<_>>());
        Self { identity: identity.into(), samples, order, integrated_order }
    }
}

/// Below this an error is treated as exact and carries no order information.
pub const ORDER_FLOOR: f64 = 1e-13;

/// Fitted convergence order `p` in `err ≈ c·h^p`. `None` with fewer than three
/// grids or when any error is at rounding level.
pub fn estimate_order(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() < 3 || h.len() != err.len() || err.iter().any(|e| !(e.abs() > ORDER_FLOOR)) {
        return None;
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_exact_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        assert!((estimate_order(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(estimate_order(&h[..2], &e[..2]), None);
        assert_eq!(estimate_order(&h, &[0.0, 0.0, 0.0]), None);
    }
}
