//! Numerical laboratory for second-order hyperbolic problems: a leapfrog
//! solver for `u_tt − ∇·(A∇u) = G`, the generalized energy on non-timelike
//! graph hypersurfaces `t = S(x)`, discrete checks of the associated exact
//! identities, and computable left/right-hand sides of the a-priori bounds.

// Index loops mirror the tensor notation; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod compat;
pub mod config;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod geometry;
pub mod identities;
pub mod linalg;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::C;
