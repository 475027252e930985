//! Numerical laboratory for Hardy-Poincaré type inequalities.
//!
//! The crate evaluates certified constants in closed form, integrates both
//! sides of each inequality on compactly supported test functions, and
//! estimates optimal constants by discrete variational methods so that the
//! certified values can be compared against what is actually attainable.

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod extremal;
pub mod functions;
pub mod geometry;
pub mod numeric;
pub mod quadrature;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
pub use exponents::{AffineProfile, ExponentField};
pub use functions::{ScalarField, TestFunction};
pub use geometry::{best_direction, Direction, Domain, Interval};
pub use quadrature::{Grid, IntegralResult};
pub use verifier::{InequalityInstance, InequalityKind, VerificationReport};

pub use weights::{LimitMode, LimitWeightParams, WeightParams};
