//! Config-driven runner for the verifier and extremal experiments in `hp_core`.

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod describe;
pub mod error;
pub mod resolve;
pub mod run;
