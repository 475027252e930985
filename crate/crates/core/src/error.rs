use thiserror::Error;

/// Errors raised while constructing objects or evaluating inequalities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A hypothesis of the inequality being instantiated does not hold.
    #[error("hypothesis violated ({result}): {detail}")]
    Hypothesis { result: &'static str, detail: String },

    #[error("dimension mismatch for `{what}`: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("support of the test function leaves the domain near {point:?}")]
    SupportViolation { point: Vec<f64> },

    #[error("test function must satisfy |u| <= 1, but its sup bound is {bound}")]
    NotUnitBounded { bound: f64 },

    #[error("singular weight |x - x0|^-{gamma} is not integrable in dimension {dim}")]
    NonIntegrable { gamma: f64, dim: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate problem: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn hypothesis(result: &'static str, detail: impl Into<String>) -> Error {
    Error::Hypothesis {
        result,
        detail: detail.into(),
    }
}

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}
