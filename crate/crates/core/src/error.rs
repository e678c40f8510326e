//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by kernel evaluation and the numerical engines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Evaluation points coincide where the kernel is singular.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The angular denominator cosh s + cos(Δθ) fell below the guard value.
    #[error("singular denominator at s = {s}, Δθ = {dtheta}")]
    SingularDenominator { s: f64, dtheta: f64 },

    /// Non-integer total flux with |α| ≥ 1: the s-integrals of the kernel
    /// formula diverge; reduce the flux by an integer gauge first.
    #[error("total flux {alpha} is non-integer with |α| ≥ 1; s-integrals diverge")]
    FluxNotReduced { alpha: f64 },

    /// The oscillation-proportional panel budget was exceeded.
    #[error("quadrature budget exceeded: {needed} panels needed, cap is {cap}")]
    BudgetExceeded { needed: usize, cap: usize },

    /// Dyadic truncation tails could not be certified below the tolerance.
    #[error("truncation uncertified: estimate {estimate:e} exceeds tol {tol:e}")]
    TruncationUncertified { estimate: f64, tol: f64 },

    /// Malformed configuration (flux JSON, sweep config, CLI arguments).
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. }
            | Error::DegenerateInput(_)
            | Error::FluxNotReduced { .. }
            | Error::InvalidConfig(_) => 2,
            Error::SingularDenominator { .. }
            | Error::BudgetExceeded { .. }
            | Error::TruncationUncertified { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
