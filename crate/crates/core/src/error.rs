use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation point lies outside the domain of the operation.
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// An iterative or adaptive procedure did not converge within its budget.
    #[error("{context}: no convergence (best estimate {estimate:e}, error bound {error_bound:e})")]
    NoConvergence {
        context: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    /// The linear system is singular or too ill-conditioned to trust.
    #[error("linear system is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    /// Input data carried a NaN or infinity.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// A dense factorisation failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::IllConditioned { .. } | Error::Numerical(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
