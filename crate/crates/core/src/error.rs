use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The argument is inside the mathematical domain but outside the range the
    /// floating-point evaluation supports.
    #[error("range error: {0}")]
    Range(String),

    #[error("no sign change of the matching function found in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error(
        "root solver did not converge after {iterations} iterations (last residual {residual:e})"
    )]
    Convergence { iterations: usize, residual: f64 },

    #[error("exact polynomial identity violated: {0}")]
    IdentityViolation(String),

    #[error(
        "non-finite value produced by the finite-difference scheme at step {step}, node {node}"
    )]
    NonFinite { step: usize, node: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. } | Error::Convergence { .. } | Error::NonFinite { .. }
        )
    }
}
