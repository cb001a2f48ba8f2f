use thiserror::Error;

/// Errors surfaced by the analysis and simulation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the domain a formula is defined on.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// An iterative special-function evaluation failed to converge.
    #[error("{context} did not converge after {iterations} iterations (argument {argument})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
        argument: String,
    },

    /// Adaptive quadrature exhausted its subdivision budget; the best
    /// estimate and its error bound are carried so callers can decide.
    #[error("quadrature tolerance not met: estimate {estimate}, error bound {error_bound}")]
    ToleranceNotMet { estimate: f64, error_bound: f64 },

    /// The Fourier-inversion result strayed far outside [0, 1] before
    /// clamping, which signals mis-set truncation limits.
    #[error("inversion result {raw} outside the plausible range; check omega/y truncation")]
    ExcessiveClamp { raw: f64 },

    /// A scenario failed validation.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain { context, message: message.into() }
    }
}
