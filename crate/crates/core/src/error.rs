use thiserror::Error;

use crate::model::BoundaryConfig;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is finite or defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The energy density is singular at a wall when the cutoff is removed.
    #[error("singular point: x = {x} coincides with an endpoint of [0, {length}] at t = 0")]
    SingularPoint { x: f64, length: f64 },

    /// The spectral densities have a pole at the threshold `omega == mass`.
    #[error("pole at threshold omega = m = {omega}")]
    Pole { omega: f64 },

    /// An image or Macdonald series did not reach the truncation criterion.
    #[error("series failed to converge after {terms} terms (last term {last_term:e})")]
    Convergence { terms: usize, last_term: f64 },

    /// The eigenmode sum was cut off too early for the requested cutoff `t`.
    #[error("mode sum truncated at n_max = {n_max}; at least {required} modes are required")]
    InsufficientModes { n_max: usize, required: usize },

    /// The requested operation is only derived for some boundary configurations.
    #[error("unsupported boundary configuration {0}")]
    UnsupportedBoundary(BoundaryConfig),

    #[error("invalid mass spectrum: {0}")]
    InvalidSpectrum(String),

    /// The constraint matrix is singular (for instance, repeated regulator masses).
    #[error("singular constraint system: {0}")]
    SingularSystem(String),

    /// No coefficient vector satisfies the requested constraints.
    #[error("infeasible constraint system: {reason} (residual {residual:e})")]
    Infeasible { reason: String, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by series or mode-sum truncation rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::InsufficientModes { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
