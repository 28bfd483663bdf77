use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature did not converge after {panels} panels (last error estimate {estimate:.3e})")]
    NotConverged { estimate: f64, panels: usize },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("quadrature rule mismatch: {0}")]
    RuleMismatch(String),

    #[error("oracle grid not converged: max change {change:.3e} on refinement")]
    GridNotConverged { change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
