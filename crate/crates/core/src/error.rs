use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid {n_p}x{n_q} rejected: {reason}")]
    InvalidGrid { n_p: usize, n_q: usize, reason: String },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:.3e})")]
    NonConvergence { iterations: usize, worst_residual: f64 },

    #[error("sweep point f = {f}: {source}")]
    SweepPoint {
        f: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("level index {index} out of range for a spectrum with {available} levels")]
    LevelOutOfRange { index: usize, available: usize },

    #[error("levels {i} and {j} are degenerate (gap {gap:.3e} E_J below floor)")]
    DegeneratePair { i: usize, j: usize, gap: f64 },

    #[error("ambiguous steady state: singular values {smallest:.3e} and {second:.3e} are not separated")]
    AmbiguousSteadyState { smallest: f64, second: f64 },

    #[error("time step {dt} violates the stability bound (use dt <= {suggested})")]
    StabilityBound { dt: f64, suggested: f64 },

    #[error("density-matrix invariant broken at t = {t}: {what}")]
    InvariantBreach { t: f64, what: String },

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
