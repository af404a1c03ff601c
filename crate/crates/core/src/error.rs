use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the thermodynamic model and the drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("nonpositive density {value:e} for species {species}")]
    NonpositiveDensity { species: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reaction {reaction} violates {quantity} conservation (sum = {sum:e})")]
    Conservation {
        reaction: usize,
        quantity: &'static str,
        sum: f64,
    },

    #[error("reaction affinity overflow: A_{reaction} = {affinity:e}")]
    AffinityOverflow { reaction: usize, affinity: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("nonpositive face coefficient {value:e} at face {face}")]
    NonpositiveCoefficient { face: usize, value: f64 },

    #[error("incompatible pure-Neumann data: net source {imbalance:e}")]
    IncompatibleNeumann { imbalance: f64 },

    #[error("Newton solve did not converge at node {node} (|F| = {residual:e})")]
    NewtonDivergence { node: usize, residual: f64 },

    #[error("Picard iteration did not converge after {iterations} sweeps (change {change:e})")]
    PicardDivergence { iterations: usize, change: f64 },

    #[error("time step underflow: dt = {dt:e} at t = {time}")]
    TimeStepUnderflow { dt: f64, time: f64 },

    #[error("phase field overshoot {overshoot:e} exceeds monitor bound at t = {time}")]
    PhaseFieldOvershoot { overshoot: f64, time: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("no interface in domain")]
    NoInterface,

    #[error("{key} {message}")]
    Config { key: String, message: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter(_)
                | Error::Conservation { .. }
                | Error::Read { .. }
                | Error::NotPositiveDefinite(_)
                | Error::Dimension { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
