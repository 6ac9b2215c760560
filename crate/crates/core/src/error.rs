use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative diagonal entry d{index} = {value}")]
    NegativeDiagonal { index: usize, value: f64 },

    #[error("diagonal entries sum to {sum}, expected 1")]
    TraceNotUnit { sum: f64 },

    #[error("ratio ν must be a nonnegative finite number, got {0}")]
    InvalidNu(f64),

    #[error("point lies outside the CAD region: {0}")]
    OutOfRegion(&'static str),

    #[error("invalid sequence spec: {0}")]
    InvalidSequence(String),

    #[error("expected a {expected}-dimensional point, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid jacobian settings: {0}")]
    InvalidJacobian(String),

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} after {subdivisions} subdivisions")]
    QuadratureDiverged {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("incomplete beta domain error: ν={nu}, a={a}, b={b}")]
    BetaDomain { nu: f64, a: f64, b: f64 },

    #[error("invalid estimation config: {0}")]
    InvalidConfig(String),

    #[error("empty campaign: no points were sampled")]
    EmptyCampaign,

    #[error("fit needs at least {needed} interior grid points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("malformed {kind} file {path}: {reason}")]
    Malformed {
        kind: &'static str,
        path: PathBuf,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
