use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand returned a non-finite value {value} at x = {x:?}, y = {y:?}")]
    NonFinite {
        value: f64,
        x: [f64; 3],
        y: [f64; 3],
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
