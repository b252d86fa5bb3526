use std::path::PathBuf;

use crate::compliance::Metric;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown profile `{0}` (built-ins: nr5g, lte4g, g39)")]
    UnknownProfile(String),

    #[error("unknown limit `{0}` (known: icnirp-pd, icnirp-sar, fcc-sar)")]
    UnknownLimit(String),

    #[error("singular geometry: 3D distance is zero")]
    SingularGeometry,

    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),

    #[error("sample carries no {0:?} value to check against the limit")]
    MetricMismatch(Metric),

    #[error("exposure exceeds the limit ({limit}) everywhere up to {bracket_m} m")]
    BracketExhausted { limit: f64, bracket_m: f64 },

    #[error("invalid campaign spec: {0}")]
    InvalidSpec(String),

    #[error("campaign result is empty")]
    EmptyResult,

    #[error("{action} {path}: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn io(action: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            action,
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
