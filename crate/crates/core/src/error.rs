use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter or scenario value is out of range. `field` is the
    /// scenario-file key of the offending value.
    #[error("invalid value for `{field}`: {value} ({reason})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// aCf = bCr: the lateral-acceleration output loses its yaw-rate term and
    /// the closed-form invariant zero has a vanishing denominator.
    #[error(
        "degenerate geometry: a*Cf - b*Cr = 0, the lateral-acceleration output \
         has no yaw-rate dependence and its invariant zero is undefined"
    )]
    DegenerateGeometry,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
