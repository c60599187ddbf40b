use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("malformed real representation: {0}")]
    MalformedRepresentation(String),

    /// The column left after projecting out its predecessors has (near) zero norm.
    #[error("column {column} is numerically dependent on the previous columns (residual norm {residual:e})")]
    RankDeficient { column: usize, residual: f64 },

    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Image { path: PathBuf, message: String },

    #[error("manifest {}:{line}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("model format error: {0}")]
    Format(String),

    #[error("unsupported model version {found} (this build reads version {supported})")]
    Version { found: u16, supported: u16 },

    #[error("model checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
