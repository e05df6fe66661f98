use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("field does not belong to this manifold")]
    ManifoldMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The constraint integral is not positive, so the function is outside the admissible set.
    #[error("not admissible: constraint integral {0} is not positive")]
    NotAdmissible(f64),

    #[error("precondition failed: {0}")]
    PreconditionFailure(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("unknown profile descriptor `{0}`")]
    UnknownDescriptor(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that signal a violated mathematical precondition
    /// (as opposed to a numerical breakdown).
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::NumericFailure(_) | Error::Io { .. })
    }
}
