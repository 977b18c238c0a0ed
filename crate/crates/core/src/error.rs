use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Receivers overlap or a length is non-physical.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A point lies where the operation is undefined (inside a receiver).
    #[error("domain error: {0}")]
    Domain(String),

    /// The virtual-point construction has no positive solution.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("singular coordinate: {0}")]
    SingularCoordinate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "exhaustive enumeration needs {bits} bits but the cap is {cap}; \
         use sampled (Monte Carlo) evaluation instead"
    )]
    Intractable { bits: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
