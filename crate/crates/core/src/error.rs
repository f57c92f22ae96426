use thiserror::Error;

pub type Result<T> = std::result::Result<T, DropError>;

#[derive(Debug, Error)]
pub enum DropError {
    /// Parameters outside an operation's stated preconditions.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numeric procedure could not produce a value (no bracket, singular formula).
    #[error("numeric domain error: {0}")]
    Domain(String),

    /// A truncation radius beyond the end of the computed profile.
    #[error("radius {requested} outside profile range [0, {limit}]")]
    OutOfRange { requested: f64, limit: f64 },

    /// The operation needs a profile that ended at its vertical tangent.
    #[error("profile is not closed: {0}")]
    NotClosed(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
