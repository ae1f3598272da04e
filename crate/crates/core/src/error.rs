use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vector is not unit: |<v|v> - 1| = {deviation:e}")]
    Norm { deviation: f64 },

    #[error("expected {expected} vectors, found {found}")]
    Count { expected: usize, found: usize },

    #[error("unsupported frame potential order t = {0} (only 1 and 2)")]
    UnsupportedOrder(u32),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("unsupported subspace: {0}")]
    UnsupportedSubspace(String),

    #[error("no closed form tabulated for space {space} at N = {dim}")]
    NotTabulated { space: String, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
