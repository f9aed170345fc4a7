use thiserror::Error;

/// Errors raised by design construction, criteria, bounds and search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// An entry of a design matrix is out of range.
    #[error("row {row}, column {column}: {message}")]
    Entry { row: usize, column: usize, message: String },

    /// The design lacks a structure the operation requires (U-type, LHD
    /// columns, divisibility).
    #[error("structure error: {0}")]
    Structure(String),

    /// The requested computation exceeds a size cap or integer width.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Index out of range.
    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    /// Malformed design file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
