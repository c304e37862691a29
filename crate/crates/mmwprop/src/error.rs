//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Antenna heights or separations that are non-finite or non-positive.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Canopy spans or scene definitions that are malformed.
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A power total of zero where a positive power is required.
    #[error("no signal: {0}")]
    NoSignal(String),

    /// Malformed measurement data (mismatched lengths, negative powers, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Bad sounder or sequence configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Lookup of an identifier that does not exist.
    #[error("not found: {0}")]
    NotFound(String),

    /// A waveform too short for the requested correlation span.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The bundled reference data failed its checksum.
    #[error("data integrity: {0}")]
    Integrity(String),

    /// A text format violation with a 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Build a [`Error::Parse`] with a 1-based line number.
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
