use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points are affinely dependent (degenerate simplex)")]
    Degenerate,
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("simplex is not negative after insertion")]
    NotNegative,
    #[error("measure is empty")]
    EmptyMeasure,
    #[error("sample is empty")]
    EmptySample,
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("cone cover verification failed: direction {0:?} uncovered")]
    CoverFailure(Vec<f64>),
    #[error("locality radius unbounded: cone {cone} holds only {count} points")]
    Unbounded { cone: usize, count: usize },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
