use thiserror::Error;

/// Errors raised by validation or by numerical preconditions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
    #[error("not invertible at center: {0}")]
    NotInvertible(String),
    #[error("resonant: {0}")]
    Resonant(String),
    #[error("genericity violated: {0}")]
    GenericityViolated(String),
    #[error("sample on coalescence locus: {0}")]
    CoalescentSample(String),
    #[error("no valid off-coalescence sample: {0}")]
    NoValidSample(String),
    #[error("singular system at degree {degree}: {detail}")]
    SingularSystem { degree: u32, detail: String },
    #[error("exact arithmetic required: {0}")]
    InexactInput(String),
    #[error("degree shortfall: {0}")]
    DegreeShortfall(String),
}

impl Error {
    /// Stable machine-readable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Mismatch(_) => "mismatch",
            Error::NotInvertible(_) => "not_invertible",
            Error::Resonant(_) => "resonant",
            Error::GenericityViolated(_) => "genericity_violated",
            Error::CoalescentSample(_) => "coalescent_sample",
            Error::NoValidSample(_) => "no_valid_sample",
            Error::SingularSystem { .. } => "singular_system",
            Error::InexactInput(_) => "inexact_input",
            Error::DegreeShortfall(_) => "degree_shortfall",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
