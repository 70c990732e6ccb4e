use thiserror::Error;

/// Errors raised by the toolkit. Each variant maps to a stable
/// machine-readable `kind` used by the CLI and the C ABI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    ParameterDomain(String),

    #[error("probability out of range: {0}")]
    ProbabilityDomain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient exceedances: {found} above threshold {threshold} (need {required})")]
    InsufficientExceedances { threshold: f64, found: usize, required: usize },

    #[error("degenerate moments: {0}")]
    DegenerateMoments(String),

    #[error("infinite mean: shape {gamma} >= 1 has no expected shortfall")]
    InfiniteMean { gamma: f64 },

    #[error("horizon too short: rescaled alpha {rescaled} >= 1 lies outside the modelled tail")]
    HorizonTooShort { rescaled: f64 },

    #[error("not estimable: alpha {alpha} is below the data limit 1/{n}")]
    NotEstimable { alpha: f64, n: usize },

    #[error("empty chain")]
    EmptyChain,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParameterDomain(_) => "parameter_domain",
            Error::ProbabilityDomain(_) => "probability_domain",
            Error::InsufficientData(_) => "insufficient_data",
            Error::InsufficientExceedances { .. } => "insufficient_exceedances",
            Error::DegenerateMoments(_) => "degenerate_moments",
            Error::InfiniteMean { .. } => "infinite_mean",
            Error::HorizonTooShort { .. } => "horizon_too_short",
            Error::NotEstimable { .. } => "not_estimable",
            Error::EmptyChain => "empty_chain",
            Error::EmptyInput(_) => "empty_input",
            Error::Parse(_) => "parse",
            Error::Validation(_) => "validation",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
