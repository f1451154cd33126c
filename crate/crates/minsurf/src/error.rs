use thiserror::Error;

/// Unified error type. The CLI maps these onto its exit-code contract:
/// parse 2, validation 3, fixture mismatch 4, engine 5, reduction 6.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("no volume potential: {0}")]
    NoVolumePotential(String),

    #[error("integration pattern miss: {0}")]
    IntegrationPatternMiss(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },

    #[error("validation error: {0}")]
    ValidationError(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("not a coordinate translation: {0}")]
    NotTranslation(String),

    #[error("symmetries do not commute: {0}")]
    NonCommuting(String),

    #[error("reduced equation still depends on an eliminated variable: {0}")]
    ResidualDependence(String),

    #[error("leading coefficient vanishes at the initial point")]
    LeadingCoefficientVanishes,

    #[error("domain exit: {0}")]
    DomainExit(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::ParseError { line, col, msg: msg.into() }
    }

    /// Exit code bucket for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParseError { .. } => 2,
            Error::ValidationError(_) | Error::UnknownMetric(_) | Error::DegenerateMetric(_) => 3,
            Error::UnboundSymbol(_)
            | Error::DomainError(_)
            | Error::NoVolumePotential(_)
            | Error::IntegrationPatternMiss(_) => 5,
            Error::NotTranslation(_)
            | Error::NonCommuting(_)
            | Error::ResidualDependence(_)
            | Error::LeadingCoefficientVanishes
            | Error::DomainExit(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
