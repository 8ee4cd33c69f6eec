use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("division by zero{}", .0.as_ref().map(|p| format!(" at position {p}")).unwrap_or_default())]
    DivisionByZero(Option<usize>),

    #[error("pole at {0}")]
    Pole(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid algebroid: {0}")]
    InvalidAlgebroid(String),

    #[error("invalid bivector: {0}")]
    InvalidBivector(String),

    #[error("degenerate groupoid model: {0}")]
    DegenerateModel(String),

    #[error("representations live over different bases")]
    BaseMismatch,

    #[error("section is identically zero")]
    ZeroSection,

    #[error("point is not fixed by the arrow: {0}")]
    NotFixed(String),

    #[error("sign data vanishes at {0}")]
    SignVanishes(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("malformed cocycle: {0}")]
    MalformedCocycle(String),

    #[error("schema error: {0}")]
    Schema(String),
}
