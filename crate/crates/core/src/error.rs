use thiserror::Error;

/// Errors raised by the rate engines and their supporting types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(&'static str),
    #[error("quadrature order {0} outside the supported range")]
    QuadratureOrder(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(&'static str),
    #[error("invalid constellation: {0}")]
    InvalidConstellation(&'static str),
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("cell index out of range")]
    CellOutOfRange,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("too few samples: {got} (minimum {min})")]
    TooFewSamples { got: usize, min: usize },
    #[error("constellation pair is not uniquely decodable at the requested power")]
    NotUniquelyDecodable,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
