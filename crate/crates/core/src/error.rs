use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("empty coordinate list")]
    Empty,
    #[error("zero or near-zero vector (norm {0:e})")]
    ZeroVector(f64),
    #[error("vector is not on the unit sphere (norm {0})")]
    NotUnit(f64),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("invalid subspace basis: {0}")]
    InvalidSubspace(String),
    #[error("invalid boundary specification: {0}")]
    InvalidBoundary(String),
    #[error("absolute norm certification failed: {0}")]
    Certification(String),
    #[error("operation needs a space of dimension {expected}, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },
    #[error("cannot parse space spec: {0}")]
    Parse(String),
    #[error("search is infeasible: {0}")]
    Infeasible(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
