use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval endpoints must be finite, got [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("lower endpoint {lo} exceeds upper endpoint {hi}")]
    Inverted { lo: f64, hi: f64 },
    #[error("scalar must be finite, got {0}")]
    NonFiniteScalar(f64),
    #[error("arithmetic overflow to a non-finite endpoint")]
    Overflow,
    #[error("vector must have at least one component")]
    Empty,
    #[error("expected lo/hi pairs, got {0} numbers")]
    OddPairs(usize),
    #[error("dimension mismatch: vector has {left} components, interval tuple has {right}")]
    Dimension { left: usize, right: usize },
    #[error("the zero vector is not allowed here")]
    ZeroVector,
}
