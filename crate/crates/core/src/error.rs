use thiserror::Error;

use crate::zi::GaussInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic overflow in Z[i]")]
    Overflow,
    #[error("zero is not a valid argument here")]
    Zero,
    #[error("{0} is even; only odd Gaussian integers are supported")]
    Even(GaussInt),
    #[error("{0} is not primary")]
    NotPrimary(GaussInt),
    #[error("modulus norm {norm} exceeds the bound {bound}")]
    BoundExceeded { norm: u64, bound: u64 },
    #[error("character must be primitive and odd")]
    NotPrimitiveOdd,
    #[error("{0} is not coprime to the modulus")]
    NotCoprime(GaussInt),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("quadrature did not reach target {target:e} (estimate {estimate:e})")]
    Quadrature { target: f64, estimate: f64 },
    #[error("truncation budget exceeded: {0}")]
    Truncation(String),
    #[error("estimator spread {spread:e} exceeds {bound:e}")]
    Spread { spread: f64, bound: f64 },
    #[error("cache: {0}")]
    Cache(String),
}
