//! Errors raised by the exact arithmetic layer.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus must be monic of positive degree")]
    BadModulus,
    #[error("modulus is reducible over the base field")]
    ReducibleModulus,
    #[error("degree {degree} exceeds the factorization bound {bound} over QQ")]
    DegreeBoundExceeded { degree: usize, bound: usize },
    #[error("coefficients too large for the modular factorization prime")]
    CoefficientBoundExceeded,
    #[error("operation not supported over {0}")]
    UnsupportedField(String),
    #[error("extension is inseparable")]
    InseparableExtension,
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("field has characteristic zero")]
    CharZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("fields do not match: {0} vs {1}")]
    FieldMismatch(String, String),
}

pub type AlgebraResult<T> = Result<T, AlgebraError>;
