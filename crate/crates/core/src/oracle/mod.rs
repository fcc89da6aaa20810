//! Brute-force Milnor K-groups of finite rings `(F_q)_{m+1}`.
//!
//! `K^M_n(R)` is computed as the `n`-fold tensor power of `R^x` modulo the
//! Steinberg relations. The unit group is first decomposed into cyclic
//! factors, so the tensor power has one generator per tuple of cyclic
//! generators and the Smith normal form runs on a small matrix.

pub mod presentation;
pub mod snf;
pub mod units;

use thiserror::Error;

pub use presentation::{ClassCoords, KPresentation, RelativeSubgroup, DEFAULT_GENERATOR_CAP};
pub use snf::{smith, SnfResult};
pub use units::UnitGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{tuples} unit tuples exceed the generator cap {cap}")]
    CapExceeded { tuples: u128, cap: u128 },
    #[error("ring {0} is not finite")]
    InfiniteRing(String),
    #[error("symbol does not live over {0}")]
    RingMismatch(String),
    #[error("symbol length {got} does not match the presentation degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("symbol length must be positive")]
    ZeroDegree,
}

pub type OracleResult<T> = Result<T, OracleError>;
