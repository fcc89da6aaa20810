//! Exact arithmetic foundation: fields, polynomials, truncated polynomial
//! rings, the universal ring, factorization and norms.

pub mod error;
pub mod factor;
pub mod field;
pub mod norm;
pub mod poly;
pub mod ring;
pub mod truncated;
pub mod universal;

pub use error::{AlgebraError, AlgebraResult};
pub use factor::{factor, is_irreducible, Factorization};
pub use field::{FElem, Field, FieldKind};
pub use norm::norm_coeffwise;
pub use poly::Polynomial;
pub use ring::{CommRing, UnitRing};
pub use truncated::{TElem, TruncRing};
pub use universal::{MPoly, UniversalRing};
