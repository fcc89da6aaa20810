//! Exact computations with truncated big Witt vectors, Milnor K-symbols over
//! truncated polynomial rings, a characteristic-zero de Rham-Witt model and
//! the inverse Cartier operator.

pub mod algebra;
pub mod witt;
pub mod drw;
pub mod forms;
pub mod milnor;
pub mod oracle;
pub mod bloch;
pub mod cartier;
pub mod selftest;
pub mod cli;
