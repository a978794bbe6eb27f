//! Left-invariant locally conformally Kähler structures on Lie algebras.

pub mod connections;
pub mod constructions;
pub mod error;
pub mod exterior;
pub mod hermitian;
pub mod linalg;
pub mod models;
pub mod report;
pub mod rigidity;
pub mod sasaki;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, ScalarMode};
