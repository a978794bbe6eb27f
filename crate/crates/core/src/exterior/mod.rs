//! Lie algebras, left-invariant forms and the metric operations on them.

pub mod algebra;
pub mod forms;
pub mod metric;
pub mod tensor;

pub use algebra::{unit, BracketEntry, LieAlgebra, ValidationReport};
pub use forms::{increasing_tuples, KForm};
pub use metric::{codifferential, levi_civita_coefficients, Codifferential, Metric};
pub use tensor::{Endomorphism, SymTensor};
