//! Finite fields, polynomials over them, and exact cyclotomic scalars.

pub mod ff;
pub mod poly;
pub mod scalar;

pub use ff::{Embedding, Fe, FiniteField, FqElem};
pub use poly::{Factorization, FqPoly};
pub use scalar::{CycloRing, ScalarExt};
