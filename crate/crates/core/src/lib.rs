//! L-functions of twists of Galois representations over `F_q(t)`.
//!
//! The crate computes exact L-polynomials of power-residue characters,
//! elliptic curves and their twists over the rational function field,
//! organises them by Frobenius orbits of characters, predicts forced
//! central zeros from root-number parity, and runs the statistical
//! experiments built on top of those computations.

pub mod algebra;
pub mod applications;
pub mod covers;
pub mod error;
pub mod family;
pub mod par;
pub mod places;
pub mod lfunc;
pub mod reps;

pub use error::{Error, Result};
