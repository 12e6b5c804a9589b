//! Exact linear algebra over the rationals.
//!
//! Everything above this module reduces to ranks, kernels and cokernels of
//! sparse rational matrices, one internal degree at a time.

mod rational;
mod sparse;

pub use rational::{ParseRationalError, Rational};
pub use sparse::{quotient_basis, Echelon, QuotientBasis, Rref, SparseMatrix, SparseVec};
