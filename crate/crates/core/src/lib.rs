//! Solvability analysis and solution of linear boundary-value problems for
//! first-order ODE systems
//!
//! A problem couples the system `y'(t) + A(t) y(t) = f(t)` on a finite
//! interval with `r` scalar boundary conditions `B y = c`, where `B` is a
//! finite sum of point-derivative terms (integer or fractional Caputo order)
//! and integral terms. The central object is the `r x m` characteristic
//! matrix whose j-th column is `B` applied to the j-th column of the
//! fundamental matrix `Y(t)`; its numerical rank determines every
//! solvability datum of the problem:
//!
//! - index = `m - r`,
//! - kernel dimension = `m - rank`,
//! - cokernel dimension = `r - rank`,
//! - unique solvability iff `r = m` and the matrix is nondegenerate.
//!
//! Pipeline: [`problem`] parses and validates problem files,
//! [`fundamental`] integrates the fundamental matrix, [`boundary`] applies
//! boundary operators, [`characteristic`] builds the characteristic matrix
//! and its rank report, [`solver`] classifies and produces solutions, and
//! [`oracle`] holds independent closed-form cross-checks. [`sobolev`]
//! computes a fractional Sobolev norm diagnostic.
//!
//! The crate is `no_std` (with `alloc`); all types are immutable after
//! construction and safe to share across threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod boundary;
pub mod characteristic;
mod error;
pub mod expm;
pub mod fundamental;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod quad;
pub mod sobolev;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
