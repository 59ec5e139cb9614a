//! Entanglement witnesses for symmetric multi-qubit states.
//!
//! The crate builds Dicke states and collective spin operators, compiles
//! permutationally invariant observables into collective local measurement
//! settings, constructs and optimizes witnesses, and evaluates them from
//! measurement counts.

// NaN-rejecting guards are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod counts;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod symmetric;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{DenseOperator, StateVector};
