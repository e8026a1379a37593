//! Exact tensor calculus on flat para-Kähler double manifolds.
//!
//! Scalars are rational functions of the distinguished coordinates
//! `(x^1..x^m, x̃_1..x̃_m)`, so every identity check is an exact zero test.

pub mod algebroid;
pub mod connection;
pub mod density;
pub mod dirac;
pub mod error;
pub mod genmetric;
pub mod random;
pub mod suite;
pub mod symcore;
pub mod tensor;

pub use error::{Error, Result};
pub use symcore::{CoordSystem, ScalarExpr};
