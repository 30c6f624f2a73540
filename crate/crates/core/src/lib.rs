//! Gaussian-type measures with values in complexified Cayley-Dickson algebras.
//!
//! The crate covers the arithmetic of `A_r` and `A_{r,C}`, the left-ordered
//! exponential, the admissibility condition on block coefficients,
//! characteristic functionals, grid evaluation of fundamental solutions,
//! numerical moments, and finite consistency checks for projective families.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod charfunc;
pub mod cli;
pub mod config;
pub mod cylinder;
mod error;
pub mod explog;
pub mod kernel;
pub mod moments;
pub mod selftest;
pub mod spectral;

pub use algebra::{CCDNumber, CDNumber};
pub use error::{Error, Result};
pub use spectral::{BlockSpec, Matrix, MeasureSpec};
