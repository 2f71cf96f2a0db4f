//! Exact extreme box volumes of d-dimensional quasi-copulas.
//!
//! The crate computes the largest negative and positive volume a
//! d-quasi-copula can assign to a box, in closed form, and cross-checks the
//! closed form against an exact rational simplex solver run on the linear
//! programs the problem reduces to.

pub mod arith;
pub mod closed_form;
pub mod error;
pub mod grid;
pub mod lp;
pub mod models;
pub mod report;

pub use arith::{parse_rational, render_rational, Integer, Rational};
pub use closed_form::{extreme_volume, ClosedFormSolution, VolumeSign};
pub use error::{Error, Result};
