//! Differential forms on the plane: symbolic component equations, sampled
//! fields, the calculus operations between them, and their rendering.

pub mod calculus;
pub mod error;
pub mod expr;
pub mod fields;
pub mod render;

pub use error::{Error, Result};
