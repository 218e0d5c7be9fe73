//! Geometric objects sampled on rectangular grids.
//!
//! Every component is a [`ScalarField`]: values on a [`Grid2`], an optional
//! equation, and a per-point classification into finite, infinite (beyond
//! the singularity threshold) and undefined (NaN) points.

mod grid;
mod metric;
mod object;
mod scalar;
mod spec;

pub use grid::{Axis, Grid2};
pub use metric::Metric;
pub use object::{
    make_field, ComponentInput, Form0, Form1, Form2, Kind, Object, VectorField, ZeroForm,
};
pub use scalar::{PointKind, ScalarField, SINGULARITY_THRESHOLD};
pub use spec::{ComponentSpec, MaskEntry, ObjectSpec};
