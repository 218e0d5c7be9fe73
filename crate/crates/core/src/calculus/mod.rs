//! Exterior calculus on sampled forms, and the zoom / local-derivative
//! family.
//!
//! Every operation has an analytic path, which works on the component
//! equations and then evaluates, and a numeric path, which works on the
//! sampled values. Analytic results are put in canonical form, so identities
//! such as d∘d = 0 hold exactly rather than up to rounding. Without an
//! explicit mode an operation runs analytically when all of its inputs carry
//! equations. Any input point that is masked makes the corresponding output
//! point undefined.

mod numeric;
mod ops;
mod zoom;

pub use numeric::partial;
pub use ops::{
    add, contravariant, covariant, ext_d, hodge, hodge_in_place, interior_d, scale, sub, wedge,
};
pub use zoom::{curl, deriv, div, zoom, InsetViewport, ZoomSpec, Zoomed};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Numeric,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "numeric" => Ok(Mode::Numeric),
            _ => Err(Error::invalid(format!(
                "unknown mode '{s}' (analytic or numeric)"
            ))),
        }
    }
}

pub(crate) fn resolve(mode: Option<Mode>, inputs: &[&ScalarField], op: &str) -> Result<Mode> {
    let all = inputs.iter().all(|f| f.has_expr());
    match mode {
        Some(Mode::Analytic) if !all => Err(Error::missing_expr(format!(
            "analytic {op} needs component equations on every input"
        ))),
        Some(m) => Ok(m),
        None if all => Ok(Mode::Analytic),
        None => Ok(Mode::Numeric),
    }
}
