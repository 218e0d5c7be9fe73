//! Object JSON.
//!
//! ```json
//! {"kind":"form1",
//!  "grid":{"x":{"min":-5,"max":5,"n":31},"y":{"min":-5,"max":5,"n":31}},
//!  "components":[{"expr":"y*sin(x)"},{"expr":"-x*cos(y)"}]}
//! ```
//!
//! A component may carry `values` instead of (or as well as) `expr`: an
//! `nx`-long array of `ny`-long rows, `null` standing for a non-finite value.
//! Output components also list their masked points.

use super::{make_field, ComponentInput, Grid2, Kind, Object, PointKind, ZeroForm};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub kind: Kind,
    /// May be omitted where a surrounding object supplies the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid2>,
    #[serde(default)]
    pub components: Vec<ComponentSpec>,
    /// Degree of a `zero` object.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<Option<f64>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mask: Vec<MaskEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskEntry {
    pub i: usize,
    pub j: usize,
    pub kind: PointKind,
}

impl ComponentSpec {
    pub fn expr(src: &str) -> ComponentSpec {
        ComponentSpec {
            expr: Some(src.to_string()),
            ..Default::default()
        }
    }

    fn flat_values(&self, grid: &Grid2) -> Result<Option<Vec<f64>>> {
        let Some(rows) = &self.values else {
            return Ok(None);
        };
        if rows.len() != grid.nx() || rows.iter().any(|r| r.len() != grid.ny()) {
            return Err(Error::invalid(format!(
                "component values must be {} rows of {}",
                grid.nx(),
                grid.ny()
            )));
        }
        let mut flat: Vec<f64> = rows
            .iter()
            .flatten()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect();
        // JSON has no infinities; a null listed as infinite in the mask is one
        for m in &self.mask {
            if m.kind == PointKind::Infinite && m.i < grid.nx() && m.j < grid.ny() {
                let k = grid.index(m.i, m.j);
                if flat[k].is_nan() {
                    flat[k] = f64::INFINITY;
                }
            }
        }
        Ok(Some(flat))
    }
}

impl ObjectSpec {
    pub fn from_exprs(kind: Kind, grid: Grid2, exprs: &[&str]) -> ObjectSpec {
        ObjectSpec {
            kind,
            grid: Some(grid),
            components: exprs.iter().map(|s| ComponentSpec::expr(s)).collect(),
            degree: None,
        }
    }

    /// Builds the object; `fallback` is used when the spec has no grid.
    pub fn build(&self, fallback: Option<&Grid2>) -> Result<Object> {
        let grid = match (&self.grid, fallback) {
            (Some(g), _) => Grid2::new(g.x, g.y)?,
            (None, Some(g)) => *g,
            (None, None) => return Err(Error::invalid("object is missing its grid")),
        };
        if self.kind == Kind::Zero {
            let degree = self
                .degree
                .ok_or_else(|| Error::invalid("a zero object needs its degree"))?;
            return Ok(Object::Zero(ZeroForm { degree, grid }));
        }
        let comps = self
            .components
            .iter()
            .map(|c| {
                let values = c.flat_values(&grid)?;
                match (&c.expr, values) {
                    (Some(e), Some(v)) => Ok(ComponentInput::Both(e.clone(), v)),
                    (Some(e), None) => Ok(ComponentInput::Expr(e.clone())),
                    (None, Some(v)) => Ok(ComponentInput::Values(v)),
                    (None, None) => Err(Error::invalid("a component needs an expr or values")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        make_field(self.kind, grid, comps)
    }
}

impl Object {
    /// JSON description; with `values`, every component carries its sampled
    /// values and mask.
    pub fn to_spec(&self, values: bool) -> ObjectSpec {
        let grid = *self.grid();
        let components = self
            .components()
            .into_iter()
            .map(|c| {
                let mut spec = ComponentSpec {
                    expr: c.expr().map(|e| e.to_string()),
                    ..Default::default()
                };
                if values || c.expr().is_none() {
                    spec.values = Some(
                        c.values()
                            .chunks(grid.ny())
                            .map(|row| row.iter().map(|&v| v.is_finite().then_some(v)).collect())
                            .collect(),
                    );
                    spec.mask = c
                        .mask()
                        .iter()
                        .enumerate()
                        .filter(|(_, k)| k.is_masked())
                        .map(|(idx, &kind)| MaskEntry {
                            i: idx / grid.ny(),
                            j: idx % grid.ny(),
                            kind,
                        })
                        .collect();
                }
                spec
            })
            .collect();
        ObjectSpec {
            kind: self.kind(),
            grid: Some(grid),
            components,
            degree: match self {
                Object::Zero(z) => Some(z.degree),
                _ => None,
            },
        }
    }
}
