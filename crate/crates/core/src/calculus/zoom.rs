use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::fields::{Axis, Grid2, Object, ScalarField, VectorField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoomSpec {
    pub target: [f64; 2],
    pub mag: f64,
    /// Points per side of the zoomed grid.
    pub dpd: usize,
    pub inset: bool,
    /// Inset size as a fraction of the parent plot.
    pub insize: f64,
}

impl Default for ZoomSpec {
    fn default() -> ZoomSpec {
        ZoomSpec {
            target: [0.0, 0.0],
            mag: 2.0,
            dpd: 9,
            inset: true,
            insize: 0.3,
        }
    }
}

impl ZoomSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.target.iter().all(|t| t.is_finite()) {
            return Err(Error::invalid("zoom target must be finite"));
        }
        if !(self.mag.is_finite() && self.mag >= 1.0) {
            return Err(Error::invalid(format!(
                "mag must be a finite number >= 1, got {}",
                self.mag
            )));
        }
        if self.dpd < 2 {
            return Err(Error::invalid(format!(
                "dpd must be at least 2, got {}",
                self.dpd
            )));
        }
        if !(self.insize > 0.0 && self.insize <= 1.0) {
            return Err(Error::invalid(format!(
                "insize must lie in (0, 1], got {}",
                self.insize
            )));
        }
        Ok(())
    }

    /// The zoomed grid, centred on the target: the parent's half-extents
    /// times `insize / mag`, so an inset at `mag` 1 is drawn at the parent's
    /// scale. Without an inset the factor is `1 / mag`.
    pub fn window(&self, parent: &Grid2) -> Result<Grid2> {
        let scale = if self.inset { self.insize } else { 1.0 } / self.mag;
        let axis = |a: &Axis, t: f64| {
            let r = a.half_extent() * scale;
            Axis::new(t - r, t + r, self.dpd)
        };
        Grid2::new(
            axis(&parent.x, self.target[0])?,
            axis(&parent.y, self.target[1])?,
        )
    }
}

/// Where the inset sits in the parent plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsetViewport {
    /// Target position as fractions of the parent's x and y ranges.
    pub anchor: [f64; 2],
    pub size: f64,
    /// Region of the plane shown in the inset.
    pub window: Grid2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Zoomed {
    pub object: Object,
    /// Present when the spec asks for an inset.
    pub inset: Option<InsetViewport>,
    pub warnings: Vec<String>,
}

fn zoom_parts(
    obj: &Object,
    spec: &ZoomSpec,
    op: &str,
) -> Result<(Grid2, Option<InsetViewport>, Vec<String>)> {
    spec.validate()?;
    match obj {
        Object::Form1(_) | Object::Form2(_) | Object::Vector(_) => {}
        other => {
            return Err(Error::unsupported(format!(
                "{op} applies to 1-forms, 2-forms and vector fields, not a {}",
                other.kind().describe()
            )))
        }
    }
    if !obj.has_exprs() {
        return Err(Error::missing_expr(format!(
            "{op} needs component equations; attach them with give_eqn"
        )));
    }
    let parent = obj.grid();
    let window = spec.window(parent)?;
    let [tx, ty] = spec.target;
    let mut warnings = Vec::new();
    if !parent.contains(tx, ty) {
        warnings.push(format!(
            "zoom target ({tx}, {ty}) lies outside the plotted region"
        ));
    }
    let inset = spec.inset.then(|| InsetViewport {
        anchor: [
            (tx - parent.x.min) / (parent.x.max - parent.x.min),
            (ty - parent.y.min) / (parent.y.max - parent.y.min),
        ],
        size: spec.insize,
        window,
    });
    Ok((window, inset, warnings))
}

/// The object re-evaluated from its equations over the zoom window.
pub fn zoom(obj: &Object, spec: &ZoomSpec) -> Result<Zoomed> {
    let (window, inset, warnings) = zoom_parts(obj, spec, "zoom")?;
    let comps = obj
        .components()
        .into_iter()
        .map(|c| Ok(c.resample(window)?.with_threshold(c.threshold())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Zoomed {
        object: Object::from_components(obj.kind(), comps)?,
        inset,
        warnings,
    })
}

fn vector_parts(obj: &Object, op: &str) -> Result<(Expr, Expr, f64)> {
    match obj {
        Object::Vector(vf) if vf.u().has_expr() && vf.v().has_expr() => Ok((
            vf.u().expr().cloned().expect("checked"),
            vf.v().expr().cloned().expect("checked"),
            vf.u().threshold(),
        )),
        Object::Vector(_) => Err(Error::missing_expr(format!(
            "{op} needs component equations; attach them with give_eqn"
        ))),
        other => Err(Error::unsupported(format!(
            "{op} applies to vector fields, not a {}",
            other.kind().describe()
        ))),
    }
}

/// Local change of a vector field about the target: D(p) = F(p) − F(p₀)
/// over the zoom window.
pub fn deriv(obj: &Object, spec: &ZoomSpec) -> Result<Zoomed> {
    let (u, v, threshold) = vector_parts(obj, "deriv")?;
    let (window, inset, warnings) = zoom_parts(obj, spec, "deriv")?;
    let [tx, ty] = spec.target;
    let field = |e: Expr| {
        let c = e.eval(tx, ty);
        ScalarField::from_expr(window, expr::sub(e, Expr::Const(c))).with_threshold(threshold)
    };
    let object = Object::Vector(VectorField::new(field(u), field(v))?);
    Ok(Zoomed {
        object,
        inset,
        warnings,
    })
}

/// Projects D(p) onto the direction `dir(p − p₀)`; zero at the target.
fn project(d: &Zoomed, target: [f64; 2], dir: impl Fn(f64, f64) -> (f64, f64)) -> Result<Zoomed> {
    let Object::Vector(vf) = &d.object else {
        return Err(Error::Internal(
            "deriv did not return a vector field".into(),
        ));
    };
    let grid = *vf.grid();
    let (du, dv) = (vf.u().values(), vf.v().values());
    let mut u = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    for (k, (x, y)) in grid.points().into_iter().enumerate() {
        let (ex, ey) = dir(x - target[0], y - target[1]);
        let nn = ex * ex + ey * ey;
        if nn == 0.0 {
            u.push(0.0);
            v.push(0.0);
            continue;
        }
        let s = (du[k] * ex + dv[k] * ey) / nn;
        u.push(s * ex);
        v.push(s * ey);
    }
    let inputs = [vf.u(), vf.v()];
    let object = Object::Vector(VectorField::new(
        ScalarField::derived(grid, u, None, &inputs),
        ScalarField::derived(grid, v, None, &inputs),
    )?);
    Ok(Zoomed {
        object,
        inset: d.inset,
        warnings: d.warnings.clone(),
    })
}

/// Radial part of [`deriv`]: (D·r̂) r̂ with r̂ pointing away from the target.
pub fn div(obj: &Object, spec: &ZoomSpec) -> Result<Zoomed> {
    project(&deriv(obj, spec)?, spec.target, |dx, dy| (dx, dy))
}

/// Tangential part of [`deriv`]: (D·t̂) t̂ with t̂ = r̂ turned a quarter
/// counter-clockwise.
pub fn curl(obj: &Object, spec: &ZoomSpec) -> Result<Zoomed> {
    project(&deriv(obj, spec)?, spec.target, |dx, dy| (-dy, dx))
}
