use super::{Grid2, ScalarField};
use crate::error::{Error, Result};
use crate::expr::{Expr, ParseError};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "form0")]
    Form0,
    #[serde(rename = "form1")]
    Form1,
    #[serde(rename = "form2")]
    Form2,
    #[serde(rename = "vf")]
    VectorField,
    /// Identically zero form of degree above 2.
    #[serde(rename = "zero")]
    Zero,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Form0 => "form0",
            Kind::Form1 => "form1",
            Kind::Form2 => "form2",
            Kind::VectorField => "vf",
            Kind::Zero => "zero",
        }
    }

    pub fn component_count(self) -> usize {
        match self {
            Kind::Form0 | Kind::Form2 => 1,
            Kind::Form1 | Kind::VectorField => 2,
            Kind::Zero => 0,
        }
    }

    /// Form degree; `None` for vector fields.
    pub fn degree(self) -> Option<u8> {
        match self {
            Kind::Form0 => Some(0),
            Kind::Form1 => Some(1),
            Kind::Form2 => Some(2),
            Kind::VectorField | Kind::Zero => None,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Kind::Form0 => "0-form",
            Kind::Form1 => "1-form",
            Kind::Form2 => "2-form",
            Kind::VectorField => "vector field",
            Kind::Zero => "zero form",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "form0" => Ok(Kind::Form0),
            "form1" => Ok(Kind::Form1),
            "form2" => Ok(Kind::Form2),
            "vf" => Ok(Kind::VectorField),
            _ => Err(Error::invalid(format!(
                "unknown kind '{s}' (expected form0, form1, form2 or vf)"
            ))),
        }
    }
}

fn same_grid(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::invalid("components must share one grid"));
    }
    Ok(())
}

/// A function φ(x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct Form0 {
    phi: ScalarField,
}

/// α₁ dx + α₂ dy.
#[derive(Debug, Clone, PartialEq)]
pub struct Form1 {
    dx: ScalarField,
    dy: ScalarField,
}

/// w dx∧dy; positive w is counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Form2 {
    w: ScalarField,
}

/// u x̂ + v ŷ.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    u: ScalarField,
    v: ScalarField,
}

/// Stand-in for a form of degree 3 or more, which vanishes on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroForm {
    pub degree: u8,
    pub grid: Grid2,
}

impl Form0 {
    pub fn new(phi: ScalarField) -> Form0 {
        Form0 { phi }
    }

    pub fn parse(grid: Grid2, phi: &str) -> Result<Form0> {
        Ok(Form0::new(ScalarField::parse(grid, phi)?))
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn grid(&self) -> &Grid2 {
        self.phi.grid()
    }
}

impl Form1 {
    pub fn new(dx: ScalarField, dy: ScalarField) -> Result<Form1> {
        same_grid(&dx, &dy)?;
        Ok(Form1 { dx, dy })
    }

    pub fn parse(grid: Grid2, dx: &str, dy: &str) -> Result<Form1> {
        let a = ScalarField::parse(grid, dx).map_err(|e| at_component(e, 0))?;
        let b = ScalarField::parse(grid, dy).map_err(|e| at_component(e, 1))?;
        Form1::new(a, b)
    }

    pub fn dx(&self) -> &ScalarField {
        &self.dx
    }

    pub fn dy(&self) -> &ScalarField {
        &self.dy
    }

    pub fn grid(&self) -> &Grid2 {
        self.dx.grid()
    }

    /// Replaces both components, keeping this object (the in-place variant
    /// of operations that preserve degree).
    pub fn replace(&mut self, other: Form1) {
        *self = other;
    }
}

impl Form2 {
    pub fn new(w: ScalarField) -> Form2 {
        Form2 { w }
    }

    pub fn parse(grid: Grid2, w: &str) -> Result<Form2> {
        Ok(Form2::new(ScalarField::parse(grid, w)?))
    }

    pub fn w(&self) -> &ScalarField {
        &self.w
    }

    pub fn grid(&self) -> &Grid2 {
        self.w.grid()
    }
}

impl VectorField {
    pub fn new(u: ScalarField, v: ScalarField) -> Result<VectorField> {
        same_grid(&u, &v)?;
        Ok(VectorField { u, v })
    }

    pub fn parse(grid: Grid2, u: &str, v: &str) -> Result<VectorField> {
        let a = ScalarField::parse(grid, u).map_err(|e| at_component(e, 0))?;
        let b = ScalarField::parse(grid, v).map_err(|e| at_component(e, 1))?;
        VectorField::new(a, b)
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn v(&self) -> &ScalarField {
        &self.v
    }

    pub fn grid(&self) -> &Grid2 {
        self.u.grid()
    }
}

fn at_component(e: Error, i: usize) -> Error {
    match e {
        Error::Parse { error, .. } => Error::Parse {
            component: Some(i),
            error,
        },
        other => other,
    }
}

fn parse_component(src: &str, i: usize) -> Result<Expr> {
    src.parse::<Expr>()
        .map_err(|error: ParseError| Error::Parse {
            component: Some(i),
            error,
        })
}

/// Any of the geometric objects.
#[derive(Debug, Clone, PartialEq)]
pub enum Object {
    Form0(Form0),
    Form1(Form1),
    Form2(Form2),
    Vector(VectorField),
    Zero(ZeroForm),
}

/// How one component is supplied to [`make_field`].
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentInput {
    Expr(String),
    Values(Vec<f64>),
    /// Both given: the values are kept and the equation attached.
    Both(String, Vec<f64>),
}

/// Builds an object of `kind` from its components.
pub fn make_field(kind: Kind, grid: Grid2, comps: Vec<ComponentInput>) -> Result<Object> {
    if kind == Kind::Zero {
        return Err(Error::invalid(
            "zero forms are produced by wedge, not constructed",
        ));
    }
    if comps.is_empty() {
        return Err(Error::invalid(format!(
            "a {} needs component equations or values",
            kind.describe()
        )));
    }
    if comps.len() != kind.component_count() {
        return Err(Error::invalid(format!(
            "a {} has {} component(s), got {}",
            kind.describe(),
            kind.component_count(),
            comps.len()
        )));
    }
    let fields = comps
        .into_iter()
        .enumerate()
        .map(|(i, c)| match c {
            ComponentInput::Expr(s) => Ok(ScalarField::from_expr(grid, parse_component(&s, i)?)),
            ComponentInput::Values(v) => ScalarField::from_values(grid, v),
            ComponentInput::Both(s, v) => {
                ScalarField::with_values_and_expr(grid, v, parse_component(&s, i)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Object::from_components(kind, fields)
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Form0(_) => Kind::Form0,
            Object::Form1(_) => Kind::Form1,
            Object::Form2(_) => Kind::Form2,
            Object::Vector(_) => Kind::VectorField,
            Object::Zero(_) => Kind::Zero,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        match self {
            Object::Form0(f) => f.grid(),
            Object::Form1(f) => f.grid(),
            Object::Form2(f) => f.grid(),
            Object::Vector(f) => f.grid(),
            Object::Zero(z) => &z.grid,
        }
    }

    pub fn components(&self) -> Vec<&ScalarField> {
        match self {
            Object::Form0(f) => vec![&f.phi],
            Object::Form1(f) => vec![&f.dx, &f.dy],
            Object::Form2(f) => vec![&f.w],
            Object::Vector(f) => vec![&f.u, &f.v],
            Object::Zero(_) => vec![],
        }
    }

    pub fn from_components(kind: Kind, mut comps: Vec<ScalarField>) -> Result<Object> {
        if comps.len() != kind.component_count() {
            return Err(Error::Internal(format!(
                "{} built from {} components",
                kind.describe(),
                comps.len()
            )));
        }
        Ok(match kind {
            Kind::Form0 => Object::Form0(Form0::new(comps.remove(0))),
            Kind::Form2 => Object::Form2(Form2::new(comps.remove(0))),
            Kind::Form1 => {
                let b = comps.remove(1);
                Object::Form1(Form1::new(comps.remove(0), b)?)
            }
            Kind::VectorField => {
                let b = comps.remove(1);
                Object::Vector(VectorField::new(comps.remove(0), b)?)
            }
            Kind::Zero => return Err(Error::Internal("zero form has no components".into())),
        })
    }

    fn map_components(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Object> {
        if let Object::Zero(z) = self {
            return Ok(Object::Zero(z.clone()));
        }
        let comps = self
            .components()
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Object::from_components(self.kind(), comps)
    }

    /// Whether every component carries an equation.
    pub fn has_exprs(&self) -> bool {
        self.components().iter().all(|c| c.has_expr())
    }

    /// Attaches equations and re-evaluates every component from them.
    pub fn give_eqn(&self, exprs: &[&str]) -> Result<Object> {
        let kind = self.kind();
        if exprs.len() != kind.component_count() {
            return Err(Error::invalid(format!(
                "a {} takes {} equation(s), got {}",
                kind.describe(),
                kind.component_count(),
                exprs.len()
            )));
        }
        let parsed = exprs
            .iter()
            .enumerate()
            .map(|(i, s)| parse_component(s, i))
            .collect::<Result<Vec<_>>>()?;
        let comps = self
            .components()
            .into_iter()
            .zip(parsed)
            .map(|(c, e)| c.give_eqn(e))
            .collect();
        Object::from_components(kind, comps)
    }

    /// Re-evaluates on an `n`×`n` grid over the same extent.
    pub fn set_density(&self, n: usize) -> Result<Object> {
        self.set_density2(n, n)
    }

    /// Re-evaluates on an `nx`×`ny` grid over the same extent.
    pub fn set_density2(&self, nx: usize, ny: usize) -> Result<Object> {
        if !self.has_exprs() {
            return Err(Error::missing_expr(
                "set_density only works on objects with component equations",
            ));
        }
        let grid = self.grid().with_density(nx, ny)?;
        if let Object::Zero(z) = self {
            return Ok(Object::Zero(ZeroForm {
                degree: z.degree,
                grid,
            }));
        }
        self.map_components(|c| c.resample(grid))
    }

    /// Same components, classified against another singularity threshold.
    pub fn with_threshold(&self, threshold: f64) -> Object {
        self.map_components(|c| Ok(c.clone().with_threshold(threshold)))
            .expect("components unchanged")
    }

    /// Logarithmic magnitude scaling: every unmasked vector (or weight) keeps
    /// its direction (sign) and gets magnitude log10(1 + m). Equations are
    /// dropped since the values no longer follow them.
    pub fn log_scale(&self) -> Result<Object> {
        match self {
            Object::Form1(f) => {
                let (a, b) = log_scale_pair(&f.dx, &f.dy)?;
                Ok(Object::Form1(Form1::new(a, b)?))
            }
            Object::Vector(f) => {
                let (a, b) = log_scale_pair(&f.u, &f.v)?;
                Ok(Object::Vector(VectorField::new(a, b)?))
            }
            Object::Form2(f) => {
                let values =
                    f.w.values()
                        .iter()
                        .zip(f.w.mask())
                        .map(|(&w, k)| {
                            if k.is_masked() || w == 0.0 {
                                w
                            } else {
                                w.signum() * w.abs().ln_1p() / std::f64::consts::LN_10
                            }
                        })
                        .collect();
                let w =
                    ScalarField::from_values(*f.grid(), values)?.with_threshold(f.w.threshold());
                Ok(Object::Form2(Form2::new(w)))
            }
            other => Err(Error::unsupported(format!(
                "log scaling applies to 1-forms, 2-forms and vector fields, not a {}",
                other.kind().describe()
            ))),
        }
    }
}

fn log_scale_pair(a: &ScalarField, b: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let n = a.values().len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        let (x, y) = (a.values()[k], b.values()[k]);
        let masked = a.mask()[k].is_masked() || b.mask()[k].is_masked();
        let m = (x * x + y * y).sqrt();
        if masked || m == 0.0 {
            u.push(x);
            v.push(y);
        } else {
            let s = m.ln_1p() / std::f64::consts::LN_10 / m;
            u.push(x * s);
            v.push(y * s);
        }
    }
    let grid = *a.grid();
    let t = a.threshold();
    Ok((
        ScalarField::from_values(grid, u)?.with_threshold(t),
        ScalarField::from_values(grid, v)?.with_threshold(t),
    ))
}
