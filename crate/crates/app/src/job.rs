//! Jobs: an object, a chain of operations, a style, optional zoom insets.
//!
//! ```json
//! {"object": {...},
//!  "ops": [{"op":"ext_d","mode":"analytic"},{"op":"hodge"},{"op":"zoom","target":[2,3],"mag":2,"dpd":7}],
//!  "style": {"max_sheets": 6},
//!  "zoom": {"target":[2,3],"mag":2,"dpd":7,"insize":0.3}}
//! ```
//!
//! The chain is type-checked on object kinds before anything is evaluated.

use crate::config::Config;
use dform_core::calculus::{self, Mode, ZoomSpec, Zoomed};
use dform_core::fields::{Grid2, Kind, Metric, Object, ObjectSpec, VectorField};
use dform_core::render::{self, PlotStyle, Scene};
use dform_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoomArgs {
    pub target: [f64; 2],
    pub mag: f64,
    pub dpd: usize,
}

impl Default for ZoomArgs {
    fn default() -> ZoomArgs {
        let d = ZoomSpec::default();
        ZoomArgs {
            target: d.target,
            mag: d.mag,
            dpd: d.dpd,
        }
    }
}

impl ZoomArgs {
    fn spec(&self) -> ZoomSpec {
        ZoomSpec {
            target: self.target,
            mag: self.mag,
            dpd: self.dpd,
            inset: false,
            ..ZoomSpec::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    ExtD {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    InteriorD {
        /// Components of the vector field; x̂ + ŷ when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<[String; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Hodge {
        #[serde(default)]
        keep_object: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Wedge {
        /// Right-hand factor; takes the current grid when it has none.
        with: ObjectSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Covariant {
        /// g_xx, g_xy, g_yx, g_yy; flat when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<[String; 4]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Contravariant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<[String; 4]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Zoom(ZoomArgs),
    Deriv(ZoomArgs),
    Div(ZoomArgs),
    Curl(ZoomArgs),
    LogScale,
    SetDensity {
        n: usize,
    },
    GiveEqn {
        comps: Vec<String>,
    },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::ExtD { .. } => "ext_d",
            Op::InteriorD { .. } => "interior_d",
            Op::Hodge { .. } => "hodge",
            Op::Wedge { .. } => "wedge",
            Op::Covariant { .. } => "covariant",
            Op::Contravariant { .. } => "contravariant",
            Op::Zoom(_) => "zoom",
            Op::Deriv(_) => "deriv",
            Op::Div(_) => "div",
            Op::Curl(_) => "curl",
            Op::LogScale => "log_scale",
            Op::SetDensity { .. } => "set_density",
            Op::GiveEqn { .. } => "give_eqn",
        }
    }
}

/// What an inset shows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum View {
    #[default]
    Zoom,
    Deriv,
    Div,
    Curl,
}

impl View {
    pub fn name(self) -> &'static str {
        match self {
            View::Zoom => "zoom",
            View::Deriv => "deriv",
            View::Div => "div",
            View::Curl => "curl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InsetJob {
    pub target: [f64; 2],
    pub mag: f64,
    pub dpd: usize,
    pub insize: f64,
    pub view: View,
}

impl Default for InsetJob {
    fn default() -> InsetJob {
        let d = ZoomSpec::default();
        InsetJob {
            target: d.target,
            mag: d.mag,
            dpd: d.dpd,
            insize: d.insize,
            view: View::Zoom,
        }
    }
}

impl InsetJob {
    pub fn spec(&self) -> ZoomSpec {
        ZoomSpec {
            target: self.target,
            mag: self.mag,
            dpd: self.dpd,
            inset: true,
            insize: self.insize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Svg,
    SceneJson,
    ValuesJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(InsetJob),
    Many(Vec<InsetJob>),
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<InsetJob>, D::Error> {
    Ok(match Option::<OneOrMany>::deserialize(d)? {
        None => Vec::new(),
        Some(OneOrMany::One(z)) => vec![z],
        Some(OneOrMany::Many(v)) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub object: ObjectSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<Op>,
    #[serde(default)]
    pub style: PlotStyle,
    /// One inset or a list of them.
    #[serde(
        default,
        skip_serializing_if = "Vec::is_empty",
        deserialize_with = "one_or_many"
    )]
    pub zoom: Vec<InsetJob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl JobSpec {
    pub fn new(object: ObjectSpec) -> JobSpec {
        JobSpec {
            object,
            ops: Vec::new(),
            style: PlotStyle::default(),
            zoom: Vec::new(),
            format: None,
        }
    }
}

/// An object's type as far as the chain checker is concerned: a form of
/// some degree (3 and up being the zero marker) or a vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Form(u8),
    Vector,
}

impl Shape {
    pub fn of_spec(spec: &ObjectSpec) -> Result<Shape> {
        Ok(match spec.kind {
            Kind::Form0 => Shape::Form(0),
            Kind::Form1 => Shape::Form(1),
            Kind::Form2 => Shape::Form(2),
            Kind::VectorField => Shape::Vector,
            Kind::Zero => match spec.degree {
                Some(d) if d > 2 => Shape::Form(d),
                _ => return Err(Error::invalid("a zero object needs a degree above 2")),
            },
        })
    }

    pub fn kind(self) -> Kind {
        match self {
            Shape::Form(0) => Kind::Form0,
            Shape::Form(1) => Kind::Form1,
            Shape::Form(2) => Kind::Form2,
            Shape::Form(_) => Kind::Zero,
            Shape::Vector => Kind::VectorField,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Shape::Form(d) if d > 2 => format!("identically zero {d}-form"),
            other => other.kind().describe().to_string(),
        }
    }

    fn zoomable(self) -> bool {
        matches!(self, Shape::Form(1) | Shape::Form(2) | Shape::Vector)
    }
}

fn transfer(op: &Op, s: Shape) -> Result<Shape> {
    let no = |msg: String| Err(Error::unsupported(msg));
    match (op, s) {
        (Op::ExtD { .. }, Shape::Form(2)) => {
            no("exterior derivative of a top-degree form is zero".into())
        }
        (Op::ExtD { .. }, Shape::Form(d)) => Ok(Shape::Form(d + 1)),
        (Op::InteriorD { .. }, Shape::Form(0)) => {
            no("interior derivative of a 0-form would have degree -1".into())
        }
        (Op::InteriorD { .. }, Shape::Form(d)) => Ok(Shape::Form(d - 1)),
        (
            Op::Hodge {
                keep_object: true, ..
            },
            Shape::Form(1),
        ) => Ok(Shape::Form(1)),
        (
            Op::Hodge {
                keep_object: true, ..
            },
            s,
        ) => no(format!(
            "keep_object needs a 1-form: the Hodge star changes the degree of a {}",
            s.describe()
        )),
        (Op::Hodge { .. }, Shape::Form(d)) if d <= 2 => Ok(Shape::Form(2 - d)),
        (Op::Wedge { with, .. }, Shape::Form(p)) => match Shape::of_spec(with)? {
            Shape::Form(q) => Ok(Shape::Form(p + q)),
            Shape::Vector => no("wedge takes forms, not a vector field".into()),
        },
        (Op::Covariant { .. }, Shape::Vector) => Ok(Shape::Form(1)),
        (Op::Contravariant { .. }, Shape::Form(1)) => Ok(Shape::Vector),
        (Op::Zoom(_), s) if s.zoomable() => Ok(s),
        (Op::Deriv(_) | Op::Div(_) | Op::Curl(_), Shape::Vector) => Ok(Shape::Vector),
        (Op::LogScale, s) if s.zoomable() => Ok(s),
        (Op::SetDensity { .. }, s) => Ok(s),
        (Op::GiveEqn { .. }, s) if s.kind() != Kind::Zero => Ok(s),
        (op, s) => no(format!(
            "{} does not apply to a {}",
            op.name(),
            s.describe()
        )),
    }
}

fn at_step(i: usize, op: &Op, e: Error) -> Error {
    let msg = format!("step {} ({}): {}", i + 1, op.name(), e);
    match e {
        Error::Parse { .. } | Error::Invalid(_) => Error::Invalid(msg),
        Error::Unsupported(_) => Error::Unsupported(msg),
        Error::MissingExpr(_) => Error::MissingExpr(msg),
        Error::Internal(_) => Error::Internal(msg),
    }
}

fn grid_size(n: usize, config: &Config) -> Result<()> {
    if n > config.max_grid {
        return Err(Error::invalid(format!(
            "grid side {n} exceeds the limit of {}",
            config.max_grid
        )));
    }
    Ok(())
}

/// Kind-checks the chain and insets without evaluating anything; returns
/// the shape after every step, starting with the input's.
pub fn check(job: &JobSpec, config: &Config) -> Result<Vec<Shape>> {
    let mut shapes = vec![Shape::of_spec(&job.object)?];
    if let Some(g) = &job.object.grid {
        grid_size(g.x.n.max(g.y.n), config)?;
    }
    for (i, op) in job.ops.iter().enumerate() {
        let next =
            transfer(op, *shapes.last().expect("non-empty")).map_err(|e| at_step(i, op, e))?;
        match op {
            Op::SetDensity { n } => grid_size(*n, config).map_err(|e| at_step(i, op, e))?,
            Op::Zoom(z) | Op::Deriv(z) | Op::Div(z) | Op::Curl(z) => {
                grid_size(z.dpd, config).map_err(|e| at_step(i, op, e))?
            }
            _ => {}
        }
        shapes.push(next);
    }
    let last = *shapes.last().expect("non-empty");
    for z in &job.zoom {
        grid_size(z.dpd, config)?;
        let ok = match z.view {
            View::Zoom => last.zoomable(),
            _ => last == Shape::Vector,
        };
        if !ok {
            return Err(Error::unsupported(format!(
                "a {} inset does not apply to a {}",
                z.view.name(),
                last.describe()
            )));
        }
    }
    Ok(shapes)
}

fn metric(g: &Option<[String; 4]>, grid: Grid2, config: &Config) -> Result<Option<Metric>> {
    let Some(g) = g else { return Ok(None) };
    let comps = g.each_ref().map(|s| s.as_str());
    let m = Metric::parse(grid, comps)?;
    let [xx, xy, yx, yy] = m
        .components()
        .map(|c| c.clone().with_threshold(config.threshold));
    Ok(Some(Metric::new(xx, xy, yx, yy)?))
}

fn apply(op: &Op, obj: &Object, config: &Config, warnings: &mut Vec<String>) -> Result<Object> {
    let grid = *obj.grid();
    let mut zoomed = |z: Zoomed| {
        warnings.extend(z.warnings);
        z.object
    };
    Ok(match op {
        Op::ExtD { mode } => calculus::ext_d(obj, *mode)?,
        Op::InteriorD { v, mode } => {
            let v = match v {
                Some([a, b]) => Some(VectorField::parse(grid, a, b)?),
                None => None,
            };
            calculus::interior_d(obj, v.as_ref(), *mode)?
        }
        Op::Hodge {
            keep_object: true,
            mode,
        } => {
            let mut out = obj.clone();
            calculus::hodge_in_place(&mut out, *mode)?;
            out
        }
        Op::Hodge { mode, .. } => calculus::hodge(obj, *mode)?,
        Op::Wedge { with, mode } => {
            let other = with.build(Some(&grid))?.with_threshold(config.threshold);
            calculus::wedge(obj, &other, *mode)?
        }
        Op::Covariant { g, mode } => {
            calculus::covariant(obj, metric(g, grid, config)?.as_ref(), *mode)?
        }
        Op::Contravariant { g, mode } => {
            calculus::contravariant(obj, metric(g, grid, config)?.as_ref(), *mode)?
        }
        Op::Zoom(z) => zoomed(calculus::zoom(obj, &z.spec())?),
        Op::Deriv(z) => zoomed(calculus::deriv(obj, &z.spec())?),
        Op::Div(z) => zoomed(calculus::div(obj, &z.spec())?),
        Op::Curl(z) => zoomed(calculus::curl(obj, &z.spec())?),
        Op::LogScale => obj.log_scale()?,
        Op::SetDensity { n } => obj.set_density(*n)?,
        Op::GiveEqn { comps } => {
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            obj.give_eqn(&refs)?
        }
    })
}

/// The result of a job before it is written out.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub object: Object,
    pub insets: Vec<(InsetJob, Zoomed)>,
    pub style: PlotStyle,
    pub warnings: Vec<String>,
}

pub fn evaluate(job: &JobSpec, config: &Config) -> Result<Evaluated> {
    let style = job.style.clone().validated()?;
    check(job, config)?;
    let mut obj = job.object.build(None)?.with_threshold(config.threshold);
    let mut warnings = Vec::new();
    for (i, op) in job.ops.iter().enumerate() {
        obj = apply(op, &obj, config, &mut warnings).map_err(|e| at_step(i, op, e))?;
    }
    let insets = job
        .zoom
        .iter()
        .map(|z| {
            let spec = z.spec();
            let out = match z.view {
                View::Zoom => calculus::zoom(&obj, &spec),
                View::Deriv => calculus::deriv(&obj, &spec),
                View::Div => calculus::div(&obj, &spec),
                View::Curl => calculus::curl(&obj, &spec),
            }?;
            warnings.extend(out.warnings.iter().cloned());
            Ok((*z, out))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluated {
        object: obj,
        insets,
        style,
        warnings,
    })
}

impl Evaluated {
    pub fn scene(&self) -> Result<Scene> {
        let mut scene = render::scene_object(&self.object, &self.style);
        for (z, out) in &self.insets {
            let child = render::scene_object(&out.object, &self.style);
            scene = render::compose_inset(scene, child, z.target, z.insize)?;
        }
        Ok(scene)
    }

    pub fn values(&self) -> Values {
        Values {
            object: self.object.to_spec(true),
            insets: self
                .insets
                .iter()
                .map(|(_, z)| z.object.to_spec(true))
                .collect(),
        }
    }

    /// The document for `format`.
    pub fn write(&self, format: Format, config: &Config) -> Result<String> {
        let json = |r: serde_json::Result<String>| r.map_err(|e| Error::Internal(e.to_string()));
        match format {
            Format::Svg => Ok(render::render_svg_with(&self.scene()?, &config.svg())),
            Format::SceneJson => json(serde_json::to_string(&self.scene()?)),
            Format::ValuesJson => json(serde_json::to_string_pretty(&self.values())),
        }
    }
}

/// Sampled values of the result and of any insets.
#[derive(Debug, Clone, Serialize)]
pub struct Values {
    #[serde(flatten)]
    pub object: ObjectSpec,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub insets: Vec<ObjectSpec>,
}

/// Parses the command-line chain syntax: ops separated by commas, each
/// followed by `:key=value` arguments, e.g.
/// `interior_d:u=0:v=1,contravariant` or `zoom:x=2:y=3:mag=2:dpd=7`.
pub fn parse_chain(src: &str) -> Result<Vec<Op>> {
    src.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_op)
        .collect()
}

struct Args<'a> {
    op: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let i = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(i).1)
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::invalid(format!("{}: '{v}' is not a valid {key}", self.op))),
        }
    }

    fn mode(&mut self) -> Result<Option<Mode>> {
        self.take("mode").map(str::parse).transpose()
    }

    fn zoom(&mut self) -> Result<ZoomArgs> {
        let d = ZoomArgs::default();
        Ok(ZoomArgs {
            target: [
                self.number("x")?.unwrap_or(d.target[0]),
                self.number("y")?.unwrap_or(d.target[1]),
            ],
            mag: self.number("mag")?.unwrap_or(d.mag),
            dpd: self.number("dpd")?.unwrap_or(d.dpd),
        })
    }

    fn comps(&mut self) -> Vec<String> {
        ["c1", "c2"]
            .iter()
            .filter_map(|k| self.take(k))
            .map(String::from)
            .collect()
    }

    fn metric(&mut self) -> Option<[String; 4]> {
        let [xx, xy, yx, yy] = ["gxx", "gxy", "gyx", "gyy"].map(|k| self.take(k));
        if [xx, xy, yx, yy].iter().all(Option::is_none) {
            return None;
        }
        let xy = xy.unwrap_or("0");
        Some([xx.unwrap_or("1"), xy, yx.unwrap_or(xy), yy.unwrap_or("1")].map(String::from))
    }

    fn done(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(Error::invalid(format!(
                "{}: unknown argument '{k}'",
                self.op
            ))),
        }
    }
}

fn parse_op(src: &str) -> Result<Op> {
    let mut parts = src.split(':');
    let name = parts.next().unwrap_or_default().trim();
    let pairs = parts
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v))
                .ok_or_else(|| Error::invalid(format!("{name}: expected key=value, got '{p}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut a = Args { op: name, pairs };
    let op = match name {
        "ext_d" => Op::ExtD { mode: a.mode()? },
        "interior_d" => {
            let v = match (a.take("u"), a.take("v")) {
                (None, None) => None,
                (Some(u), Some(v)) => Some([u.to_string(), v.to_string()]),
                _ => return Err(Error::invalid("interior_d: give both u= and v=")),
            };
            Op::InteriorD { v, mode: a.mode()? }
        }
        "hodge" => Op::Hodge {
            keep_object: match a.take("keep") {
                None | Some("false") => false,
                Some("true") => true,
                Some(v) => {
                    return Err(Error::invalid(format!(
                        "hodge: keep must be true or false, got '{v}'"
                    )))
                }
            },
            mode: a.mode()?,
        },
        "wedge" => {
            let kind: Kind = a.take("kind").unwrap_or("form1").parse()?;
            let comps = a.comps();
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            let mut with = ObjectSpec::from_exprs(kind, Grid2::square(0.0, 1.0, 2)?, &refs);
            with.grid = None;
            Op::Wedge {
                with,
                mode: a.mode()?,
            }
        }
        "covariant" => Op::Covariant {
            g: a.metric(),
            mode: a.mode()?,
        },
        "contravariant" => Op::Contravariant {
            g: a.metric(),
            mode: a.mode()?,
        },
        "zoom" => Op::Zoom(a.zoom()?),
        "deriv" => Op::Deriv(a.zoom()?),
        "div" => Op::Div(a.zoom()?),
        "curl" => Op::Curl(a.zoom()?),
        "log_scale" => Op::LogScale,
        "set_density" => Op::SetDensity {
            n: a.number("n")?
                .ok_or_else(|| Error::invalid("set_density: needs n="))?,
        },
        "give_eqn" => Op::GiveEqn { comps: a.comps() },
        other => return Err(Error::invalid(format!("unknown operation '{other}'"))),
    };
    a.done()?;
    Ok(op)
}
