use crate::fields::{Grid2, PointKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Viewport {
    pub fn of_grid(g: &Grid2) -> Viewport {
        Viewport {
            x: [g.x.min, g.x.max],
            y: [g.y.min, g.y.max],
        }
    }

    pub fn width(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn height(&self) -> f64 {
        self.y[1] - self.y[0]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (self.x[0]..=self.x[1]).contains(&p[0]) && (self.y[0]..=self.y[1]).contains(&p[1])
    }
}

/// Renderer-agnostic picture in plot units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub viewport: Viewport,
    /// The blank border is the plot size divided by this.
    pub surround: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub primitives: Vec<Primitive>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Primitive {
    /// `n` parallel sheets of length `len` perpendicular to `angle`.
    Stack {
        p: [f64; 2],
        angle: f64,
        n: usize,
        len: f64,
        head: bool,
        /// Arrowhead base and height, plot units.
        head_w: f64,
        head_h: f64,
        color: String,
    },
    Arrow {
        p: [f64; 2],
        /// Unit direction.
        d: [f64; 2],
        len: f64,
        color: String,
    },
    /// `n` nested squares; the k-th has side `size * k / of`.
    Block {
        p: [f64; 2],
        n: usize,
        of: usize,
        size: f64,
        color: String,
    },
    Poly {
        pts: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        color: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        font: Option<u32>,
    },
    Marker {
        p: [f64; 2],
        kind: PointKind,
    },
    /// Child scene drawn in the box `[x0, y0, x1, y1]` of the parent.
    Inset {
        anchor: [f64; 2],
        size: f64,
        #[serde(rename = "box")]
        bounds: [f64; 4],
        scene: Box<Scene>,
    },
}

impl Primitive {
    pub fn tag(&self) -> &'static str {
        match self {
            Primitive::Stack { .. } => "stack",
            Primitive::Arrow { .. } => "arrow",
            Primitive::Block { .. } => "block",
            Primitive::Poly { .. } => "poly",
            Primitive::Marker { .. } => "marker",
            Primitive::Inset { .. } => "inset",
        }
    }
}

impl Scene {
    pub fn new(viewport: Viewport, surround: f64) -> Scene {
        Scene {
            viewport,
            surround,
            note: None,
            primitives: Vec::new(),
        }
    }

    pub fn markers(&self) -> impl Iterator<Item = ([f64; 2], PointKind)> + '_ {
        self.primitives.iter().filter_map(|p| match p {
            Primitive::Marker { p, kind } => Some((*p, *kind)),
            _ => None,
        })
    }

    pub fn insets(&self) -> impl Iterator<Item = &Scene> + '_ {
        self.primitives.iter().filter_map(|p| match p {
            Primitive::Inset { scene, .. } => Some(scene.as_ref()),
            _ => None,
        })
    }
}
