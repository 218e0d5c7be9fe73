use super::contour::contour;
use super::fmt_num;
use super::scene::{Primitive, Scene, Viewport};
use super::style::{Levels, PlotStyle, FORM1_COLOR, LINE_COLOR};
use crate::error::{Error, Result};
use crate::fields::{Form0, Form1, Form2, Grid2, Object, PointKind, ScalarField, VectorField};

/// Slack under the exact ratio, so that rescaling a field (which perturbs
/// m / m_max by a few ulps) cannot push a count over an integer boundary.
const COUNT_SLACK: f64 = 1e-9;

/// Relative count in `1..=max` for `m > 0`, 0 for `m == 0`.
pub fn relative_count(max: usize, m: f64, m_max: f64) -> usize {
    if m == 0.0 || m_max == 0.0 {
        return 0;
    }
    let c = (max as f64 * (m / m_max) - COUNT_SLACK).ceil();
    (c as usize).clamp(1, max)
}

/// An undefined component beats an infinite one.
fn marker_kind(kinds: &[PointKind]) -> Option<PointKind> {
    if kinds.contains(&PointKind::Undefined) {
        Some(PointKind::Undefined)
    } else if kinds.contains(&PointKind::Infinite) {
        Some(PointKind::Infinite)
    } else {
        None
    }
}

fn masks(comps: &[&ScalarField]) -> Vec<Option<PointKind>> {
    let n = comps[0].values().len();
    (0..n)
        .map(|k| marker_kind(&comps.iter().map(|c| c.mask()[k]).collect::<Vec<_>>()))
        .collect()
}

fn largest(m: &[f64], masks: &[Option<PointKind>]) -> f64 {
    m.iter()
        .zip(masks)
        .filter(|(_, k)| k.is_none())
        .fold(0.0, |acc, (&v, _)| acc.max(v))
}

fn cell(g: &Grid2) -> f64 {
    g.x.spacing().min(g.y.spacing())
}

fn pair(a: &ScalarField, b: &ScalarField, log: bool) -> (Vec<f64>, Vec<f64>) {
    // log scaling keeps masks and directions; see Object::log_scale
    let obj = Object::Form1(Form1::new(a.clone(), b.clone()).expect("same grid"));
    let obj = if log {
        obj.log_scale().expect("1-forms scale")
    } else {
        obj
    };
    let c = obj.components();
    (c[0].values().to_vec(), c[1].values().to_vec())
}

/// Stacks: sheet count relative to the largest magnitude, sheets
/// perpendicular to (α₁, α₂).
pub fn scene_form1(form: &Form1, style: &PlotStyle) -> Scene {
    let g = form.grid();
    let vp = Viewport::of_grid(g);
    let mut scene = Scene::new(vp, style.surround);
    let mask = masks(&[form.dx(), form.dy()]);
    let (a, b) = pair(form.dx(), form.dy(), style.log_scaling);
    let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect();
    let m_max = largest(&m, &mask);
    let len = style.sheet_size * vp.width();
    let color = style.color_or(FORM1_COLOR);
    for (k, (x, y)) in g.points().into_iter().enumerate() {
        scene.primitives.push(match mask[k] {
            Some(kind) => Primitive::Marker { p: [x, y], kind },
            None => Primitive::Stack {
                p: [x, y],
                angle: b[k].atan2(a[k]),
                n: relative_count(style.max_sheets, m[k], m_max),
                len,
                head: style.arrowheads,
                head_w: style.head_width * len,
                head_h: style.head_height * len,
                color: color.clone(),
            },
        });
    }
    scene
}

/// Quiver plot, autoscaled so the longest arrow nearly spans a grid cell.
pub fn scene_vf(vf: &VectorField, style: &PlotStyle) -> Scene {
    let g = vf.grid();
    let mut scene = Scene::new(Viewport::of_grid(g), style.surround);
    let mask = masks(&[vf.u(), vf.v()]);
    let (u, v) = pair(vf.u(), vf.v(), style.log_scaling);
    let m: Vec<f64> = u.iter().zip(&v).map(|(x, y)| x.hypot(*y)).collect();
    let m_max = largest(&m, &mask);
    let full = 0.9 * cell(g);
    let color = style.color_or(LINE_COLOR);
    for (k, (x, y)) in g.points().into_iter().enumerate() {
        scene.primitives.push(match mask[k] {
            Some(kind) => Primitive::Marker { p: [x, y], kind },
            None => {
                let (d, len) = if m[k] == 0.0 {
                    ([1.0, 0.0], 0.0)
                } else {
                    ([u[k] / m[k], v[k] / m[k]], full * (m[k] / m_max))
                };
                Primitive::Arrow {
                    p: [x, y],
                    d,
                    len,
                    color: color.clone(),
                }
            }
        });
    }
    scene
}

/// Blocks of nested squares; the count follows |w|, the colour its sign.
pub fn scene_form2(form: &Form2, style: &PlotStyle) -> Scene {
    let g = form.grid();
    let mut scene = Scene::new(Viewport::of_grid(g), style.surround);
    let w_field = form.w();
    let mask = masks(&[w_field]);
    let obj = Object::Form2(form.clone());
    let scaled = if style.log_scaling {
        obj.log_scale().expect("2-forms scale")
    } else {
        obj
    };
    let w = scaled.components()[0].values().to_vec();
    let m: Vec<f64> = w.iter().map(|v| v.abs()).collect();
    let m_max = largest(&m, &mask);
    let size = 0.9 * cell(g);
    for (k, (x, y)) in g.points().into_iter().enumerate() {
        scene.primitives.push(match mask[k] {
            Some(kind) => Primitive::Marker { p: [x, y], kind },
            None => {
                let (n, color) = if w[k] > 0.0 {
                    (
                        relative_count(style.max_sheets, m[k], m_max),
                        &style.palette[0],
                    )
                } else if w[k] < 0.0 {
                    (
                        relative_count(style.max_sheets, m[k], m_max),
                        &style.palette[1],
                    )
                } else {
                    (1, &style.palette[2])
                };
                Primitive::Block {
                    p: [x, y],
                    n,
                    of: style.max_sheets,
                    size,
                    color: color.clone(),
                }
            }
        });
    }
    scene
}

/// The contour values for `levels` over the finite, unmasked range of `f`;
/// empty when that range is a single value.
pub fn contour_levels(f: &ScalarField, levels: &Levels) -> Vec<f64> {
    let (lo, hi) = f
        .values()
        .iter()
        .zip(f.mask())
        .filter(|(_, k)| !k.is_masked())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| {
            (lo.min(v), hi.max(v))
        });
    if lo >= hi {
        return Vec::new();
    }
    match levels {
        Levels::Count(k) => (1..=*k)
            .map(|i| lo + (hi - lo) * (i as f64 / (*k + 1) as f64))
            .collect(),
        Levels::Values(v) => v.clone(),
    }
}

/// Level lines by marching squares, then markers for masked points.
pub fn scene_form0(form: &Form0, style: &PlotStyle) -> Scene {
    let phi = form.phi();
    let g = phi.grid();
    let mut scene = Scene::new(Viewport::of_grid(g), style.surround);
    let color = style.color_or(LINE_COLOR);
    for level in contour_levels(phi, &style.levels) {
        for pts in contour(phi, level) {
            scene.primitives.push(Primitive::Poly {
                pts,
                label: style.labels.then(|| fmt_num(level, 6)),
                color: color.clone(),
                font: style.labels.then_some(style.font_size),
            });
        }
    }
    for (k, (x, y)) in g.points().into_iter().enumerate() {
        if let Some(kind) = marker_kind(&[phi.mask()[k]]) {
            scene.primitives.push(Primitive::Marker { p: [x, y], kind });
        }
    }
    scene
}

pub fn scene_object(obj: &Object, style: &PlotStyle) -> Scene {
    match obj {
        Object::Form0(f) => scene_form0(f, style),
        Object::Form1(f) => scene_form1(f, style),
        Object::Form2(f) => scene_form2(f, style),
        Object::Vector(f) => scene_vf(f, style),
        Object::Zero(z) => {
            let mut s = Scene::new(Viewport::of_grid(&z.grid), style.surround);
            s.note = Some(format!("identically zero {}-form", z.degree));
            s
        }
    }
}

/// Embeds `child` in a box of side `insize` times the parent's, centred on
/// `anchor` and pushed back inside the parent where it would overhang.
pub fn compose_inset(
    mut parent: Scene,
    child: Scene,
    anchor: [f64; 2],
    insize: f64,
) -> Result<Scene> {
    if !(insize > 0.0 && insize <= 1.0) {
        return Err(Error::invalid(format!(
            "insize must lie in (0, 1], got {insize}"
        )));
    }
    let vp = parent.viewport;
    if !vp.contains(anchor) {
        return Err(Error::invalid(format!(
            "inset anchor ({}, {}) lies outside the plot",
            anchor[0], anchor[1]
        )));
    }
    let (w, h) = (insize * vp.width(), insize * vp.height());
    let x0 = (anchor[0] - 0.5 * w).clamp(vp.x[0], vp.x[1] - w);
    let y0 = (anchor[1] - 0.5 * h).clamp(vp.y[0], vp.y[1] - h);
    parent.primitives.push(Primitive::Inset {
        anchor,
        size: insize,
        bounds: [x0, y0, x0 + w, y0 + h],
        scene: Box::new(child),
    });
    Ok(parent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2 {
        Grid2::square(-5.0, 5.0, 11).unwrap()
    }

    fn stacks(s: &Scene) -> Vec<(f64, usize)> {
        s.primitives
            .iter()
            .filter_map(|p| match p {
                Primitive::Stack { angle, n, .. } => Some((*angle, *n)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn constant_form_is_uniform() {
        let f = Form1::parse(grid(), "1", "0").unwrap();
        let s = scene_form1(&f, &PlotStyle::default());
        let st = stacks(&s);
        assert_eq!(st.len(), 121);
        assert!(st.iter().all(|&(a, n)| a == 0.0 && n == 5));
    }

    #[test]
    fn counts_use_ceil() {
        assert_eq!(relative_count(5, 0.0, 1.0), 0);
        assert_eq!(relative_count(5, 1e-12, 1.0), 1);
        assert_eq!(relative_count(5, 0.4, 1.0), 2);
        assert_eq!(relative_count(5, 0.41, 1.0), 3);
        assert_eq!(relative_count(5, 1.0, 1.0), 5);
        assert_eq!(relative_count(6, 0.5, 1.0), 3);
    }

    #[test]
    fn yukawa_derivative_has_one_grey_square() {
        let g = Grid2::square(-5.0, 5.0, 27).unwrap();
        let phi = Object::Form0(Form0::parse(g, "exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)").unwrap());
        let d = crate::calculus::ext_d(&phi, None).unwrap();
        let s = scene_object(&d, &PlotStyle::default());
        let m: Vec<_> = s.markers().collect();
        assert_eq!(m, [([0.0, 0.0], PointKind::Undefined)]);
    }

    #[test]
    fn form2_colours() {
        let f = Form2::parse(grid(), "x").unwrap();
        let s = scene_form2(&f, &PlotStyle::default());
        for p in &s.primitives {
            let Primitive::Block { p, n, color, .. } = p else {
                panic!()
            };
            let want = if p[0] > 0.0 {
                "red"
            } else if p[0] < 0.0 {
                "blue"
            } else {
                "grey"
            };
            assert_eq!(color, want);
            if p[0].abs() == 5.0 {
                assert_eq!(*n, 5);
            }
        }
        let z = Form2::parse(grid(), "0").unwrap();
        let s = scene_form2(&z, &PlotStyle::default());
        assert!(s
            .primitives
            .iter()
            .all(|p| matches!(p, Primitive::Block { n: 1, color, .. } if color == "grey")));
    }

    #[test]
    fn infinite_points_are_red_circles() {
        let f = Form2::parse(grid(), "1/x").unwrap();
        let s = scene_form2(&f, &PlotStyle::default());
        let m: Vec<_> = s.markers().collect();
        assert_eq!(m.len(), 11);
        assert!(m
            .iter()
            .all(|(p, k)| p[0] == 0.0 && *k == PointKind::Infinite));
    }

    #[test]
    fn contour_levels_spacing() {
        let f = ScalarField::parse(grid(), "x").unwrap();
        assert_eq!(
            contour_levels(&f, &Levels::Count(4)),
            [-3.0, -1.0, 1.0, 3.0]
        );
        let flat = ScalarField::parse(grid(), "1").unwrap();
        assert!(contour_levels(&flat, &Levels::Count(4)).is_empty());
    }

    #[test]
    fn vf_arrows() {
        let f = VectorField::parse(grid(), "x", "y").unwrap();
        let s = scene_vf(&f, &PlotStyle::default());
        let lens: Vec<f64> = s
            .primitives
            .iter()
            .map(|p| match p {
                Primitive::Arrow { len, .. } => *len,
                _ => panic!(),
            })
            .collect();
        assert_eq!(lens[60], 0.0);
        assert!((lens[0] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn insets() {
        let parent = Scene::new(
            Viewport {
                x: [0.0, 1.0],
                y: [0.0, 1.0],
            },
            20.0,
        );
        let child = Scene::new(
            Viewport {
                x: [0.0, 1.0],
                y: [0.0, 1.0],
            },
            20.0,
        );
        let s = compose_inset(parent.clone(), child.clone(), [0.5, 0.5], 0.3).unwrap();
        let Primitive::Inset { bounds, .. } = &s.primitives[0] else {
            panic!()
        };
        assert!(((bounds[2] - bounds[0]) - 0.3).abs() < 1e-15);
        let s = compose_inset(parent.clone(), child.clone(), [0.9, 0.1], 1.0).unwrap();
        let Primitive::Inset { bounds, .. } = &s.primitives[0] else {
            panic!()
        };
        assert_eq!(*bounds, [0.0, 0.0, 1.0, 1.0]);
        assert!(compose_inset(parent, child, [2.0, 0.5], 0.3).is_err());
    }
}
