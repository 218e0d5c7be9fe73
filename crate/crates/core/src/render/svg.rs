use super::fmt_num;
use super::scene::{Primitive, Scene, Viewport};
use crate::fields::PointKind;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Side of the plot area in pixels, before the surround margin.
    pub canvas: f64,
    pub digits: usize,
}

impl Default for SvgOptions {
    fn default() -> SvgOptions {
        SvgOptions {
            canvas: 800.0,
            digits: 6,
        }
    }
}

/// Plot units to pixels for one (sub)plot.
#[derive(Clone, Copy)]
struct Map {
    vp: Viewport,
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Map {
    fn at(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.x0 + (p[0] - self.vp.x[0]) / self.vp.width() * self.w,
            self.y0 + self.h - (p[1] - self.vp.y[0]) / self.vp.height() * self.h,
        ]
    }
}

struct Out {
    s: String,
    digits: usize,
}

impl Out {
    fn n(&self, v: f64) -> String {
        fmt_num(v, self.digits)
    }

    fn line(&mut self, a: [f64; 2], b: [f64; 2], color: &str) {
        let [x1, y1, x2, y2] = [a[0], a[1], b[0], b[1]].map(|v| self.n(v));
        let _ = writeln!(
            self.s,
            r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}"/>"#
        );
    }

    fn polygon(&mut self, pts: &[[f64; 2]], color: &str) {
        let pts = self.points(pts);
        let _ = writeln!(self.s, r#"<polygon points="{pts}" fill="{color}"/>"#);
    }

    fn points(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|p| format!("{},{}", self.n(p[0]), self.n(p[1])))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn rect(&mut self, a: [f64; 2], b: [f64; 2], attrs: &str) {
        let x = self.n(a[0].min(b[0]));
        let y = self.n(a[1].min(b[1]));
        let w = self.n((a[0] - b[0]).abs());
        let h = self.n((a[1] - b[1]).abs());
        let _ = writeln!(
            self.s,
            r#"<rect x="{x}" y="{y}" width="{w}" height="{h}" {attrs}/>"#
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn add(p: [f64; 2], d: [f64; 2], s: f64) -> [f64; 2] {
    [p[0] + s * d[0], p[1] + s * d[1]]
}

const ORDER: [&str; 6] = ["poly", "block", "stack", "arrow", "marker", "inset"];

fn draw(out: &mut Out, scene: &Scene, map: Map, inset: bool) {
    let frame = [
        [scene.viewport.x[0], scene.viewport.y[0]],
        [scene.viewport.x[1], scene.viewport.y[1]],
    ];
    let attrs = if inset {
        r#"fill="white" stroke="black""#
    } else {
        r#"fill="none" stroke="black""#
    };
    out.rect(map.at(frame[0]), map.at(frame[1]), attrs);
    if let Some(note) = &scene.note {
        let [x, y] = map.at([scene.viewport.x[0], scene.viewport.y[1]]);
        let _ = writeln!(
            out.s,
            r#"<text x="{}" y="{}" font-size="14">{}</text>"#,
            out.n(x + 6.0),
            out.n(y + 18.0),
            escape(note)
        );
    }
    for tag in ORDER {
        if !scene.primitives.iter().any(|p| p.tag() == tag) {
            continue;
        }
        let _ = writeln!(out.s, r#"<g class="{tag}">"#);
        for p in scene.primitives.iter().filter(|p| p.tag() == tag) {
            primitive(out, p, map);
        }
        out.s.push_str("</g>\n");
    }
}

fn primitive(out: &mut Out, prim: &Primitive, map: Map) {
    match prim {
        Primitive::Stack {
            p,
            angle,
            n,
            len,
            head,
            head_w,
            head_h,
            color,
        } => {
            if *n == 0 {
                return;
            }
            let e = [angle.cos(), angle.sin()];
            let q = [-e[1], e[0]];
            for k in 1..=*n {
                let c = add(*p, e, len * (k as f64 / (*n + 1) as f64 - 0.5));
                out.line(
                    map.at(add(c, q, -0.5 * len)),
                    map.at(add(c, q, 0.5 * len)),
                    color,
                );
            }
            if *head {
                let base = add(*p, e, 0.5 * len);
                let tip = add(*p, e, 0.5 * len + head_h);
                let pts = [add(base, q, -0.5 * head_w), tip, add(base, q, 0.5 * head_w)]
                    .map(|v| map.at(v));
                out.polygon(&pts, color);
            }
        }
        Primitive::Arrow { p, d, len, color } => {
            if *len == 0.0 {
                return;
            }
            let tip = add(*p, *d, *len);
            out.line(map.at(*p), map.at(tip), color);
            let q = [-d[1], d[0]];
            let base = add(tip, *d, -0.3 * len);
            let pts = [add(base, q, -0.15 * len), tip, add(base, q, 0.15 * len)].map(|v| map.at(v));
            out.polygon(&pts, color);
        }
        Primitive::Block {
            p,
            n,
            of,
            size,
            color,
        } => {
            for k in 1..=*n {
                let half = 0.5 * size * k as f64 / *of as f64;
                let a = map.at([p[0] - half, p[1] - half]);
                let b = map.at([p[0] + half, p[1] + half]);
                out.rect(a, b, &format!(r#"fill="none" stroke="{color}""#));
            }
        }
        Primitive::Poly {
            pts,
            label,
            color,
            font,
        } => {
            let mapped: Vec<[f64; 2]> = pts.iter().map(|&v| map.at(v)).collect();
            let pts_attr = out.points(&mapped);
            let _ = writeln!(
                out.s,
                r#"<polyline points="{pts_attr}" fill="none" stroke="{color}"/>"#
            );
            if let (Some(label), Some(mid)) = (label, mapped.get(mapped.len() / 2)) {
                let _ = writeln!(
                    out.s,
                    r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"#,
                    out.n(mid[0]),
                    out.n(mid[1]),
                    font.unwrap_or(10),
                    escape(label)
                );
            }
        }
        Primitive::Marker { p, kind } => {
            let [x, y] = map.at(*p);
            match kind {
                PointKind::Infinite => {
                    let _ = writeln!(
                        out.s,
                        r#"<circle cx="{}" cy="{}" r="4" fill="red"/>"#,
                        out.n(x),
                        out.n(y)
                    );
                }
                _ => out.rect([x - 4.0, y - 4.0], [x + 4.0, y + 4.0], r#"fill="grey""#),
            }
        }
        Primitive::Inset { bounds, scene, .. } => {
            let a = map.at([bounds[0], bounds[3]]);
            let b = map.at([bounds[2], bounds[1]]);
            let child = Map {
                vp: scene.viewport,
                x0: a[0],
                y0: a[1],
                w: b[0] - a[0],
                h: b[1] - a[1],
            };
            draw(out, scene, child, true);
        }
    }
}

/// SVG 1.1 document for `scene`. The output depends only on the scene and
/// the options.
pub fn render_svg_with(scene: &Scene, opts: &SvgOptions) -> String {
    let margin = opts.canvas / scene.surround;
    let side = opts.canvas + 2.0 * margin;
    let mut out = Out {
        s: String::new(),
        digits: opts.digits,
    };
    let side_s = out.n(side);
    out.s
        .push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out.s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{side_s}" height="{side_s}" viewBox="0 0 {side_s} {side_s}">"#
    );
    let _ = writeln!(
        out.s,
        r#"<rect x="0" y="0" width="{side_s}" height="{side_s}" fill="white"/>"#
    );
    let map = Map {
        vp: scene.viewport,
        x0: margin,
        y0: margin,
        w: opts.canvas,
        h: opts.canvas,
    };
    draw(&mut out, scene, map, false);
    out.s.push_str("</svg>\n");
    out.s
}

pub fn render_svg(scene: &Scene) -> String {
    render_svg_with(scene, &SvgOptions::default())
}
