//! Marching squares.
//!
//! A corner counts as above the level when its value is `>= level`, so every
//! crossed edge has endpoints on both sides and the linear interpolation is
//! well defined. Saddle cells are resolved with the mean of the four corners.
//! Cells with a masked corner are skipped.

use crate::fields::ScalarField;
use std::collections::BTreeMap;

/// A grid edge: along x from (i, j) to (i+1, j), or along y from (i, j) to
/// (i, j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    X(usize, usize),
    Y(usize, usize),
}

struct Crossings<'a> {
    f: &'a ScalarField,
    level: f64,
}

impl Crossings<'_> {
    fn point(&self, e: Edge) -> [f64; 2] {
        let g = self.f.grid();
        let ((i0, j0), (i1, j1)) = match e {
            Edge::X(i, j) => ((i, j), (i + 1, j)),
            Edge::Y(i, j) => ((i, j), (i, j + 1)),
        };
        let (v0, v1) = (self.f.value(i0, j0), self.f.value(i1, j1));
        let t = (self.level - v0) / (v1 - v0);
        let (x0, y0) = g.point(i0, j0);
        let (x1, y1) = g.point(i1, j1);
        [x0 + t * (x1 - x0), y0 + t * (y1 - y0)]
    }
}

fn segments(f: &ScalarField, level: f64) -> Vec<(Edge, Edge)> {
    let g = f.grid();
    let mut out = Vec::new();
    for i in 0..g.nx() - 1 {
        for j in 0..g.ny() - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if corners.iter().any(|&(a, b)| f.kind_at(a, b).is_masked()) {
                continue;
            }
            let v = corners.map(|(a, b)| f.value(a, b));
            let up = v.map(|x| x >= level);
            // edges in corner order: bottom, right, top, left
            let edges = [
                Edge::X(i, j),
                Edge::Y(i + 1, j),
                Edge::X(i, j + 1),
                Edge::Y(i, j),
            ];
            let crossed: Vec<usize> = (0..4).filter(|&k| up[k] != up[(k + 1) % 4]).collect();
            match crossed.len() {
                2 => out.push((edges[crossed[0]], edges[crossed[1]])),
                4 => {
                    let centre = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
                    if up[0] == centre {
                        // corners 0 and 2 joined through the centre
                        out.push((edges[0], edges[1]));
                        out.push((edges[2], edges[3]));
                    } else {
                        out.push((edges[3], edges[0]));
                        out.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Contour lines of `f` at `level`. Closed loops repeat their first point.
pub fn contour(f: &ScalarField, level: f64) -> Vec<Vec<[f64; 2]>> {
    let segs = segments(f, level);
    let mut at: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segs.iter().enumerate() {
        at.entry(a).or_default().push(k);
        at.entry(b).or_default().push(k);
    }
    let c = Crossings { f, level };
    let mut used = vec![false; segs.len()];
    let walk = |start: Edge, used: &mut Vec<bool>| {
        let mut pts = vec![c.point(start)];
        let mut cur = start;
        while let Some(&k) = at[&cur].iter().find(|&&k| !used[k]) {
            used[k] = true;
            cur = if segs[k].0 == cur {
                segs[k].1
            } else {
                segs[k].0
            };
            pts.push(c.point(cur));
        }
        pts
    };
    let mut lines = Vec::new();
    // open lines start at the ends, then whatever remains is a loop
    let ends: Vec<Edge> = at
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    for e in ends {
        if !used[at[&e][0]] {
            lines.push(walk(e, &mut used));
        }
    }
    for k in 0..segs.len() {
        if !used[k] {
            lines.push(walk(segs[k].0, &mut used));
        }
    }
    lines
}
