//! Scenes and SVG.
//!
//! Objects are first turned into a [`Scene`], a list of drawing primitives
//! in plot units that serialises to the JSON the browser front end draws.
//! [`render_svg`] then writes a scene out deterministically.

mod build;
mod contour;
mod scene;
mod style;
mod svg;

pub use build::{
    compose_inset, contour_levels, relative_count, scene_form0, scene_form1, scene_form2,
    scene_object, scene_vf,
};
pub use contour::contour;
pub use scene::{Primitive, Scene, Viewport};
pub use style::{check_color, Levels, PlotStyle, FORM1_COLOR, LINE_COLOR};
pub use svg::{render_svg, render_svg_with, SvgOptions};

/// `v` rounded to `digits` significant digits, without trailing zeros or an
/// exponent.
pub fn fmt_num(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() {
            "0".into()
        } else {
            v.to_string()
        };
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    match s {
        "-0" => "0".into(),
        s => s.to_string(),
    }
}
