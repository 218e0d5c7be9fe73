use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Contour levels: a count spread evenly over the data range, or explicit
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Levels {
    Count(usize),
    Values(Vec<f64>),
}

/// Plot customisations. Unset `color` means the per-kind default: purple
/// stacks, black arrows and contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotStyle {
    pub color: Option<String>,
    pub arrowheads: bool,
    /// Arrowhead base as a fraction of the sheet length.
    pub head_width: f64,
    /// Arrowhead height (base to tip) as a fraction of the sheet length.
    pub head_height: f64,
    pub log_scaling: bool,
    pub max_sheets: usize,
    /// Sheet length as a fraction of the plot width.
    pub sheet_size: f64,
    /// The blank border is the plot size divided by this.
    pub surround: f64,
    /// 2-form colours: counter-clockwise, clockwise, zero.
    pub palette: [String; 3],
    pub levels: Levels,
    pub labels: bool,
    pub font_size: u32,
}

pub const FORM1_COLOR: &str = "#800080";
pub const LINE_COLOR: &str = "black";

impl Default for PlotStyle {
    fn default() -> PlotStyle {
        PlotStyle {
            color: None,
            arrowheads: true,
            head_width: 0.3,
            head_height: 0.3,
            log_scaling: false,
            max_sheets: 5,
            sheet_size: 0.05,
            surround: 20.0,
            palette: ["red".into(), "blue".into(), "grey".into()],
            levels: Levels::Count(10),
            labels: false,
            font_size: 10,
        }
    }
}

/// Accepts CSS colour names and `#RRGGBB`; returns the lower-cased form.
pub fn check_color(s: &str) -> Result<String> {
    let s = s.trim().to_ascii_lowercase();
    let ok = match s.strip_prefix('#') {
        Some(hex) => hex.len() == 6 && hex.bytes().all(|b| b.is_ascii_hexdigit()),
        None => s.bytes().all(|b| b.is_ascii_lowercase()) && csscolorparser::parse(&s).is_ok(),
    };
    if !ok {
        return Err(Error::invalid(format!(
            "'{s}' is not a colour; use a CSS colour name or #RRGGBB"
        )));
    }
    Ok(s)
}

fn fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must lie in (0, 1], got {v}"
        )))
    }
}

impl PlotStyle {
    /// Checks the ranges and normalises colour strings.
    pub fn validated(mut self) -> Result<PlotStyle> {
        fraction("head_width", self.head_width)?;
        fraction("head_height", self.head_height)?;
        fraction("sheet_size", self.sheet_size)?;
        if self.max_sheets == 0 {
            return Err(Error::invalid("max_sheets must be a positive integer"));
        }
        if !(self.surround.is_finite() && self.surround >= 1.0) {
            return Err(Error::invalid(format!(
                "surround must be >= 1, got {}",
                self.surround
            )));
        }
        if self.font_size == 0 {
            return Err(Error::invalid("font_size must be a positive integer"));
        }
        match &self.levels {
            Levels::Count(0) => return Err(Error::invalid("levels must be a positive integer")),
            Levels::Values(v) if v.is_empty() => {
                return Err(Error::invalid("levels list is empty"))
            }
            Levels::Values(v)
                if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) =>
            {
                return Err(Error::invalid(
                    "levels list must be finite and strictly ascending",
                ))
            }
            _ => {}
        }
        if let Some(c) = &self.color {
            self.color = Some(check_color(c)?);
        }
        for c in self.palette.iter_mut() {
            *c = check_color(c)?;
        }
        Ok(self)
    }

    pub fn color_or(&self, default: &str) -> String {
        self.color.clone().unwrap_or_else(|| default.to_string())
    }
}
