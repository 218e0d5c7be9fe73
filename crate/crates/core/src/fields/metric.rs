use super::{Grid2, ScalarField};
use crate::error::{Error, Result};

/// Symmetric 2×2 metric g_ij sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    xx: ScalarField,
    xy: ScalarField,
    yx: ScalarField,
    yy: ScalarField,
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

impl Metric {
    pub fn new(
        xx: ScalarField,
        xy: ScalarField,
        yx: ScalarField,
        yy: ScalarField,
    ) -> Result<Metric> {
        let grid = xx.grid();
        if [&xy, &yx, &yy].iter().any(|c| c.grid() != grid) {
            return Err(Error::invalid("metric components must share one grid"));
        }
        if xy
            .values()
            .iter()
            .zip(yx.values())
            .any(|(&a, &b)| !same(a, b))
        {
            return Err(Error::invalid(
                "metric must be symmetric: g_xy and g_yx differ",
            ));
        }
        Ok(Metric { xx, xy, yx, yy })
    }

    /// The flat metric diag(1, 1).
    pub fn identity(grid: Grid2) -> Metric {
        let one = ScalarField::constant(grid, 1.0);
        let zero = ScalarField::constant(grid, 0.0);
        Metric {
            xx: one.clone(),
            xy: zero.clone(),
            yx: zero,
            yy: one,
        }
    }

    /// Components given as equations in the order xx, xy, yx, yy.
    pub fn parse(grid: Grid2, comps: [&str; 4]) -> Result<Metric> {
        let [xx, xy, yx, yy] = comps.map(|s| ScalarField::parse(grid, s));
        Metric::new(xx?, xy?, yx?, yy?)
    }

    pub fn grid(&self) -> &Grid2 {
        self.xx.grid()
    }

    pub fn xx(&self) -> &ScalarField {
        &self.xx
    }

    pub fn xy(&self) -> &ScalarField {
        &self.xy
    }

    pub fn yx(&self) -> &ScalarField {
        &self.yx
    }

    pub fn yy(&self) -> &ScalarField {
        &self.yy
    }

    pub fn components(&self) -> [&ScalarField; 4] {
        [&self.xx, &self.xy, &self.yx, &self.yy]
    }

    pub fn has_exprs(&self) -> bool {
        self.components().iter().all(|c| c.has_expr())
    }

    /// Pointwise determinant.
    pub fn det(&self) -> Vec<f64> {
        (0..self.grid().len())
            .map(|k| {
                self.xx.values()[k] * self.yy.values()[k]
                    - self.xy.values()[k] * self.yx.values()[k]
            })
            .collect()
    }

    /// Re-evaluates the equations on another grid.
    pub fn resample(&self, grid: Grid2) -> Result<Metric> {
        Metric::new(
            self.xx.resample(grid)?,
            self.xy.resample(grid)?,
            self.yx.resample(grid)?,
            self.yy.resample(grid)?,
        )
    }
}
