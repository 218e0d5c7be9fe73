use super::Grid2;
use crate::error::{Error, Result};
use crate::expr::Expr;
use serde::{Deserialize, Serialize};

/// Values at or beyond this magnitude count as infinite.
pub const SINGULARITY_THRESHOLD: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Finite,
    Infinite,
    Undefined,
}

impl PointKind {
    pub fn classify(v: f64, threshold: f64) -> PointKind {
        if v.is_nan() {
            PointKind::Undefined
        } else if v.is_infinite() || v.abs() > threshold {
            PointKind::Infinite
        } else {
            PointKind::Finite
        }
    }

    pub fn is_masked(self) -> bool {
        self != PointKind::Finite
    }

    pub fn name(self) -> &'static str {
        match self {
            PointKind::Finite => "finite",
            PointKind::Infinite => "infinite",
            PointKind::Undefined => "undefined",
        }
    }
}

/// One real component sampled on a grid, with its equation when known and
/// the classification of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2,
    values: Vec<f64>,
    expr: Option<Expr>,
    mask: Vec<PointKind>,
    threshold: f64,
}

fn evaluate(grid: &Grid2, expr: &Expr) -> Vec<f64> {
    grid.points()
        .into_iter()
        .map(|(x, y)| expr.eval(x, y))
        .collect()
}

impl ScalarField {
    fn assemble(grid: Grid2, values: Vec<f64>, expr: Option<Expr>, threshold: f64) -> ScalarField {
        let mask = values
            .iter()
            .map(|&v| PointKind::classify(v, threshold))
            .collect();
        ScalarField {
            grid,
            values,
            expr,
            mask,
            threshold,
        }
    }

    pub fn from_values(grid: Grid2, values: Vec<f64>) -> Result<ScalarField> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {}x{} = {} values, got {}",
                grid.nx(),
                grid.ny(),
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField::assemble(
            grid,
            values,
            None,
            SINGULARITY_THRESHOLD,
        ))
    }

    pub fn from_expr(grid: Grid2, expr: Expr) -> ScalarField {
        let values = evaluate(&grid, &expr);
        ScalarField::assemble(grid, values, Some(expr), SINGULARITY_THRESHOLD)
    }

    pub fn parse(grid: Grid2, src: &str) -> Result<ScalarField> {
        Ok(ScalarField::from_expr(grid, src.parse()?))
    }

    pub fn constant(grid: Grid2, c: f64) -> ScalarField {
        ScalarField::from_expr(grid, Expr::Const(c))
    }

    /// Values and equation supplied together; the values are kept as given.
    pub fn with_values_and_expr(grid: Grid2, values: Vec<f64>, expr: Expr) -> Result<ScalarField> {
        let mut f = ScalarField::from_values(grid, values)?;
        f.expr = Some(expr);
        Ok(f)
    }

    /// Same data, classified against another threshold.
    pub fn with_threshold(self, threshold: f64) -> ScalarField {
        ScalarField::assemble(self.grid, self.values, self.expr, threshold)
    }

    /// Result of an operation on `inputs`: NaN wherever any input is masked.
    pub(crate) fn derived(
        grid: Grid2,
        mut values: Vec<f64>,
        expr: Option<Expr>,
        inputs: &[&ScalarField],
    ) -> ScalarField {
        let threshold = inputs
            .first()
            .map_or(SINGULARITY_THRESHOLD, |f| f.threshold);
        for (k, v) in values.iter_mut().enumerate() {
            if inputs.iter().any(|f| f.mask[k].is_masked()) {
                *v = f64::NAN;
            }
        }
        ScalarField::assemble(grid, values, expr, threshold)
    }

    /// Evaluates `expr` on the grid shared by `inputs`, propagating masks.
    pub(crate) fn derived_expr(expr: Expr, inputs: &[&ScalarField]) -> ScalarField {
        let grid = inputs[0].grid;
        let values = evaluate(&grid, &expr);
        ScalarField::derived(grid, values, Some(expr), inputs)
    }

    /// Pointwise map over `inputs` (which must share a grid), propagating masks.
    pub(crate) fn zip_map(inputs: &[&ScalarField], f: impl Fn(&[f64]) -> f64) -> ScalarField {
        let grid = inputs[0].grid;
        let mut buf = vec![0.0; inputs.len()];
        let values = (0..grid.len())
            .map(|k| {
                for (b, field) in buf.iter_mut().zip(inputs) {
                    *b = field.values[k];
                }
                f(&buf)
            })
            .collect();
        ScalarField::derived(grid, values, None, inputs)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_ref()
    }

    pub fn has_expr(&self) -> bool {
        self.expr.is_some()
    }

    pub fn mask(&self) -> &[PointKind] {
        &self.mask
    }

    pub fn kind_at(&self, i: usize, j: usize) -> PointKind {
        self.mask[self.grid.index(i, j)]
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|k| k.is_masked()).count()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Attaches `expr` and replaces the values by its evaluation.
    pub fn give_eqn(&self, expr: Expr) -> ScalarField {
        let values = evaluate(&self.grid, &expr);
        ScalarField::assemble(self.grid, values, Some(expr), self.threshold)
    }

    /// Re-evaluates the equation on another grid.
    pub fn resample(&self, grid: Grid2) -> Result<ScalarField> {
        let expr = self
            .expr
            .clone()
            .ok_or_else(|| Error::missing_expr("resampling needs the component equations"))?;
        let values = evaluate(&grid, &expr);
        Ok(ScalarField::assemble(
            grid,
            values,
            Some(expr),
            self.threshold,
        ))
    }

    pub fn without_expr(&self) -> ScalarField {
        ScalarField {
            expr: None,
            ..self.clone()
        }
    }

    /// Values with masked points replaced by zero, as used for scaling.
    pub fn scaling_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.mask)
            .map(|(&v, k)| if k.is_masked() { 0.0 } else { v })
    }
}
