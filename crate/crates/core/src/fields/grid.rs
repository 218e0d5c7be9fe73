use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform samples `min = c_0 < c_1 < ... < c_{n-1} = max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Axis> {
        let axis = Axis { min, max, n };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid("axis bounds must be finite"));
        }
        if self.min >= self.max {
            return Err(Error::invalid(format!(
                "axis range {}:{} is empty; min must be below max",
                self.min, self.max
            )));
        }
        if self.n < 2 {
            return Err(Error::invalid("an axis needs at least 2 points"));
        }
        Ok(())
    }

    /// The `i`-th coordinate. Written as a weighted mean of the endpoints so
    /// both ends are hit exactly and a range symmetric about zero has an exact
    /// zero in the middle.
    pub fn coord(&self, i: usize) -> f64 {
        let last = self.n - 1;
        if i == 0 {
            return self.min;
        }
        if i == last {
            return self.max;
        }
        (self.min * (last - i) as f64 + self.max * i as f64) / last as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn half_extent(&self) -> f64 {
        0.5 * (self.max - self.min)
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }

    /// Same range, `n` points.
    pub fn with_n(&self, n: usize) -> Result<Axis> {
        Axis::new(self.min, self.max, n)
    }
}

/// Rectangular grid. Flat storage is row-major in `x`: index `i * ny + j`
/// holds the point `(x_i, y_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub x: Axis,
    pub y: Axis,
}

impl Grid2 {
    pub fn new(x: Axis, y: Axis) -> Result<Grid2> {
        x.validate()?;
        y.validate()?;
        Ok(Grid2 { x, y })
    }

    pub fn square(min: f64, max: f64, n: usize) -> Result<Grid2> {
        let a = Axis::new(min, max, n)?;
        Ok(Grid2 { x: a, y: a })
    }

    pub fn nx(&self) -> usize {
        self.x.n
    }

    pub fn ny(&self) -> usize {
        self.y.n
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.y.n + j
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x.coord(i), self.y.coord(j))
    }

    /// All points in storage order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = self.x.coords();
        let ys = self.y.coords();
        xs.iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .collect()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }

    pub fn with_density(&self, nx: usize, ny: usize) -> Result<Grid2> {
        Grid2::new(self.x.with_n(nx)?, self.y.with_n(ny)?)
    }
}
