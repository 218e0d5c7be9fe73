use crate::expr::Var;
use crate::fields::ScalarField;

/// Finite-difference partial derivative: second-order central differences
/// inside, second-order one-sided differences on the edges, first order when
/// the axis has only two points. A point whose stencil (or which itself) is
/// masked comes out undefined.
pub fn partial(f: &ScalarField, var: Var) -> ScalarField {
    let g = *f.grid();
    let (n, stride, h) = match var {
        Var::X => (g.nx(), g.ny(), g.x.spacing()),
        Var::Y => (g.ny(), 1, g.y.spacing()),
    };
    let vals = f.values();
    let mask = f.mask();
    let out = (0..g.len())
        .map(|k| {
            let pos = match var {
                Var::X => k / g.ny(),
                Var::Y => k % g.ny(),
            };
            let base = k - pos * stride;
            let at = |p: usize| base + p * stride;
            let taps: &[usize] = &if n == 2 {
                [0, 1, 1]
            } else if pos == 0 {
                [0, 1, 2]
            } else if pos == n - 1 {
                [n - 3, n - 2, n - 1]
            } else {
                [pos - 1, pos, pos + 1]
            };
            if mask[k].is_masked() || taps.iter().any(|&p| mask[at(p)].is_masked()) {
                return f64::NAN;
            }
            let v = |p: usize| vals[at(p)];
            if n == 2 {
                (v(1) - v(0)) / h
            } else if pos == 0 {
                (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
            } else if pos == n - 1 {
                (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h)
            } else {
                (v(pos + 1) - v(pos - 1)) / (2.0 * h)
            }
        })
        .collect();
    ScalarField::from_values(g, out)
        .expect("same grid")
        .with_threshold(f.threshold())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2;

    #[test]
    fn exact_on_quadratics() {
        // second-order stencils differentiate quadratics exactly
        let g = Grid2::square(-2.0, 2.0, 9).unwrap();
        let f = ScalarField::parse(g, "x^2 + 3*x*y - y^2").unwrap();
        let fx = partial(&f, Var::X);
        let fy = partial(&f, Var::Y);
        for (k, (x, y)) in g.points().into_iter().enumerate() {
            assert!((fx.values()[k] - (2.0 * x + 3.0 * y)).abs() < 1e-12);
            assert!((fy.values()[k] - (3.0 * x - 2.0 * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_point_axis_is_first_order() {
        let g = Grid2::square(0.0, 1.0, 2).unwrap();
        let f = ScalarField::parse(g, "3*x + y").unwrap();
        assert!(partial(&f, Var::X).values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn masks_spread_to_stencil_neighbours() {
        let g = Grid2::square(-1.0, 1.0, 7).unwrap();
        let f = ScalarField::parse(g, "1/x").unwrap();
        let fx = partial(&f, Var::X);
        // x = 0 is column 3; columns 2, 3, 4 touch it
        for i in 0..7 {
            let masked = fx.kind_at(i, 0).is_masked();
            assert_eq!(masked, (2..=4).contains(&i), "column {i}");
        }
        // along y the mask stays on its own column
        let fy = partial(&f, Var::Y);
        assert_eq!(fy.masked_count(), 7);
    }
}
