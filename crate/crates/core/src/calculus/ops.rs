use super::{partial, resolve, Mode};
use crate::error::{Error, Result};
use crate::expr::{self, Expr, Var};
use crate::fields::{
    Form0, Form1, Form2, Grid2, Metric, Object, ScalarField, VectorField, ZeroForm,
};

fn expr_of(f: &ScalarField) -> Expr {
    f.expr().cloned().expect("resolve checked for equations")
}

fn analytic(e: Expr, inputs: &[&ScalarField]) -> ScalarField {
    ScalarField::derived_expr(e.canonical(), inputs)
}

fn same_grid(a: &Grid2, b: &Grid2, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("{what} must be on the same grid")));
    }
    Ok(())
}

/// The zero object of a given degree: a form with constant-zero components
/// up to degree 2, the zero marker above.
fn zero_of_degree(degree: u8, grid: Grid2) -> Object {
    let z = || ScalarField::constant(grid, 0.0);
    match degree {
        0 => Object::Form0(Form0::new(z())),
        1 => Object::Form1(Form1::new(z(), z()).expect("same grid")),
        2 => Object::Form2(Form2::new(z())),
        _ => Object::Zero(ZeroForm { degree, grid }),
    }
}

fn degree(obj: &Object) -> Result<u8> {
    match obj {
        Object::Form0(_) => Ok(0),
        Object::Form1(_) => Ok(1),
        Object::Form2(_) => Ok(2),
        Object::Zero(z) => Ok(z.degree),
        Object::Vector(_) => Err(Error::unsupported(
            "a vector field is not a form; lower it with covariant first",
        )),
    }
}

/// Exterior derivative d: 0-forms to 1-forms and 1-forms to 2-forms.
pub fn ext_d(obj: &Object, mode: Option<Mode>) -> Result<Object> {
    match obj {
        Object::Form0(f) => {
            let phi = f.phi();
            let (a, b) = match resolve(mode, &[phi], "exterior derivative")? {
                Mode::Analytic => {
                    let e = expr_of(phi);
                    (
                        analytic(e.diff(Var::X), &[phi]),
                        analytic(e.diff(Var::Y), &[phi]),
                    )
                }
                Mode::Numeric => (partial(phi, Var::X), partial(phi, Var::Y)),
            };
            Ok(Object::Form1(Form1::new(a, b)?))
        }
        Object::Form1(f) => {
            let (a1, a2) = (f.dx(), f.dy());
            let w = match resolve(mode, &[a1, a2], "exterior derivative")? {
                Mode::Analytic => analytic(
                    expr::sub(expr_of(a2).diff(Var::X), expr_of(a1).diff(Var::Y)),
                    &[a1, a2],
                ),
                Mode::Numeric => {
                    ScalarField::zip_map(&[&partial(a2, Var::X), &partial(a1, Var::Y)], |v| {
                        v[0] - v[1]
                    })
                }
            };
            Ok(Object::Form2(Form2::new(w)))
        }
        Object::Form2(_) => Err(Error::unsupported(
            "exterior derivative of a top-degree form is zero",
        )),
        Object::Vector(_) => Err(Error::unsupported(
            "the exterior derivative acts on forms; lower the vector field with covariant first",
        )),
        Object::Zero(z) => Ok(Object::Zero(ZeroForm {
            degree: z.degree + 1,
            grid: z.grid,
        })),
    }
}

/// Interior derivative ι_v. Without `v` the field x̂ + ŷ is used.
pub fn interior_d(obj: &Object, v: Option<&VectorField>, mode: Option<Mode>) -> Result<Object> {
    let default;
    let v = match v {
        Some(v) => v,
        None => {
            default = VectorField::parse(*obj.grid(), "1", "1")?;
            &default
        }
    };
    same_grid(v.grid(), obj.grid(), "the vector field and the form")?;
    let (v1, v2) = (v.u(), v.v());
    match obj {
        Object::Form1(f) => {
            let ins = [f.dx(), v1, f.dy(), v2];
            let phi = match resolve(mode, &ins, "interior derivative")? {
                Mode::Analytic => analytic(
                    expr::add(
                        expr::mul(expr_of(v1), expr_of(f.dx())),
                        expr::mul(expr_of(v2), expr_of(f.dy())),
                    ),
                    &ins,
                ),
                Mode::Numeric => ScalarField::zip_map(&ins, |a| a[1] * a[0] + a[3] * a[2]),
            };
            Ok(Object::Form0(Form0::new(phi)))
        }
        Object::Form2(f) => {
            let w = f.w();
            let ins = [w, v1, v2];
            let (a, b) = match resolve(mode, &ins, "interior derivative")? {
                Mode::Analytic => (
                    analytic(expr::neg(expr::mul(expr_of(w), expr_of(v2))), &ins),
                    analytic(expr::mul(expr_of(w), expr_of(v1)), &ins),
                ),
                Mode::Numeric => (
                    ScalarField::zip_map(&ins, |a| -(a[0] * a[2])),
                    ScalarField::zip_map(&ins, |a| a[0] * a[1]),
                ),
            };
            Ok(Object::Form1(Form1::new(a, b)?))
        }
        Object::Form0(_) => Err(Error::unsupported(
            "interior derivative of a 0-form would have degree -1",
        )),
        Object::Vector(_) => Err(Error::unsupported("the interior derivative acts on forms")),
        Object::Zero(z) => Ok(zero_of_degree(z.degree - 1, z.grid)),
    }
}

fn carry(f: &ScalarField, negate: bool, mode: Mode) -> ScalarField {
    let values = f
        .values()
        .iter()
        .map(|&v| if negate { -v } else { v })
        .collect();
    let e = match mode {
        Mode::Analytic => f.expr().map(|e| {
            if negate {
                expr::neg(e.clone())
            } else {
                e.clone()
            }
        }),
        Mode::Numeric => None,
    };
    ScalarField::derived(*f.grid(), values, e, &[f])
}

/// Flat Hodge star.
pub fn hodge(obj: &Object, mode: Option<Mode>) -> Result<Object> {
    let comps = obj.components();
    let mode = resolve(mode, &comps, "Hodge star")?;
    match obj {
        Object::Form0(f) => Ok(Object::Form2(Form2::new(carry(f.phi(), false, mode)))),
        Object::Form1(f) => Ok(Object::Form1(Form1::new(
            carry(f.dy(), true, mode),
            carry(f.dx(), false, mode),
        )?)),
        Object::Form2(f) => Ok(Object::Form0(Form0::new(carry(f.w(), false, mode)))),
        Object::Vector(_) => Err(Error::unsupported(
            "the Hodge star acts on forms; lower the vector field with covariant first",
        )),
        Object::Zero(z) => Err(Error::unsupported(format!(
            "a {}-form vanishes on the plane and has no Hodge dual",
            z.degree
        ))),
    }
}

/// Hodge star replacing the components of a 1-form in place.
pub fn hodge_in_place(obj: &mut Object, mode: Option<Mode>) -> Result<()> {
    let Object::Form1(_) = obj else {
        return Err(Error::unsupported(format!(
            "keep_object needs a 1-form: the Hodge star changes the degree of a {}",
            obj.kind().describe()
        )));
    };
    let Object::Form1(star) = hodge(obj, mode)? else {
        return Err(Error::Internal(
            "Hodge star of a 1-form is not a 1-form".into(),
        ));
    };
    if let Object::Form1(f) = obj {
        f.replace(star);
    }
    Ok(())
}

/// Wedge product a∧b. Products above degree 2 come back as the zero marker.
pub fn wedge(a: &Object, b: &Object, mode: Option<Mode>) -> Result<Object> {
    same_grid(a.grid(), b.grid(), "both factors of a wedge product")?;
    let (p, q) = (degree(a)?, degree(b)?);
    if p + q > 2 {
        return Ok(Object::Zero(ZeroForm {
            degree: p + q,
            grid: *a.grid(),
        }));
    }
    let mut ins = a.components();
    ins.extend(b.components());
    let mode = resolve(mode, &ins, "wedge product")?;
    let product = |f: &ScalarField, g: &ScalarField| match mode {
        Mode::Analytic => analytic(expr::mul(expr_of(f), expr_of(g)), &[f, g]),
        Mode::Numeric => ScalarField::zip_map(&[f, g], |v| v[0] * v[1]),
    };
    match (a, b) {
        (Object::Form0(f), other) => {
            let comps = other
                .components()
                .into_iter()
                .map(|c| product(f.phi(), c))
                .collect();
            Object::from_components(other.kind(), comps)
        }
        (other, Object::Form0(f)) => {
            let comps = other
                .components()
                .into_iter()
                .map(|c| product(c, f.phi()))
                .collect();
            Object::from_components(other.kind(), comps)
        }
        (Object::Form1(x), Object::Form1(y)) => {
            let ins = [x.dx(), y.dy(), x.dy(), y.dx()];
            let w = match mode {
                Mode::Analytic => analytic(
                    expr::sub(
                        expr::mul(expr_of(x.dx()), expr_of(y.dy())),
                        expr::mul(expr_of(x.dy()), expr_of(y.dx())),
                    ),
                    &ins,
                ),
                Mode::Numeric => ScalarField::zip_map(&ins, |v| v[0] * v[1] - v[2] * v[3]),
            };
            Ok(Object::Form2(Form2::new(w)))
        }
        _ => Err(Error::Internal(format!("wedge of degrees {p} and {q}"))),
    }
}

fn combine(
    a: &Object,
    b: &Object,
    mode: Option<Mode>,
    e: impl Fn(Expr, Expr) -> Expr,
    v: impl Fn(f64, f64) -> f64,
) -> Result<Object> {
    if a.kind() != b.kind() {
        return Err(Error::invalid(format!(
            "cannot combine a {} with a {}",
            a.kind().describe(),
            b.kind().describe()
        )));
    }
    same_grid(a.grid(), b.grid(), "both operands")?;
    if let (Object::Zero(x), Object::Zero(y)) = (a, b) {
        if x.degree != y.degree {
            return Err(Error::invalid("zero forms of different degree"));
        }
        return Ok(a.clone());
    }
    let mut ins = a.components();
    ins.extend(b.components());
    let mode = resolve(mode, &ins, "sum")?;
    let comps = a
        .components()
        .into_iter()
        .zip(b.components())
        .map(|(f, g)| match mode {
            Mode::Analytic => analytic(e(expr_of(f), expr_of(g)), &[f, g]),
            Mode::Numeric => ScalarField::zip_map(&[f, g], |x| v(x[0], x[1])),
        })
        .collect();
    Object::from_components(a.kind(), comps)
}

/// Componentwise a + b of two objects of the same kind.
pub fn add(a: &Object, b: &Object, mode: Option<Mode>) -> Result<Object> {
    combine(a, b, mode, expr::add, |x, y| x + y)
}

/// Componentwise a − b of two objects of the same kind.
pub fn sub(a: &Object, b: &Object, mode: Option<Mode>) -> Result<Object> {
    combine(a, b, mode, expr::sub, |x, y| x - y)
}

/// Every component multiplied by `c`.
pub fn scale(a: &Object, c: f64, mode: Option<Mode>) -> Result<Object> {
    if let Object::Zero(_) = a {
        return Ok(a.clone());
    }
    let comps = a.components();
    let mode = resolve(mode, &comps, "scaling")?;
    let out = comps
        .into_iter()
        .map(|f| match mode {
            Mode::Analytic => analytic(expr::mul(Expr::Const(c), expr_of(f)), &[f]),
            Mode::Numeric => ScalarField::zip_map(&[f], |x| c * x[0]),
        })
        .collect();
    Object::from_components(a.kind(), out)
}

fn metric_for(g: Option<&Metric>, grid: &Grid2) -> Result<Metric> {
    match g {
        Some(g) => {
            same_grid(g.grid(), grid, "the metric and the object")?;
            Ok(g.clone())
        }
        None => Ok(Metric::identity(*grid)),
    }
}

/// `a*b + c*d` with a single rounding error of the order of the result,
/// rather than of the larger product.
fn dot2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let e = c.mul_add(d, -w);
    a.mul_add(b, w) + e
}

/// Lowers the index of a vector field: α_i = g_ij v^j. The default metric is
/// the flat one.
pub fn covariant(obj: &Object, g: Option<&Metric>, mode: Option<Mode>) -> Result<Object> {
    let Object::Vector(vf) = obj else {
        return Err(Error::unsupported(format!(
            "covariant takes a vector field, not a {}",
            obj.kind().describe()
        )));
    };
    let g = metric_for(g, vf.grid())?;
    let (v1, v2) = (vf.u(), vf.v());
    let ins = [v1, v2, g.xx(), g.xy(), g.yx(), g.yy()];
    let (a, b) = match resolve(mode, &ins, "covariant")? {
        Mode::Analytic => {
            let [xx, xy, yx, yy] = g.components().map(expr_of);
            let (e1, e2) = (expr_of(v1), expr_of(v2));
            (
                analytic(
                    expr::add(expr::mul(xx, e1.clone()), expr::mul(xy, e2.clone())),
                    &ins,
                ),
                analytic(expr::add(expr::mul(yx, e1), expr::mul(yy, e2)), &ins),
            )
        }
        Mode::Numeric => (
            ScalarField::zip_map(&ins, |m| dot2(m[2], m[0], m[3], m[1])),
            ScalarField::zip_map(&ins, |m| dot2(m[4], m[0], m[5], m[1])),
        ),
    };
    Ok(Object::Form1(Form1::new(a, b)?))
}

/// Raises the index of a 1-form with the pointwise inverse metric. Points
/// where the metric is singular become undefined.
pub fn contravariant(obj: &Object, g: Option<&Metric>, mode: Option<Mode>) -> Result<Object> {
    let Object::Form1(f) = obj else {
        return Err(Error::unsupported(format!(
            "contravariant takes a 1-form, not a {}",
            obj.kind().describe()
        )));
    };
    let g = metric_for(g, f.grid())?;
    let (a1, a2) = (f.dx(), f.dy());
    let ins = [a1, a2, g.xx(), g.xy(), g.yx(), g.yy()];
    let singular: Vec<bool> = g
        .det()
        .iter()
        .map(|&d| d == 0.0 || !d.is_finite())
        .collect();
    let (u, v) = match resolve(mode, &ins, "contravariant")? {
        Mode::Analytic => {
            let [xx, xy, yx, yy] = g.components().map(expr_of);
            let (e1, e2) = (expr_of(a1), expr_of(a2));
            let det = expr::sub(
                expr::mul(xx.clone(), yy.clone()),
                expr::mul(xy.clone(), yx.clone()),
            );
            let u = expr::div(
                expr::sub(expr::mul(yy, e1.clone()), expr::mul(xy, e2.clone())),
                det.clone(),
            );
            let v = expr::div(expr::sub(expr::mul(xx, e2), expr::mul(yx, e1)), det);
            let blank = |f: ScalarField| {
                let values = f
                    .values()
                    .iter()
                    .zip(&singular)
                    .map(|(&x, &s)| if s { f64::NAN } else { x })
                    .collect();
                ScalarField::derived(*f.grid(), values, f.expr().cloned(), &ins)
            };
            (blank(analytic(u, &ins)), blank(analytic(v, &ins)))
        }
        Mode::Numeric => {
            let inv = |m: &[f64], first: bool| {
                let [a1, a2, xx, xy, yx, yy] = [m[0], m[1], m[2], m[3], m[4], m[5]];
                let det = dot2(xx, yy, -xy, yx);
                if det == 0.0 || !det.is_finite() {
                    return f64::NAN;
                }
                if first {
                    dot2(yy, a1, -xy, a2) / det
                } else {
                    dot2(xx, a2, -yx, a1) / det
                }
            };
            (
                ScalarField::zip_map(&ins, |m| inv(m, true)),
                ScalarField::zip_map(&ins, |m| inv(m, false)),
            )
        }
    };
    Ok(Object::Vector(VectorField::new(u, v)?))
}
