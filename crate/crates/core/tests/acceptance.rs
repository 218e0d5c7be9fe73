//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any fails. Every expected value below comes from a formula
//! written out by hand in this file, a finite-difference estimate, or an
//! algebraic identity; none is read back from the library.

#![allow(clippy::needless_range_loop)]

use dform_core::calculus::{self, Mode, ZoomSpec};
use dform_core::expr::{parse, Expr, Var};
use dform_core::fields::{
    Axis, Form0, Form1, Form2, Grid2, Metric, Object, PointKind, ScalarField, VectorField,
};
use dform_core::render::{render_svg, scene_object, PlotStyle, Primitive, Scene};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

type Outcome = Result<String, String>;

const A: Option<Mode> = Some(Mode::Analytic);
const N: Option<Mode> = Some(Mode::Numeric);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- corpora

/// Random equations over x, y. Divisions and logs are guarded so the
/// corpora stay finite on the small test grids; `exp` only wraps leaves.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..7) {
            0 | 1 => "x".into(),
            2 | 3 => "y".into(),
            4 => format!("{}", rng.random_range(1..6)),
            5 => "0.5".into(),
            _ => "1.5".into(),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.random_range(0..12) {
        0 | 1 => format!("({a} + {})", random_expr(rng, depth - 1)),
        2 => format!("({a} - {})", random_expr(rng, depth - 1)),
        3..=5 => format!("{a}*{}", random_expr(rng, depth - 1)),
        6 => format!("{a}/(1 + ({})^2)", random_expr(rng, depth - 1)),
        7 => format!("({a})^{}", rng.random_range(2..4)),
        8 => format!("-{a}"),
        9 => {
            let f = ["sin", "cos", "tanh"][rng.random_range(0..3)];
            format!("{f}({a})")
        }
        10 => {
            let leaf = ["x", "y", "x*y", "-x"][rng.random_range(0..4)];
            let f = ["exp", "sinh", "cosh"][rng.random_range(0..3)];
            format!("{f}({leaf})*{a}")
        }
        _ => {
            let f = ["sqrt", "ln"][rng.random_range(0..2)];
            format!("{f}(1 + ({a})^2)")
        }
    }
}

fn corpus(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_expr(&mut rng, 3)).collect()
}

fn grid(min: f64, max: f64, n: usize) -> Grid2 {
    Grid2::square(min, max, n).unwrap()
}

fn small() -> Grid2 {
    grid(-2.0, 2.0, 9)
}

fn f0(e: &str) -> Object {
    Object::Form0(Form0::parse(small(), e).unwrap())
}

fn f1(a: &str, b: &str) -> Object {
    Object::Form1(Form1::parse(small(), a, b).unwrap())
}

fn f2(e: &str) -> Object {
    Object::Form2(Form2::parse(small(), e).unwrap())
}

fn vf(a: &str, b: &str) -> VectorField {
    VectorField::parse(small(), a, b).unwrap()
}

fn as_vf(o: Object) -> VectorField {
    match o {
        Object::Vector(v) => v,
        other => panic!("expected a vector field, got {:?}", other.kind()),
    }
}

// ---------------------------------------------------------------- comparisons

/// Both objects of one kind, every component equation identical after
/// subtraction, and every unmasked value equal to zero in the difference.
fn exactly_equal(a: &Object, b: &Object) -> Result<(), String> {
    ensure!(
        a.kind() == b.kind(),
        "kinds differ: {} vs {}",
        a.kind(),
        b.kind()
    );
    let d = ok(calculus::sub(a, b, A))?;
    for c in d.components() {
        let e = c.expr().ok_or("difference lost its equation")?;
        ensure!(e.is_const(0.0), "difference is {e}, not 0");
        ensure!(
            c.values()
                .iter()
                .zip(c.mask())
                .all(|(&v, k)| k.is_masked() || v == 0.0),
            "difference has non-zero values"
        );
    }
    Ok(())
}

/// Equal values at every point (`-0 == 0`; NaN matches NaN).
fn values_equal(a: &Object, b: &Object) -> bool {
    a.kind() == b.kind()
        && a.components().iter().zip(b.components()).all(|(x, y)| {
            x.values()
                .iter()
                .zip(y.values())
                .all(|(p, q)| p == q || (p.is_nan() && q.is_nan()))
        })
}

/// Largest `|a - b| / max(1, |a|)` over points unmasked in both.
fn max_rel(a: &Object, b: &Object) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.components().iter().zip(b.components()) {
        for k in 0..x.values().len() {
            if x.mask()[k].is_masked() || y.mask()[k].is_masked() {
                continue;
            }
            let (p, q) = (x.values()[k], y.values()[k]);
            worst = worst.max((p - q).abs() / p.abs().max(1.0));
        }
    }
    worst
}

fn unmasked_max_abs(f: &ScalarField) -> f64 {
    f.values()
        .iter()
        .zip(f.mask())
        .filter(|(_, k)| !k.is_masked())
        .fold(0.0, |m, (v, _)| m.max(v.abs()))
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let phis = corpus(1, 20);
    let alphas: Vec<(String, String)> = corpus(2, 20).into_iter().zip(corpus(3, 20)).collect();
    let betas: Vec<(String, String)> = corpus(4, 20).into_iter().zip(corpus(5, 20)).collect();
    let ws = corpus(6, 20);
    let vs: Vec<(String, String)> = corpus(7, 20).into_iter().zip(corpus(8, 20)).collect();
    let us: Vec<(String, String)> = corpus(9, 20).into_iter().zip(corpus(10, 20)).collect();
    let mut worst_leibniz = 0.0f64;

    for (i, phi) in phis.iter().enumerate() {
        let dd = ok(calculus::ext_d(&ok(calculus::ext_d(&f0(phi), A))?, A))?;
        let w = &dd.components()[0];
        ensure!(
            w.expr().is_some_and(|e| e.is_const(0.0)),
            "d(d({phi})) = {:?}",
            w.expr().map(|e| e.to_string())
        );
        ensure!(
            unmasked_max_abs(w) == 0.0,
            "d(d({phi})) has non-zero values"
        );
        ensure!(w.masked_count() == 0, "case {i}: d(d(phi)) masked points");
    }

    // graded commutativity for every degree pair with p + q <= 2
    for i in 0..20 {
        let (a1, a2) = &alphas[i];
        let (b1, b2) = &betas[i];
        let cases: [(Object, Object, bool); 5] = [
            (f1(a1, a2), f1(b1, b2), true),
            (f0(&phis[i]), f0(&ws[i]), false),
            (f0(&phis[i]), f1(a1, a2), false),
            (f0(&phis[i]), f2(&ws[i]), false),
            (f1(a1, a2), f1(a1, a2), true),
        ];
        for (a, b, odd) in &cases {
            for mode in [A, N] {
                let ab = ok(calculus::wedge(a, b, mode))?;
                let ba = ok(calculus::wedge(b, a, mode))?;
                let ba = if *odd {
                    ok(calculus::scale(&ba, -1.0, mode))?
                } else {
                    ba
                };
                ensure!(
                    values_equal(&ab, &ba),
                    "case {i}: a^b and (-1)^pq b^a differ ({mode:?})"
                );
                if mode == A {
                    exactly_equal(&ab, &ba).map_err(|e| format!("case {i} wedge: {e}"))?;
                }
            }
        }
    }

    // i_v i_w + i_w i_v = 0 and linearity of i on 1- and 2-forms
    for i in 0..20 {
        let w = f2(&ws[i]);
        let alpha = f1(&alphas[i].0, &alphas[i].1);
        let v = vf(&vs[i].0, &vs[i].1);
        let u = vf(&us[i].0, &us[i].1);
        let vw = ok(calculus::interior_d(
            &ok(calculus::interior_d(&w, Some(&u), A))?,
            Some(&v),
            A,
        ))?;
        let wv = ok(calculus::interior_d(
            &ok(calculus::interior_d(&w, Some(&v), A))?,
            Some(&u),
            A,
        ))?;
        let s = ok(calculus::add(&vw, &wv, A))?;
        ensure!(
            s.components()[0].expr().is_some_and(|e| e.is_const(0.0)),
            "case {i}: i_v i_w + i_w i_v != 0"
        );
        ensure!(
            unmasked_max_abs(s.components()[0]) == 0.0,
            "case {i}: i_v i_w + i_w i_v has values"
        );

        let sum = as_vf(ok(calculus::add(
            &Object::Vector(v.clone()),
            &Object::Vector(u.clone()),
            A,
        ))?);
        let c = 1.0 + i as f64 / 4.0;
        let cv = as_vf(ok(calculus::scale(&Object::Vector(v.clone()), c, A))?);
        for form in [&w, &alpha] {
            let lhs = ok(calculus::interior_d(form, Some(&sum), A))?;
            let rhs = ok(calculus::add(
                &ok(calculus::interior_d(form, Some(&v), A))?,
                &ok(calculus::interior_d(form, Some(&u), A))?,
                A,
            ))?;
            exactly_equal(&lhs, &rhs).map_err(|e| format!("case {i}: i_(v+u) additivity: {e}"))?;
            let lhs = ok(calculus::interior_d(form, Some(&cv), A))?;
            let rhs = ok(calculus::scale(
                &ok(calculus::interior_d(form, Some(&v), A))?,
                c,
                A,
            ))?;
            exactly_equal(&lhs, &rhs).map_err(|e| format!("case {i}: i_(cv) homogeneity: {e}"))?;
        }
    }

    // ** = (-1)^(p(2-p))
    for i in 0..20 {
        let objs = [
            (f0(&phis[i]), 1.0),
            (f1(&alphas[i].0, &alphas[i].1), -1.0),
            (f2(&ws[i]), 1.0),
        ];
        for (obj, sign) in &objs {
            for mode in [A, N] {
                let hh = ok(calculus::hodge(&ok(calculus::hodge(obj, mode))?, mode))?;
                let same = hh.kind() == obj.kind()
                    && hh.components().iter().zip(obj.components()).all(|(h, o)| {
                        h.values()
                            .iter()
                            .zip(o.values())
                            .all(|(p, q)| *p == sign * q)
                    });
                ensure!(same, "case {i}: ** on a {} ({mode:?})", obj.kind());
                if mode == A {
                    let want = ok(calculus::scale(obj, *sign, mode))?;
                    exactly_equal(&hh, &want).map_err(|e| format!("case {i} **: {e}"))?;
                }
            }
        }
    }

    // Leibniz for d and for i
    for i in 0..20 {
        let phi = f0(&phis[i]);
        let psi = f0(&ws[i]);
        let alpha = f1(&alphas[i].0, &alphas[i].1);
        let beta = f1(&betas[i].0, &betas[i].1);
        let v = vf(&vs[i].0, &vs[i].1);
        let d = |o: &Object| ok(calculus::ext_d(o, A));
        let w = |a: &Object, b: &Object| ok(calculus::wedge(a, b, A));
        let i_v = |o: &Object| ok(calculus::interior_d(o, Some(&v), A));
        let add = |a: &Object, b: &Object| ok(calculus::add(a, b, A));
        let sub = |a: &Object, b: &Object| ok(calculus::sub(a, b, A));

        let checks = [
            (
                "d(phi psi)",
                d(&w(&phi, &psi)?)?,
                add(&w(&d(&phi)?, &psi)?, &w(&phi, &d(&psi)?)?)?,
            ),
            (
                "d(phi alpha)",
                d(&w(&phi, &alpha)?)?,
                add(&w(&d(&phi)?, &alpha)?, &w(&phi, &d(&alpha)?)?)?,
            ),
            (
                "d(alpha phi)",
                d(&w(&alpha, &phi)?)?,
                sub(&w(&d(&alpha)?, &phi)?, &w(&alpha, &d(&phi)?)?)?,
            ),
            (
                "i(alpha beta)",
                i_v(&w(&alpha, &beta)?)?,
                sub(&w(&i_v(&alpha)?, &beta)?, &w(&alpha, &i_v(&beta)?)?)?,
            ),
            (
                "i(phi beta)",
                i_v(&w(&phi, &beta)?)?,
                w(&phi, &i_v(&beta)?)?,
            ),
        ];
        for (name, lhs, rhs) in &checks {
            let r = max_rel(lhs, rhs);
            worst_leibniz = worst_leibniz.max(r);
            ensure!(r <= 1e-10, "case {i}: {name} off by {r:e}");
            exactly_equal(lhs, rhs).map_err(|e| format!("case {i}: {name}: {e}"))?;
        }
    }

    Ok(format!(
        "d∘d, graded commutativity, i antisymmetry and linearity, ** exact on 20 cases each; \
         Leibniz exact, worst value mismatch {worst_leibniz:.1e}"
    ))
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    // ext_d of u and v as 0-forms, against their hand-written gradients
    type Gradient = fn(f64, f64) -> [f64; 2];
    let grads: [(&str, Gradient); 2] = [
        ("y*sin(x)", |x, y| [y * x.cos(), x.sin()]),
        ("-x*cos(y)", |x, y| [-y.cos(), x * y.sin()]),
    ];
    let mut report = vec![];
    for (src, grad) in grads {
        let mut errs = vec![];
        for n in [31, 61] {
            let g = grid(-5.0, 5.0, n);
            let phi = Object::Form0(ok(Form0::parse(g, src))?);
            let exact = ok(calculus::ext_d(&phi, A))?;
            let approx = ok(calculus::ext_d(&phi, N))?;
            let mut err = 0.0f64;
            for (k, (x, y)) in g.points().into_iter().enumerate() {
                let want = grad(x, y);
                for c in 0..2 {
                    let e = exact.components()[c].values()[k];
                    ensure!(
                        (e - want[c]).abs() <= 1e-12,
                        "analytic d({src}) wrong at ({x}, {y})"
                    );
                    err = err.max((approx.components()[c].values()[k] - e).abs());
                }
            }
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        ensure!(
            ratio >= 3.5,
            "d({src}): error ratio {ratio:.3} ({:.3e} -> {:.3e})",
            errs[0],
            errs[1]
        );
        report.push(format!(
            "d({src}) {:.2e} -> {:.2e} (x{ratio:.2})",
            errs[0], errs[1]
        ));
    }

    // on the 1-form itself d needs only d/dx of -x cos(y) and d/dy of y sin(x),
    // both linear in the differentiated variable, so the stencil is exact
    let mut exact_err = 0.0f64;
    for n in [31, 61] {
        let g = grid(-5.0, 5.0, n);
        let alpha = Object::Form1(ok(Form1::parse(g, "y*sin(x)", "-x*cos(y)"))?);
        let e = ok(calculus::ext_d(&alpha, A))?;
        let a = ok(calculus::ext_d(&alpha, N))?;
        for (k, (x, y)) in g.points().into_iter().enumerate() {
            let want = -(y.cos()) - x.sin();
            ensure!(
                (e.components()[0].values()[k] - want).abs() <= 1e-12,
                "analytic d(alpha) wrong at ({x}, {y})"
            );
            exact_err = exact_err.max((a.components()[0].values()[k] - want).abs());
        }
    }
    ensure!(exact_err <= 1e-12, "numeric d(alpha) off by {exact_err:e}");

    let g = grid(-5.0, 5.0, 31);
    let phi = Object::Form0(ok(Form0::parse(g, "sin(x*y)"))?);
    let dd = ok(calculus::ext_d(&ok(calculus::ext_d(&phi, N))?, N))?;
    let residue = unmasked_max_abs(dd.components()[0]);
    // one numeric stage applied to the exact gradient: the scheme's own error
    let bound =
        unmasked_max_abs(ok(calculus::ext_d(&ok(calculus::ext_d(&phi, A))?, N))?.components()[0]);
    ensure!(residue > 0.0, "numeric d(d(phi)) came out exactly zero");
    ensure!(
        residue < bound,
        "numeric d(d(phi)) = {residue:e} exceeds the truncation error {bound:e}"
    );
    Ok(format!(
        "{}; numeric d(alpha) within {exact_err:.1e} of analytic; numeric d(d(sin(xy))) = {residue:.1e} (< {bound:.1e})",
        report.join(", ")
    ))
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let alpha = Object::Form1(ok(Form1::parse(
        grid(-5.0, 5.0, 31),
        "y*sin(x)",
        "-x*cos(y)",
    ))?);
    let mut spreads: Vec<[f64; 2]> = vec![];
    for mag in [1.0, 2.0, 4.0, 8.0] {
        let spec = ZoomSpec {
            target: [2.0, 3.0],
            mag,
            dpd: 7,
            ..ZoomSpec::default()
        };
        let z = ok(calculus::zoom(&alpha, &spec))?;
        ensure!(z.object.grid().len() == 49, "window is not 7x7");
        // oracle: evaluate the components by hand over the window
        let mut s = [0.0; 2];
        for (c, f) in [|x: f64, y: f64| y * x.sin(), |x: f64, y: f64| -x * y.cos()]
            .iter()
            .enumerate()
        {
            let vals: Vec<f64> = z
                .object
                .grid()
                .points()
                .iter()
                .map(|&(x, y)| f(x, y))
                .collect();
            let got = z.object.components()[c].values();
            ensure!(
                vals.iter().zip(got).all(|(a, b)| (a - b).abs() <= 1e-12),
                "zoomed component {c} disagrees with the hand values at mag {mag}"
            );
            s[c] = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
        }
        spreads.push(s);
    }
    for c in 0..2 {
        ensure!(
            spreads[1][c] < 0.55 * spreads[0][c],
            "component {c}: spread at mag 2 is {:.4} vs {:.4} at mag 1",
            spreads[1][c],
            spreads[0][c]
        );
        ensure!(
            spreads.windows(2).all(|w| w[1][c] < w[0][c]),
            "component {c}: spreads not decreasing"
        );
    }
    let fmt: Vec<String> = spreads
        .iter()
        .map(|s| format!("({:.3}, {:.3})", s[0], s[1]))
        .collect();
    Ok(format!("spreads at mag 1,2,4,8: {}", fmt.join(" ")))
}

// ---------------------------------------------------------------- 4

/// Cross product in the right-handed cylindrical frame (ρ, φ, z).
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn criterion_4() -> Outcome {
    let g = ok(Grid2::new(
        ok(Axis::new(0.5, 5.0, 31))?,
        ok(Axis::new(-5.0, 5.0, 31))?,
    ))?;
    let b = Object::Form2(ok(Form2::parse(g, "1/x"))?);
    let v = ok(VectorField::parse(g, "0", "1"))?;
    let mut worst = 0.0f64;
    for mode in [A, N] {
        let force = ok(calculus::interior_d(&b, Some(&v), mode))?;
        ensure!(
            matches!(force, Object::Form1(_)),
            "interior_d gave a {}",
            force.kind()
        );
        let vec = ok(calculus::contravariant(&force, None, mode))?;
        ensure!(
            matches!(vec, Object::Vector(_)),
            "contravariant gave a {}",
            vec.kind()
        );
        for (k, (x, _)) in g.points().into_iter().enumerate() {
            // plane (x, y) = (ρ, z); v = ẑ, B = φ̂ / ρ
            let f = cross([0.0, 0.0, 1.0], [0.0, 1.0 / x, 0.0]);
            let want = [f[0], f[2]];
            for c in 0..2 {
                let e1 = (force.components()[c].values()[k] - want[c]).abs();
                let e2 = (vec.components()[c].values()[k] - want[c]).abs();
                worst = worst.max(e1).max(e2);
            }
        }
    }
    ensure!(worst <= 1e-12, "max deviation from v x B is {worst:e}");
    Ok(format!(
        "i_v B = (-1/x, 0) and its vector equal v x B, max deviation {worst:.1e}"
    ))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let g = ok(Grid2::new(
        ok(Axis::new(0.1, 4.0, 31))?,
        ok(Axis::new(-2.0, 2.0, 31))?,
    ))?;
    let mut metrics = vec![(
        "black hole".to_string(),
        ["tanh(x)^2*cosh(x)^(4/3)", "0", "0", "1"].map(String::from),
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..5 {
        let wrap = ["sin", "cos", "tanh"];
        let l: Vec<String> = (0..3)
            .map(|k| {
                format!(
                    "{}*{}({})",
                    1 + k % 2,
                    wrap[(i + k) % 3],
                    random_expr(&mut rng, 2)
                )
            })
            .collect();
        // L L^T + I with L lower triangular and bounded: eigenvalues in [1, 15]
        let xx = format!("1 + ({})^2", l[0]);
        let xy = format!("({})*({})", l[0], l[1]);
        let yy = format!("1 + ({})^2 + ({})^2", l[1], l[2]);
        metrics.push((format!("random {i}"), [xx, xy.clone(), xy, yy]));
    }
    let fields = [("x + 2*y", "3*x - 4*y"), ("y*sin(x)", "-x*cos(y)")];
    let mut worst = 0.0f64;
    let mut cond = 0.0f64;
    for (name, comps) in &metrics {
        let m = ok(Metric::parse(
            g,
            [&comps[0], &comps[1], &comps[2], &comps[3]],
        ))?;
        ensure!(
            m.det().iter().all(|&d| d > 0.0),
            "{name}: metric not positive definite on the grid"
        );
        for k in 0..g.len() {
            let (a, b, d) = (m.xx().values()[k], m.xy().values()[k], m.yy().values()[k]);
            let (mean, dev) = ((a + d) / 2.0, ((a - d) * (a - d) / 4.0 + b * b).sqrt());
            cond = cond.max((mean + dev) / (mean - dev));
        }
        for (u, v) in fields {
            let f = Object::Vector(ok(VectorField::parse(g, u, v))?);
            for mode in [A, N] {
                let back = ok(calculus::contravariant(
                    &ok(calculus::covariant(&f, Some(&m), mode))?,
                    Some(&m),
                    mode,
                ))?;
                let r = max_rel(&f, &back);
                ensure!(
                    r <= 1e-12,
                    "{name}, ({u}, {v}), {mode:?}: round trip off by {r:e}"
                );
                ensure!(
                    back.components().iter().all(|c| c.masked_count() == 0),
                    "{name}: masked points"
                );
                worst = worst.max(r);
            }
        }
    }
    Ok(format!(
        "black-hole and 5 random SPD metrics (condition number <= {cond:.0}), both modes, worst relative error {worst:.1e}"
    ))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    // dyadic window: [-4, 4] at mag 2 around (2, 3) is [0, 4] x [1, 5], spacing 0.5
    let g = grid(-4.0, 4.0, 17);
    let spec = ZoomSpec {
        target: [2.0, 3.0],
        mag: 2.0,
        dpd: 9,
        inset: false,
        ..ZoomSpec::default()
    };
    let field = |u: &str, v: &str| Object::Vector(VectorField::parse(g, u, v).unwrap());
    let zero = |o: &Object| {
        o.components()
            .iter()
            .all(|c| c.values().iter().all(|&v| v == 0.0))
    };
    for a in ["1.5", "0.25", "3"] {
        let f = field(&format!("{a}*x"), &format!("{a}*y"));
        let d = ok(calculus::deriv(&f, &spec))?.object;
        let dv = ok(calculus::div(&f, &spec))?.object;
        let cu = ok(calculus::curl(&f, &spec))?.object;
        ensure!(zero(&cu), "F = ({a}x, {a}y): curl projection is not zero");
        ensure!(
            values_equal(&dv, &d),
            "F = ({a}x, {a}y): div projection differs from deriv"
        );
        let rot = field(&format!("-{a}*y"), &format!("{a}*x"));
        let d = ok(calculus::deriv(&rot, &spec))?.object;
        let dv = ok(calculus::div(&rot, &spec))?.object;
        let cu = ok(calculus::curl(&rot, &spec))?.object;
        ensure!(zero(&dv), "F = (-{a}y, {a}x): div projection is not zero");
        ensure!(
            values_equal(&cu, &d),
            "F = (-{a}y, {a}x): curl projection differs from deriv"
        );
    }

    // (y sin x, -x cos y) against its hand-written Jacobian and Hessians
    let (x0, y0) = (2.0f64, 3.0f64);
    let jac = [[y0 * x0.cos(), x0.sin()], [-y0.cos(), x0 * y0.sin()]];
    let f = Object::Vector(ok(VectorField::parse(
        grid(-5.0, 5.0, 31),
        "y*sin(x)",
        "-x*cos(y)",
    ))?);
    let mut report = vec![];
    for mag in [1.5, 3.0, 6.0, 12.0] {
        let spec = ZoomSpec {
            target: [x0, y0],
            mag,
            dpd: 9,
            ..ZoomSpec::default()
        };
        let d = ok(calculus::deriv(&f, &spec))?.object;
        let w = *d.grid();
        let r = (w.x.half_extent().powi(2) + w.y.half_extent().powi(2)).sqrt();
        // |D - J e| <= M r^2 / 2 with M the largest Hessian norm over the window
        let hess = |x: f64, y: f64| -> f64 {
            let h1 = [-y * x.sin(), x.cos(), x.cos(), 0.0];
            let h2 = [0.0, y.sin(), y.sin(), x * y.cos()];
            let fro = |h: [f64; 4]| h.iter().map(|v| v * v).sum::<f64>().sqrt();
            fro(h1).max(fro(h2))
        };
        let mut m = 0.0f64;
        for i in 0..=40 {
            for j in 0..=40 {
                let x = w.x.min + (w.x.max - w.x.min) * i as f64 / 40.0;
                let y = w.y.min + (w.y.max - w.y.min) * j as f64 / 40.0;
                m = m.max(hess(x, y));
            }
        }
        // grid sampling of M is refined by a 10% margin
        let bound = 0.5 * 1.1 * m * r * r;
        let mut err = 0.0f64;
        for (k, (x, y)) in w.points().into_iter().enumerate() {
            let e = [x - x0, y - y0];
            for c in 0..2 {
                let lin = jac[c][0] * e[0] + jac[c][1] * e[1];
                err = err.max((d.components()[c].values()[k] - lin).abs());
            }
        }
        ensure!(
            err <= bound,
            "mag {mag}: Jacobian error {err:e} above C r^2 = {bound:e}"
        );
        report.push(format!("{err:.2e}<={bound:.2e}"));
    }
    Ok(format!(
        "linear fields exact; (y sin x, -x cos y) Jacobian error vs C r^2: {}",
        report.join(", ")
    ))
}

// ---------------------------------------------------------------- 7

fn yukawa_grad(x: f64, y: f64) -> [f64; 2] {
    let r = (x * x + y * y).sqrt();
    let s = -(-r).exp() * (1.0 + r) / (r * r * r);
    [s * x, s * y]
}

fn criterion_7() -> Outcome {
    let g = grid(-5.0, 5.0, 27);
    let phi = Object::Form0(ok(Form0::parse(g, "exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)"))?);
    ensure!(
        phi.components()[0].kind_at(13, 13) == PointKind::Infinite,
        "phi at the origin is not infinite"
    );
    let dphi = ok(calculus::ext_d(&phi, A))?;
    let undefined: Vec<usize> = (0..g.len())
        .filter(|&k| {
            dphi.components()
                .iter()
                .any(|c| c.mask()[k] == PointKind::Undefined)
        })
        .collect();
    ensure!(
        undefined == vec![g.index(13, 13)],
        "undefined points {undefined:?}"
    );
    ensure!(
        dphi.components().iter().all(|c| c
            .mask()
            .iter()
            .filter(|k| **k == PointKind::Infinite)
            .count()
            == 0),
        "dphi has infinite points"
    );

    for log in [false, true] {
        let style = PlotStyle {
            log_scaling: log,
            ..PlotStyle::default()
        };
        let scene = scene_object(&dphi, &style);
        let markers: Vec<_> = scene.markers().collect();
        ensure!(markers.len() == 1, "{} markers", markers.len());
        ensure!(
            markers[0] == ([0.0, 0.0], PointKind::Undefined),
            "marker {:?}",
            markers[0]
        );

        let mag = |x: f64, y: f64| {
            let [a, b] = yukawa_grad(x, y);
            let m = a.hypot(b);
            if log {
                m.ln_1p() / std::f64::consts::LN_10
            } else {
                m
            }
        };
        let pts: Vec<(f64, f64)> = g
            .points()
            .into_iter()
            .filter(|&(x, y)| (x, y) != (0.0, 0.0))
            .collect();
        ensure!(pts.len() == 728, "{} regular points", pts.len());
        let m_max = pts.iter().map(|&(x, y)| mag(x, y)).fold(0.0, f64::max);
        let mut stacks = 0;
        for p in &scene.primitives {
            if let Primitive::Stack { p, n, .. } = p {
                stacks += 1;
                let exact = style.max_sheets as f64 * mag(p[0], p[1]) / m_max;
                let want = (exact.ceil() as usize).clamp(1, style.max_sheets);
                let tie = (exact - exact.round()).abs() < 1e-9;
                ensure!(
                    *n == want || tie,
                    "stack at {p:?}: {n} sheets, expected {want}"
                );
            }
        }
        ensure!(stacks == 728, "{stacks} stacks");
        let svg = render_svg(&scene);
        ensure!(
            svg.matches(r#"fill="grey""#).count() == 1,
            "grey squares in svg: {}",
            svg.matches(r#"fill="grey""#).count()
        );
        ensure!(!svg.contains("<circle"), "unexpected red circle");
    }

    let g = grid(-2.0, 2.0, 9);
    let w = Object::Form2(ok(Form2::parse(g, "1/x"))?);
    let scene = scene_object(&w, &PlotStyle::default());
    let markers: Vec<_> = scene.markers().collect();
    ensure!(markers.len() == 9, "{} markers for 1/x", markers.len());
    ensure!(
        markers
            .iter()
            .all(|(p, k)| p[0] == 0.0 && *k == PointKind::Infinite),
        "1/x markers {markers:?}"
    );
    let svg = render_svg(&scene);
    ensure!(
        svg.matches(r#"<circle"#).count() == 9 && svg.matches(r#"fill="red""#).count() == 9,
        "1/x svg circles"
    );
    Ok("Yukawa d(phi): one undefined point, one grey marker, counts scaled by the 728-point maximum; 1/x: 9 red circles".into())
}

// ---------------------------------------------------------------- 8

fn same_structure(a: &Scene, b: &Scene, exact_angles: bool) -> Result<f64, String> {
    ensure!(
        a.primitives.len() == b.primitives.len(),
        "primitive counts differ"
    );
    let mut worst = 0.0f64;
    for (p, q) in a.primitives.iter().zip(&b.primitives) {
        match (p, q) {
            (
                Primitive::Stack {
                    n: n1, angle: a1, ..
                },
                Primitive::Stack {
                    n: n2, angle: a2, ..
                },
            ) => {
                ensure!(n1 == n2, "sheet counts {n1} vs {n2}");
                worst = worst.max((a1 - a2).abs());
                ensure!(
                    !exact_angles || a1.to_bits() == a2.to_bits(),
                    "angles {a1} vs {a2}"
                );
            }
            (Primitive::Block { n: n1, of: o1, .. }, Primitive::Block { n: n2, of: o2, .. }) => {
                ensure!(n1 == n2 && o1 == o2, "square counts {n1}/{o1} vs {n2}/{o2}");
            }
            (Primitive::Arrow { d: d1, len: l1, .. }, Primitive::Arrow { d: d2, len: l2, .. }) => {
                let da = d1[1].atan2(d1[0]) - d2[1].atan2(d2[0]);
                worst = worst.max(da.abs());
                ensure!(
                    !exact_angles || d1 == d2,
                    "arrow directions {d1:?} vs {d2:?}"
                );
                ensure!(
                    (l1 - l2).abs() <= 1e-12 * l1.abs().max(1.0),
                    "arrow lengths {l1} vs {l2}"
                );
            }
            (Primitive::Marker { p: p1, kind: k1 }, Primitive::Marker { p: p2, kind: k2 }) => {
                ensure!(p1 == p2 && k1 == k2, "markers differ");
            }
            _ => return Err(format!("primitive {} vs {}", p.tag(), q.tag())),
        }
    }
    ensure!(worst <= 1e-12, "angle change {worst:e}");
    Ok(worst)
}

fn criterion_8() -> Outcome {
    let g = grid(-3.0, 3.0, 15);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut scenes = 0;
    for case in 0..20 {
        let e: Vec<String> = (0..2).map(|_| random_expr(&mut rng, 3)).collect();
        let objs = [
            Object::Form1(ok(Form1::parse(g, &e[0], &e[1]))?),
            Object::Vector(ok(VectorField::parse(g, &e[0], &e[1]))?),
            Object::Form2(ok(Form2::parse(g, &e[0]))?),
        ];
        let style = PlotStyle {
            max_sheets: rng.random_range(1..=10),
            ..PlotStyle::default()
        };
        for obj in &objs {
            let base = scene_object(obj, &style);
            for p in &base.primitives {
                if let Primitive::Stack { n, .. } | Primitive::Block { n, .. } = p {
                    ensure!(
                        *n <= style.max_sheets,
                        "case {case}: count {n} above {}",
                        style.max_sheets
                    );
                }
            }
            for c in [2.0, 0.125, 1024.0, 3.7, 1e-3, 17.0, 1e6] {
                let scaled = ok(calculus::scale(obj, c, N))?;
                let dyadic = c.log2().fract() == 0.0;
                let r = same_structure(&base, &scene_object(&scaled, &style), dyadic)
                    .map_err(|e| format!("case {case}, {} x{c}: {e}", obj.kind()))?;
                worst = worst.max(r);
                scenes += 1;
            }
            let again = scene_object(obj, &style);
            ensure!(again == base, "scene not reproducible");
            ensure!(
                render_svg(&base) == render_svg(&again),
                "svg differs between runs"
            );
        }
    }
    Ok(format!(
        "{scenes} rescaled scenes: counts equal, angles bit-equal for powers of two, \
         worst angle change {worst:.1e} otherwise; svg byte-identical"
    ))
}

// ---------------------------------------------------------------- 9

const DERIV_CORPUS: [&str; 20] = [
    "x^2*y - e^(-x)",
    "y*sin(x)",
    "-x*cos(y)",
    "tan(x/3)",
    "sinh(x)*cosh(y)",
    "tanh(x*y)",
    "exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)",
    "ln(x^2+y^2+1)",
    "log10(1+x^2)*y",
    "sqrt(1+x^2+y^2)",
    "abs(x-y)*x",
    "(x^2+1)^y",
    "pi*x/(1+y^2)",
    "2.5e-1*x**3 - 4*y",
    "cos(sin(x*y))",
    "(x+y)^(1/3)",
    "1/(x-y)",
    "exp(x)*ln(abs(y))",
    "-(x - 2*y)^2/(3 + cos(x))",
    "sqrt(abs(x*y)) + e",
];

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for src in DERIV_CORPUS {
        let e: Expr = ok(parse(src))?;
        for var in [Var::X, Var::Y] {
            let d = e.diff(var);
            let mut good = 0;
            let mut tries = 0;
            while good < 100 {
                tries += 1;
                ensure!(tries < 20_000, "{src}: not enough regular points");
                let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let at = |h: f64| match var {
                    Var::X => e.eval(x + h, y),
                    Var::Y => e.eval(x, y + h),
                };
                let fd = |h: f64| (at(h) - at(-h)) / (2.0 * h);
                let (d1, d2) = (fd(1e-5), fd(2e-5));
                // regular: finite, and the two difference quotients agree
                if !(d1.is_finite() && d2.is_finite()) || (d1 - d2).abs() > 1e-8 * d1.abs() {
                    continue;
                }
                let sym = d.eval(x, y);
                let rel = if sym == d1 {
                    0.0
                } else {
                    (sym - d1).abs() / d1.abs()
                };
                ensure!(
                    rel <= 1e-5,
                    "d/d{} {src} at ({x}, {y}): {sym} vs {d1}",
                    var.name()
                );
                worst = worst.max(rel);
                good += 1;
            }
        }
    }

    let cases: [(&str, usize); 16] = [
        ("", 0),
        ("   ", 0),
        ("y*sin(x", 5),
        ("(x+y))", 5),
        ("x)", 1),
        ("x + t", 4),
        ("foo(x)", 0),
        ("log(x)", 0),
        ("y sin(x)", 2),
        ("2x", 1),
        ("(x)(y)", 3),
        ("x+", 2),
        ("x*)", 2),
        ("x $ y", 2),
        ("sin x", 4),
        ("3*-", 3),
    ];
    for (src, want) in cases {
        match parse(src) {
            Ok(e) => return Err(format!("'{src}' parsed as {e}")),
            Err(err) => ensure!(
                err.offset == want,
                "'{src}': offset {} ({err}), expected {want}",
                err.offset
            ),
        }
    }
    Ok(format!(
        "40 partials x 100 regular points, worst relative error {worst:.1e}; {} grammar errors at the right offsets",
        cases.len()
    ))
}

type Criterion = (u8, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "algebraic identities", criterion_1),
        (2, "numeric convergence", criterion_2),
        (3, "zoom spreads", criterion_3),
        (4, "Lorentz chain", criterion_4),
        (5, "metric round trip", criterion_5),
        (6, "div/curl extraction", criterion_6),
        (7, "singularities", criterion_7),
        (8, "scene invariants", criterion_8),
        (9, "parser and derivatives", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS {n} {name}: {detail} [{ms} ms]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {n} {name}: {why} [{ms} ms]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
