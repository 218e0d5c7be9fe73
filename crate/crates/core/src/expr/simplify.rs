//! Local simplification: constant folding and identity elimination.
//!
//! The constructors here assume simplified children and return a simplified
//! node, so `simplify` is idempotent by construction. No rule reorders
//! floating-point operations, and arithmetic on two constants is folded only
//! when the result is exact (`2*0.5` folds, `1/3` stays a quotient).

use super::{BinOp, Expr, Func};

fn fold(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

fn exact_sum(a: f64, b: f64) -> Option<f64> {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s.is_finite() && err == 0.0).then_some(s)
}

fn exact_product(a: f64, b: f64) -> Option<f64> {
    let p = a * b;
    (p.is_finite() && a.mul_add(b, -p) == 0.0).then_some(p)
}

fn exact_quotient(a: f64, b: f64) -> Option<f64> {
    let q = a / b;
    (q.is_finite() && q.mul_add(b, -a) == 0.0).then_some(q)
}

fn both(a: &Expr, b: &Expr) -> Option<(f64, f64)> {
    Some((a.as_const()?, b.as_const()?))
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::negate(other),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if let Some(e) = both(&a, &b)
        .and_then(|(x, y)| exact_sum(x, y))
        .and_then(fold)
    {
        return e;
    }
    if a.is_const(0.0) {
        return b;
    }
    if b.is_const(0.0) {
        return a;
    }
    Expr::binary(BinOp::Add, a, b)
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if let Some(e) = both(&a, &b)
        .and_then(|(x, y)| exact_sum(x, -y))
        .and_then(fold)
    {
        return e;
    }
    if b.is_const(0.0) {
        return a;
    }
    if a.is_const(0.0) {
        return neg(b);
    }
    Expr::binary(BinOp::Sub, a, b)
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if let Some(e) = both(&a, &b)
        .and_then(|(x, y)| exact_product(x, y))
        .and_then(fold)
    {
        return e;
    }
    if a.is_const(0.0) || b.is_const(0.0) {
        return Expr::Const(0.0);
    }
    if a.is_const(1.0) {
        return b;
    }
    if b.is_const(1.0) {
        return a;
    }
    if a.is_const(-1.0) {
        return neg(b);
    }
    if b.is_const(-1.0) {
        return neg(a);
    }
    Expr::binary(BinOp::Mul, a, b)
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if let Some(e) = both(&a, &b)
        .and_then(|(x, y)| exact_quotient(x, y))
        .and_then(fold)
    {
        return e;
    }
    if a.is_const(0.0) {
        return Expr::Const(0.0);
    }
    if b.is_const(1.0) {
        return a;
    }
    if b.is_const(-1.0) {
        return neg(a);
    }
    Expr::binary(BinOp::Div, a, b)
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    if let Some(e) = both(&a, &b).and_then(|(x, y)| fold(x.powf(y))) {
        return e;
    }
    if b.is_const(1.0) {
        return a;
    }
    // x^0 = 1 taking x != 0; 1^x = 1 holds in IEEE for every x
    if b.is_const(0.0) || a.is_const(1.0) {
        return Expr::Const(1.0);
    }
    Expr::binary(BinOp::Pow, a, b)
}

pub(crate) fn func(f: Func, a: Expr) -> Expr {
    if let Some(e) = a.as_const().and_then(|c| fold(f.apply(c))) {
        return e;
    }
    Expr::apply(f, a)
}

pub(crate) fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
    match op {
        BinOp::Add => add(a, b),
        BinOp::Sub => sub(a, b),
        BinOp::Mul => mul(a, b),
        BinOp::Div => div(a, b),
        BinOp::Pow => pow(a, b),
    }
}

/// Bottom-up constant folding and identity elimination.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Neg(a) => neg(simplify(a)),
        Expr::Func(f, a) => func(*f, simplify(a)),
        Expr::Binary(op, a, b) => binary(*op, simplify(a), simplify(b)),
    }
}
