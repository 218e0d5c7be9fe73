use super::simplify::{add, div, func, mul, neg, pow, simplify, sub};
use super::{BinOp, Expr, Func, Var};

/// Exact partial derivative of `e` with respect to `var`, simplified.
///
/// `abs` differentiates to `f' * f/abs(f)`, which is NaN where `f = 0`.
pub fn differentiate(e: &Expr, var: Var) -> Expr {
    simplify(&d(e, var))
}

fn d(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(d(a, var)),
        Expr::Func(f, a) => {
            let a = simplify(a);
            let da = d(&a, var);
            if da.is_const(0.0) {
                return Expr::Const(0.0);
            }
            let outer = match f {
                Func::Sin => func(Func::Cos, a),
                Func::Cos => neg(func(Func::Sin, a)),
                Func::Tan => return div(da, pow(func(Func::Cos, a), Expr::Const(2.0))),
                Func::Sinh => func(Func::Cosh, a),
                Func::Cosh => func(Func::Sinh, a),
                Func::Tanh => return div(da, pow(func(Func::Cosh, a), Expr::Const(2.0))),
                Func::Exp => func(Func::Exp, a),
                Func::Ln => return div(da, a),
                Func::Log10 => return div(da, mul(a, func(Func::Ln, Expr::Const(10.0)))),
                Func::Sqrt => return div(da, mul(Expr::Const(2.0), func(Func::Sqrt, a))),
                Func::Abs => {
                    let sign = div(a.clone(), func(Func::Abs, a));
                    return mul(da, sign);
                }
            };
            mul(outer, da)
        }
        Expr::Binary(op, a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            let (da, db) = (d(&a, var), d(&b, var));
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b), mul(a, db)),
                BinOp::Div => {
                    if db.is_const(0.0) {
                        return div(da, b);
                    }
                    div(
                        sub(mul(da, b.clone()), mul(a, db)),
                        pow(b, Expr::Const(2.0)),
                    )
                }
                BinOp::Pow => d_pow(a, b, da, db),
            }
        }
    }
}

fn d_pow(base: Expr, exp: Expr, dbase: Expr, dexp: Expr) -> Expr {
    if let Some(c) = exp.as_const() {
        // c * f^(c-1) * f'
        return mul(mul(Expr::Const(c), pow(base, Expr::Const(c - 1.0))), dbase);
    }
    if base.as_const().is_some() {
        // a^g * ln(a) * g'
        let ln_a = func(Func::Ln, base.clone());
        return mul(mul(pow(base, exp), ln_a), dexp);
    }
    // f^g * (g' ln f + g f'/f)
    let whole = pow(base.clone(), exp.clone());
    let inner = add(
        mul(dexp, func(Func::Ln, base.clone())),
        div(mul(exp, dbase), base),
    );
    mul(whole, inner)
}
