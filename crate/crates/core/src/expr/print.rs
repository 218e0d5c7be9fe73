use super::{BinOp, Expr};
use std::f64::consts::{E, PI};
use std::fmt;

// binding strength, matching the parser's grammar levels
const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => NEG,
        Expr::Const(_) | Expr::Var(_) | Expr::Func(..) => ATOM,
        Expr::Neg(_) => NEG,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => ADD,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => MUL,
        Expr::Binary(BinOp::Pow, ..) => POW,
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    let sign = if c.is_sign_negative() { "-" } else { "" };
    let a = c.abs();
    if a == PI {
        write!(f, "{sign}pi")
    } else if a == E {
        write!(f, "{sign}e")
    } else if a == 0.0 || (1e-4..1e16).contains(&a) {
        write!(f, "{sign}{a}")
    } else {
        // shortest round-trip digits either way
        write!(f, "{sign}{a:e}")
    }
}

fn wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        f.write_str("(")?;
        write_expr(f, e)?;
        f.write_str(")")
    } else {
        write_expr(f, e)
    }
}

pub(super) fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(c) => write_const(f, *c),
        Expr::Var(v) => f.write_str(v.name()),
        Expr::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            f.write_str(")")
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            wrapped(f, a, prec(a) < NEG)
        }
        Expr::Binary(op, a, b) => {
            let (lp, rp) = match op {
                BinOp::Add | BinOp::Sub => (prec(a) < ADD, prec(b) <= ADD),
                BinOp::Mul | BinOp::Div => (prec(a) < MUL, prec(b) <= MUL),
                BinOp::Pow => (prec(a) <= POW, prec(b) < NEG),
            };
            wrapped(f, a, lp)?;
            f.write_str(op.symbol())?;
            wrapped(f, b, rp)
        }
    }
}
