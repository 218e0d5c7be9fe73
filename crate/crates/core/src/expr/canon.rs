//! Expanded rational normal form.
//!
//! An expression is read into a fraction whose numerator is a sum of
//! monomials with exact rational coefficients and whose denominator is a
//! product of multinomial factors. Every finite `f64` is a dyadic rational,
//! so reading loses nothing, and all coefficient arithmetic is exact.
//! Monomials are products of atoms raised to rational exponents; atoms are
//! the variables, function applications with canonical arguments, powers with
//! non-constant exponent, and fractions under a non-integer power
//! (`(x+y)^0.5`). Monomial denominators are folded into negative exponents.
//!
//! Sums are taken over the least common multiple of the factor lists, so an
//! expression that is identically zero as a rational function of its atoms
//! reads as zero. Factors are not tested for common divisors, which means two
//! equal non-zero expressions can still read differently; differences are
//! what callers compare.
//!
//! Writing back emits terms in a fixed order with the coefficient first.
//! Coefficients that are not exactly representable become a quotient of
//! integers, so nothing is rounded until evaluation.

use super::{BinOp, Expr, Func, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

type Q = BigRational;

// integer powers beyond this are left symbolic
const MAX_EXPONENT: i64 = 64;
// multinomials are expanded up to this power
const MAX_EXPAND: i64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Var(Var),
    // non-finite constant, by bit pattern
    Opaque(u64),
    Func(Func, Frac),
    Pow(Frac, Frac),
    Base(Frac),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Mono(BTreeMap<Atom, Q>);

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Poly(BTreeMap<Mono, Q>);

/// `num / prod(factor^k)`. Factors have at least two terms, leading
/// coefficient one and no monomial content.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Frac {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

fn small_int(q: &Q) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    q.to_integer().to_i64().filter(|n| n.abs() <= MAX_EXPONENT)
}

impl Mono {
    fn mul(&self, other: &Mono) -> Mono {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            let sum = out.get(a).cloned().unwrap_or_else(Q::zero) + e;
            if sum.is_zero() {
                out.remove(a);
            } else {
                out.insert(a.clone(), sum);
            }
        }
        Mono(out)
    }

    fn scale_exponents(&self, q: &Q) -> Mono {
        Mono(self.0.iter().map(|(a, e)| (a.clone(), e * q)).collect())
    }
}

impl Poly {
    fn constant(q: Q) -> Poly {
        let mut p = Poly::default();
        if !q.is_zero() {
            p.0.insert(Mono::default(), q);
        }
        p
    }

    fn one() -> Poly {
        Poly::constant(Q::one())
    }

    fn monomial(m: Mono, c: Q) -> Poly {
        let mut p = Poly::default();
        p.add_term(m, c);
        p
    }

    fn atom_pow(a: Atom, e: Q) -> Poly {
        let mut m = Mono::default();
        m.0.insert(a, e);
        Poly::monomial(m, Q::one())
    }

    fn as_constant(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.0.iter().next()?;
                m.0.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        let sum = self.0.get(&m).cloned().unwrap_or_else(Q::zero) + c;
        if sum.is_zero() {
            self.0.remove(&m);
        } else {
            self.0.insert(m, sum);
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for (m, c) in other.0 {
            self.add_term(m, c);
        }
        self
    }

    fn neg(self) -> Poly {
        Poly(self.0.into_iter().map(|(m, c)| (m, -c)).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn powi(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Splits a multinomial into `c * m * unit` with `unit` normalised as a
    /// denominator factor.
    fn content(&self) -> (Q, Mono, Poly) {
        let lead = self.0.values().next().cloned().unwrap_or_else(Q::one);
        let mut atoms: BTreeMap<Atom, Q> = BTreeMap::new();
        for m in self.0.keys() {
            for a in m.0.keys() {
                atoms.entry(a.clone()).or_insert_with(Q::zero);
            }
        }
        for (a, low) in atoms.iter_mut() {
            for m in self.0.keys() {
                let e = m.0.get(a).cloned().unwrap_or_else(Q::zero);
                if e < *low {
                    *low = e;
                }
            }
        }
        atoms.retain(|_, e| !e.is_zero());
        let shift = Mono(atoms);
        let undo = shift.scale_exponents(&-Q::one());
        let unit = Poly(
            self.0
                .iter()
                .map(|(m, c)| (m.mul(&undo), c / &lead))
                .collect(),
        );
        (lead, shift, unit)
    }
}

impl Frac {
    fn poly(num: Poly) -> Frac {
        Frac {
            num,
            den: BTreeMap::new(),
        }
    }

    fn constant(q: Q) -> Frac {
        Frac::poly(Poly::constant(q))
    }

    fn atom(a: Atom) -> Frac {
        Frac::atom_pow(a, Q::one())
    }

    fn atom_pow(a: Atom, e: Q) -> Frac {
        Frac::poly(Poly::atom_pow(a, e))
    }

    fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn is_zero(&self) -> bool {
        self.num.0.is_empty()
    }

    fn normalised(self) -> Frac {
        if self.is_zero() {
            Frac::default()
        } else {
            self
        }
    }

    fn neg(self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den,
        }
    }

    // product of the factors that `lcm` has beyond `own`
    fn cofactor(own: &BTreeMap<Poly, u32>, lcm: &BTreeMap<Poly, u32>) -> Poly {
        let mut out = Poly::one();
        for (f, k) in lcm {
            let extra = k - own.get(f).copied().unwrap_or(0);
            if extra > 0 {
                out = out.mul(&f.powi(extra));
            }
        }
        out
    }

    fn add(self, other: Frac) -> Frac {
        if self.den == other.den {
            let num = self.num.add(other.num);
            return Frac { num, den: self.den }.normalised();
        }
        let mut lcm = self.den.clone();
        for (f, k) in &other.den {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        let a = self.num.mul(&Frac::cofactor(&self.den, &lcm));
        let b = other.num.mul(&Frac::cofactor(&other.den, &lcm));
        Frac {
            num: a.add(b),
            den: lcm,
        }
        .normalised()
    }

    fn mul(&self, other: &Frac) -> Frac {
        let num = self.num.mul(&other.num);
        if num.0.is_empty() {
            return Frac::default();
        }
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            *den.entry(f.clone()).or_insert(0) += k;
        }
        Frac { num, den }
    }

    fn inv(self) -> Frac {
        if self.is_zero() {
            return Frac::atom_pow(Atom::Base(self), -Q::one());
        }
        let lifted = self
            .den
            .iter()
            .fold(Poly::one(), |acc, (f, k)| acc.mul(&f.powi(*k)));
        if self.num.0.len() == 1 {
            let (m, c) = self.num.0.iter().next().unwrap();
            let inv = Poly::monomial(m.scale_exponents(&-Q::one()), c.recip());
            return Frac::poly(inv.mul(&lifted));
        }
        let (c, m, unit) = self.num.content();
        let scale = Poly::monomial(m.scale_exponents(&-Q::one()), c.recip());
        let mut den = BTreeMap::new();
        den.insert(unit, 1);
        Frac {
            num: scale.mul(&lifted),
            den,
        }
    }

    fn pow(self, q: Q) -> Frac {
        if q.is_zero() {
            return Frac::constant(Q::one());
        }
        if q.is_one() {
            return self;
        }
        if let Some(n) = small_int(&q) {
            if n < 0 {
                return self.inv().pow(-q);
            }
            if self.num.0.len() > 1 && n > MAX_EXPAND {
                return Frac::atom_pow(Atom::Base(self), q);
            }
            let n = n as u32;
            let den = self.den.into_iter().map(|(f, k)| (f, k * n)).collect();
            return Frac {
                num: self.num.powi(n),
                den,
            };
        }
        if let Some(c) = self.as_constant() {
            if let (Some(b), Some(e)) = (c.to_f64(), q.to_f64()) {
                if let Some(v) = rational(b.powf(e)) {
                    return Frac::constant(v);
                }
            }
            return Frac::atom_pow(Atom::Base(self), q);
        }
        if self.den.is_empty() && self.num.0.len() == 1 {
            let (m, k) = self.num.0.iter().next().unwrap();
            if k.is_one() && m.0.len() == 1 {
                let (a, e) = m.0.iter().next().unwrap();
                if e.is_one() {
                    return Frac::atom_pow(a.clone(), q);
                }
            }
        }
        Frac::atom_pow(Atom::Base(self), q)
    }
}

fn rational(c: f64) -> Option<Q> {
    if c.is_finite() {
        Q::from_float(c)
    } else {
        None
    }
}

fn read(e: &Expr) -> Frac {
    match e {
        Expr::Const(c) => match rational(*c) {
            Some(q) => Frac::constant(q),
            None => Frac::atom(Atom::Opaque(c.to_bits())),
        },
        Expr::Var(v) => Frac::atom(Atom::Var(*v)),
        Expr::Neg(a) => read(a).neg(),
        Expr::Func(f, a) => {
            let arg = read(a);
            if let Some(c) = arg.as_constant() {
                if let Some(v) = c.to_f64().map(|v| f.apply(v)).and_then(rational) {
                    return Frac::constant(v);
                }
            }
            Frac::atom(Atom::Func(*f, arg))
        }
        Expr::Binary(op, a, b) => match op {
            BinOp::Add => read(a).add(read(b)),
            BinOp::Sub => read(a).add(read(b).neg()),
            BinOp::Mul => read(a).mul(&read(b)),
            BinOp::Div => read(a).mul(&read_pow(b, &-Q::one())),
            BinOp::Pow => {
                let pb = read(b);
                match pb.as_constant() {
                    Some(q) if q.is_integer() => read_pow(a, &q),
                    Some(q) => read(a).pow(q),
                    None => Frac::atom(Atom::Pow(read(a), pb)),
                }
            }
        },
    }
}

// e^n for integer n, distributed over products first so that a written
// denominator `a^2*(1+y)` reads back as the factors it came from
fn read_pow(e: &Expr, n: &Q) -> Frac {
    match e {
        Expr::Binary(BinOp::Mul, a, b) => read_pow(a, n).mul(&read_pow(b, n)),
        Expr::Binary(BinOp::Div, a, b) => read_pow(a, n).mul(&read_pow(b, &-n)),
        Expr::Neg(a) => {
            let p = read_pow(a, n);
            if n.to_integer().bit(0) {
                p.neg()
            } else {
                p
            }
        }
        Expr::Binary(BinOp::Pow, a, b) => {
            let pb = read(b);
            match pb.as_constant() {
                Some(c) if c.is_integer() => read_pow(a, &(c * n)),
                Some(c) => read(a).pow(c).pow(n.clone()),
                None => Frac::atom(Atom::Pow(read(a), pb)).pow(n.clone()),
            }
        }
        _ => read(e).pow(n.clone()),
    }
}

fn int_expr(n: &BigInt) -> Expr {
    let Some(f) = n.to_f64().filter(|f| f.is_finite()) else {
        return Expr::Const(if n.is_negative() { f64::MIN } else { f64::MAX });
    };
    let hi = BigInt::from_f64(f).unwrap_or_default();
    if &hi == n {
        return Expr::Const(f);
    }
    Expr::binary(BinOp::Add, Expr::Const(f), int_expr(&(n - hi)))
}

fn coefficient(q: &Q) -> Expr {
    if let Some(f) = q.to_f64().filter(|f| f.is_finite()) {
        if rational(f).as_ref() == Some(q) {
            return Expr::Const(f);
        }
    }
    if q.is_integer() {
        return int_expr(q.numer());
    }
    Expr::binary(BinOp::Div, int_expr(q.numer()), int_expr(q.denom()))
}

fn product(factors: Vec<Expr>) -> Option<Expr> {
    factors
        .into_iter()
        .reduce(|acc, f| Expr::binary(BinOp::Mul, acc, f))
}

fn write_atom(a: &Atom) -> Expr {
    match a {
        Atom::Var(v) => Expr::Var(*v),
        Atom::Opaque(bits) => Expr::Const(f64::from_bits(*bits)),
        Atom::Func(f, p) => Expr::apply(*f, write(p)),
        Atom::Pow(b, e) => Expr::binary(BinOp::Pow, write(b), write(e)),
        Atom::Base(p) => write(p),
    }
}

fn power(base: Expr, e: &Q) -> Expr {
    if e.is_one() {
        base
    } else {
        Expr::binary(BinOp::Pow, base, coefficient(e))
    }
}

fn write_term(m: &Mono, c: &Q) -> Expr {
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for (a, e) in &m.0 {
        if e.is_positive() {
            num.push(power(write_atom(a), e));
        } else {
            den.push(power(write_atom(a), &-e));
        }
    }
    if c.abs().is_one() {
        if c.is_negative() {
            match num.first_mut() {
                Some(first) => *first = Expr::negate(first.clone()),
                None => num.push(Expr::Const(-1.0)),
            }
        }
    } else {
        num.insert(0, coefficient(c));
    }
    let top = product(num).unwrap_or(Expr::Const(1.0));
    match product(den) {
        Some(bottom) => Expr::binary(BinOp::Div, top, bottom),
        None => top,
    }
}

fn write_poly(p: &Poly) -> Expr {
    let mut acc: Option<Expr> = None;
    for (m, c) in &p.0 {
        acc = Some(match acc {
            None => write_term(m, c),
            Some(a) if c.is_negative() => Expr::binary(BinOp::Sub, a, write_term(m, &-c)),
            Some(a) => Expr::binary(BinOp::Add, a, write_term(m, c)),
        });
    }
    acc.unwrap_or(Expr::Const(0.0))
}

fn write(f: &Frac) -> Expr {
    let top = write_poly(&f.num);
    let factors = f
        .den
        .iter()
        .map(|(p, k)| power(write_poly(p), &Q::from_integer(BigInt::from(*k))))
        .collect();
    match product(factors) {
        Some(bottom) => Expr::binary(BinOp::Div, top, bottom),
        None => top,
    }
}

pub(super) fn canonical(e: &Expr) -> Expr {
    write(&read(e))
}
