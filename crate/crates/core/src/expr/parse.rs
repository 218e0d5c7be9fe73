//! Recursive-descent parser for component equations.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := base (('^' | '**') unary)?
//! base  := NUMBER | 'pi' | 'e' | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! Negation binds looser than `^` (so `-x^2` is `-(x^2)`) and tighter than
//! `*`. Exponentiation is right-associative. A minus applied directly to a
//! numeric literal is folded into the constant. Juxtaposition (`2x`,
//! `y sin(x)`) is rejected.

use super::{BinOp, Expr, Func, Var};
use std::fmt;

/// Parse failure with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.token.is_empty() {
            write!(f, "{} at offset {}", self.message, self.offset)
        } else {
            write!(
                f,
                "{} at offset {} ('{}')",
                self.message, self.offset, self.token
            )
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'*' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    i += 1;
                    Tok::Caret
                } else {
                    Tok::Star
                }
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: "malformed number".into(),
                    token: text.into(),
                })?;
                out.push(Token {
                    tok: Tok::Num(value),
                    start,
                    end: i,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    start,
                    end: i,
                });
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: "unexpected character".into(),
                    token: ch.to_string(),
                });
            }
        };
        i += 1;
        out.push(Token { tok, start, end: i });
    }
    Ok(out)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    // exponent only when followed by digits, so `2e` stays `2` then `e`
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

/// Parse an equation string into an expression tree.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
            token: String::new(),
        });
    }
    let mut p = Parser { src, toks, pos: 0 };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(match t.tok {
            Tok::RParen => p.error_at(t, "unmatched ')'"),
            _ if starts_operand(&t.tok) => p.implicit_mul(t),
            _ => p.error_at(t, "unexpected trailing token"),
        });
    }
    Ok(e)
}

fn starts_operand(t: &Tok) -> bool {
    matches!(t, Tok::Num(_) | Tok::Ident(_) | Tok::LParen)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn text(&self, t: &Token) -> String {
        self.src[t.start..t.end].to_string()
    }

    fn error_at(&self, t: &Token, msg: &str) -> ParseError {
        ParseError {
            offset: t.start,
            message: msg.into(),
            token: self.text(t),
        }
    }

    fn implicit_mul(&self, t: &Token) -> ParseError {
        self.error_at(t, "implicit multiplication is not supported; insert '*'")
    }

    fn eof(&self) -> ParseError {
        ParseError {
            offset: self.src.len(),
            message: "unexpected end of input".into(),
            token: String::new(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::negate(other),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(&Tok::Caret) {
            let exp = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = match self.next() {
            Some(t) => t,
            None => return Err(self.eof()),
        };
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Const(*v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.close_paren(&t)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                "e" => Ok(Expr::Const(std::f64::consts::E)),
                "log" => Err(self.error_at(&t, "ambiguous logarithm; use ln or log10")),
                other => match Func::from_name(other) {
                    Some(f) => match self.next() {
                        Some(open) if open.tok == Tok::LParen => {
                            let arg = self.expr()?;
                            self.close_paren(&open)?;
                            Ok(Expr::apply(f, arg))
                        }
                        Some(other) => {
                            Err(self.error_at(&other, "expected '(' after function name"))
                        }
                        None => Err(ParseError {
                            message: "expected '(' after function name".into(),
                            ..self.eof()
                        }),
                    },
                    None => Err(self.error_at(&t, "unknown identifier")),
                },
            },
            _ => Err(self.error_at(&t, "expected a number, variable, function or '('")),
        }
    }

    fn close_paren(&mut self, open: &Token) -> Result<(), ParseError> {
        match self.peek().cloned() {
            Some(t) if t.tok == Tok::RParen => {
                self.pos += 1;
                Ok(())
            }
            Some(t) if starts_operand(&t.tok) => Err(self.implicit_mul(&t)),
            Some(t) => Err(self.error_at(&t, "unexpected token")),
            None => Err(self.error_at(open, "unbalanced parenthesis")),
        }
    }
}
