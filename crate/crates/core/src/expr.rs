//! Closed-form potentials: a small recursive-descent parser and evaluator.
//!
//! Grammar: numbers (optionally suffixed by `i`), `x`, `pi`, `i`,
//! `+ - * / ^`, parentheses, and the functions `cos sin exp log abs sqrt`.
//! Values are complex; `^` is right associative and binds tighter than
//! unary minus.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, SpectraError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Cos => z.cos(),
            Func::Sin => z.sin(),
            Func::Exp => z.exp(),
            Func::Log => z.ln(),
            Func::Abs => Complex64::new(z.norm(), 0.0),
            Func::Sqrt => z.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some((at, t)) => Err(SpectraError::Parse {
                position: at,
                message: format!("unexpected {t}"),
            }),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let xv = Complex64::new(x, 0.0);
        self.eval_at(xv)
    }

    fn eval_at(&self, x: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Neg(a) => -a.eval_at(x),
            Expr::Add(a, b) => a.eval_at(x) + b.eval_at(x),
            Expr::Sub(a, b) => a.eval_at(x) - b.eval_at(x),
            Expr::Mul(a, b) => a.eval_at(x) * b.eval_at(x),
            Expr::Div(a, b) => a.eval_at(x) / b.eval_at(x),
            Expr::Pow(a, b) => {
                let base = a.eval_at(x);
                let e = b.eval_at(x);
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval_at(x)),
        }
    }

    /// True if `x` does not occur.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::X => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Imag(v) => write!(f, "number {v}i"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // Exponent part, only when followed by a digit (or sign and digit).
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| SpectraError::Parse {
                position: start,
                message: format!("bad number `{text}`"),
            })?;
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !(i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_alphanumeric());
            if imag {
                i += 1;
                out.push((start, Tok::Imag(v)));
            } else {
                out.push((start, Tok::Num(v)));
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(SpectraError::Parse {
                    position: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Tok)> {
        self.tokens.get(self.pos).map(|(p, t)| (*p, t))
    }

    fn end_position(&self) -> usize {
        self.tokens.last().map(|(p, _)| p + 1).unwrap_or(0)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        if let Some((_, Tok::Op(c))) = self.peek() {
            if ops.contains(c) {
                let c = *c;
                self.pos += 1;
                return Some(c);
            }
        }
        None
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Expr::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some((at, tok)) = self.peek() else {
            return Err(SpectraError::Parse {
                position: self.end_position(),
                message: "unexpected end of input".into(),
            });
        };
        let tok = tok.clone();
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Const(Complex64::new(0.0, v))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(at)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Const(Complex64::new(std::f64::consts::PI, 0.0))),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                _ => {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(SpectraError::Parse {
                            position: at,
                            message: format!("unknown identifier `{name}`"),
                        });
                    };
                    match self.peek() {
                        Some((_, Tok::LParen)) => {
                            self.pos += 1;
                            let arg = self.expr()?;
                            self.expect_rparen(at)?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        _ => Err(SpectraError::Parse {
                            position: at,
                            message: format!("`{name}` must be followed by `(`"),
                        }),
                    }
                }
            },
            other => Err(SpectraError::Parse {
                position: at,
                message: format!("unexpected {other}"),
            }),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<()> {
        match self.peek() {
            Some((_, Tok::RParen)) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(SpectraError::Parse {
                position: open,
                message: "unclosed `(`".into(),
            }),
        }
    }
}
