//! Integrand expressions in one variable `x`.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
//! number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use super::jet::TaylorJet;
use super::MAX_JET_ORDER;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Syntax error with the 0-based character offset where parsing stopped.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: &'static str,
    pub found: String,
}

pub fn parse(text: &str) -> core::result::Result<Expr, ParseError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("operator or end of input"));
    }
    Ok(expr)
}

struct Parser {
    chars: alloc::vec::Vec<char>,
    pos: usize,
}

const OPERAND: &str = "number, `x`, `pi`, function call or `(`";

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&self, expected: &'static str) -> ParseError {
        ParseError {
            position: self.pos,
            expected,
            found: match self.chars.get(self.pos) {
                Some(c) => alloc::format!("`{c}`"),
                None => "end of input".to_string(),
            },
        }
    }

    fn expr(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> core::result::Result<Expr, ParseError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> core::result::Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> core::result::Result<Expr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                match ident.as_str() {
                    "x" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Pi),
                    name => match Func::from_name(name) {
                        Some(func) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        None => {
                            self.pos = start;
                            Err(self.error("`x`, `pi` or one of sin, cos, exp, log, sqrt"))
                        }
                    },
                }
            }
            _ => Err(self.error(OPERAND)),
        }
    }

    fn expect(&mut self, c: char) -> core::result::Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(match c {
                '(' => "`(`",
                _ => "`)`",
            }))
        }
    }

    fn number(&mut self) -> core::result::Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error(OPERAND));
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Expr::Num).map_err(|_| ParseError {
            position: start,
            expected: "numeric literal",
            found: alloc::format!("`{text}`"),
        })
    }
}

fn domain(expr: &Expr, reason: &'static str) -> Error {
    Error::Domain {
        expr: expr.to_string(),
        reason,
    }
}

impl Expr {
    /// `true` when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Plain value at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var => x,
            Expr::Pi => core::f64::consts::PI,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let (u, v) = (l.eval(x)?, r.eval(x)?);
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        u / v
                    }
                    BinOp::Pow => match integer_exponent(v) {
                        Some(k) if r.is_constant() => {
                            if u == 0.0 && k < 0 {
                                return Err(domain(self, "negative power of zero"));
                            }
                            libm::pow(u, k as f64)
                        }
                        _ => {
                            if !(u > 0.0) {
                                return Err(domain(self, "non-integer power of a non-positive base"));
                            }
                            libm::pow(u, v)
                        }
                    },
                }
            }
            Expr::Call(func, arg) => {
                let u = arg.eval(x)?;
                match func {
                    Func::Sin => libm::sin(u),
                    Func::Cos => libm::cos(u),
                    Func::Exp => libm::exp(u),
                    Func::Log => {
                        if !(u > 0.0) {
                            return Err(domain(self, "log of a non-positive argument"));
                        }
                        libm::log(u)
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(domain(self, "sqrt of a negative argument"));
                        }
                        libm::sqrt(u)
                    }
                }
            }
        };
        Ok(v)
    }

    /// Degree-`order` Taylor expansion at `x0`.
    pub fn jet(&self, x0: f64, order: usize) -> Result<TaylorJet> {
        if order > MAX_JET_ORDER {
            return Err(Error::JetOrderTooLarge(order));
        }
        self.jet_inner(x0, order)
    }

    fn jet_inner(&self, x0: f64, m: usize) -> Result<TaylorJet> {
        Ok(match self {
            Expr::Num(c) => TaylorJet::constant(*c, m),
            Expr::Pi => TaylorJet::constant(core::f64::consts::PI, m),
            Expr::Var => TaylorJet::variable(x0, m),
            Expr::Neg(e) => -&e.jet_inner(x0, m)?,
            Expr::Binary(op, l, r) => {
                let lhs = l.jet_inner(x0, m)?;
                match op {
                    BinOp::Add => &lhs + &r.jet_inner(x0, m)?,
                    BinOp::Sub => &lhs - &r.jet_inner(x0, m)?,
                    BinOp::Mul => &lhs * &r.jet_inner(x0, m)?,
                    BinOp::Div => lhs
                        .checked_div(&r.jet_inner(x0, m)?)
                        .ok_or_else(|| domain(self, "division by zero"))?,
                    BinOp::Pow => {
                        if r.is_constant() {
                            let e = r.eval(x0)?;
                            if let Some(k) = integer_exponent(e) {
                                return lhs
                                    .checked_powi(k)
                                    .ok_or_else(|| domain(self, "negative power of zero"));
                            }
                            let log = lhs
                                .checked_ln()
                                .ok_or_else(|| domain(self, "non-integer power of a non-positive base"))?;
                            log.scale(e).exp()
                        } else {
                            let log = lhs
                                .checked_ln()
                                .ok_or_else(|| domain(self, "variable power of a non-positive base"))?;
                            (&r.jet_inner(x0, m)? * &log).exp()
                        }
                    }
                }
            }
            Expr::Call(func, arg) => {
                let u = arg.jet_inner(x0, m)?;
                match func {
                    Func::Sin => u.sin_cos().0,
                    Func::Cos => u.sin_cos().1,
                    Func::Exp => u.exp(),
                    Func::Log => u
                        .checked_ln()
                        .ok_or_else(|| domain(self, "log of a non-positive argument"))?,
                    Func::Sqrt => u
                        .checked_sqrt()
                        .ok_or_else(|| domain(self, "sqrt of a non-positive argument"))?,
                }
            }
        })
    }
}

fn integer_exponent(e: f64) -> Option<i64> {
    (e.is_finite() && libm::trunc(e) == e && libm::fabs(e) <= i32::MAX as f64).then_some(e as i64)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var => f.write_str("x"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
