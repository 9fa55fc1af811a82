//! Symbolic expressions for catalog entries: parameter formulas such as
//! `(9*a*b+3*a+3*b-1)/4` and coordinate maps such as
//! `64*x^3*(1-x)/(9-8*x)^3`.
//!
//! The grammar is `+ - * / ^` with the usual precedence, unary minus,
//! integer literals, parentheses, and free symbols.  Exponents must
//! evaluate to integers except when a power factor is later interpreted
//! as a prefactor base raised to a scalar (the record layer destructures
//! those before evaluation).  Evaluation comes in two modes: fully scalar
//! under a symbol environment, and rational-function-valued with one
//! distinguished symbol acting as the variable.

use crate::poly::Polynomial;
use crate::ratfun::RationalFunction;
use crate::scalar::{Rational, Scalar};
use crate::series::TruncatedSeries;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("exponent `{0}` is not an integer")]
    NonIntegerExponent(String),
    #[error("division by zero while evaluating")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num_i64(n: i64) -> Expr {
        Expr::Num(Rational::from(n))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn pow(self, e: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(e))
    }

    pub fn parse(input: &str) -> Result<Expr, ExprError> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(ExprError::Parse {
                pos: p.pos,
                message: "trailing input".into(),
            });
        }
        Ok(e)
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) => a.collect_symbols(out),
        }
    }

    /// Replace free symbols by expressions (capture is not a concern:
    /// there are no binders).
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(a, b) => a.substitute(map).add(b.substitute(map)),
            Expr::Sub(a, b) => a.substitute(map).sub(b.substitute(map)),
            Expr::Mul(a, b) => a.substitute(map).mul(b.substitute(map)),
            Expr::Div(a, b) => a.substitute(map).div(b.substitute(map)),
            Expr::Neg(a) => a.substitute(map).neg(),
            Expr::Pow(a, b) => a.substitute(map).pow(b.substitute(map)),
        }
    }

    /// Evaluate to a scalar under an environment for the free symbols.
    pub fn eval_scalar<K: Scalar>(
        &self,
        env: &impl Fn(&str) -> Option<K>,
    ) -> Result<K, ExprError> {
        match self {
            Expr::Num(r) => Ok(K::from_rational(r.clone())),
            Expr::Sym(s) => env(s).ok_or_else(|| ExprError::UnboundSymbol(s.clone())),
            Expr::Add(a, b) => Ok(a.eval_scalar(env)? + b.eval_scalar(env)?),
            Expr::Sub(a, b) => Ok(a.eval_scalar(env)? - b.eval_scalar(env)?),
            Expr::Mul(a, b) => Ok(a.eval_scalar(env)? * b.eval_scalar(env)?),
            Expr::Div(a, b) => {
                let den = b.eval_scalar(env)?;
                let num = a.eval_scalar(env)?;
                num.div_checked(&den).ok_or(ExprError::DivisionByZero)
            }
            Expr::Neg(a) => Ok(-a.eval_scalar(env)?),
            Expr::Pow(a, b) => {
                let e = Self::integer_exponent(b, env)?;
                let base = a.eval_scalar(env)?;
                base.pow_i64(e).ok_or(ExprError::DivisionByZero)
            }
        }
    }

    fn integer_exponent<K: Scalar>(
        e: &Expr,
        env: &impl Fn(&str) -> Option<K>,
    ) -> Result<i64, ExprError> {
        let v = e.eval_scalar::<K>(env)?;
        v.as_rational()
            .and_then(|r| r.to_i64())
            .ok_or_else(|| ExprError::NonIntegerExponent(format!("{v}")))
    }

    /// Evaluate to a rational function of `var`, all other symbols scalar.
    pub fn eval_ratfun<K: Scalar>(
        &self,
        var: &str,
        env: &impl Fn(&str) -> Option<K>,
    ) -> Result<RationalFunction<K>, ExprError> {
        match self {
            Expr::Num(r) => Ok(RationalFunction::from_poly(Polynomial::constant(
                K::from_rational(r.clone()),
            ))),
            Expr::Sym(s) if s == var => Ok(RationalFunction::x()),
            Expr::Sym(s) => env(s)
                .map(|v| RationalFunction::from_poly(Polynomial::constant(v)))
                .ok_or_else(|| ExprError::UnboundSymbol(s.clone())),
            Expr::Add(a, b) => Ok(a.eval_ratfun(var, env)?.add(&b.eval_ratfun(var, env)?)),
            Expr::Sub(a, b) => Ok(a.eval_ratfun(var, env)?.sub(&b.eval_ratfun(var, env)?)),
            Expr::Mul(a, b) => Ok(a.eval_ratfun(var, env)?.mul(&b.eval_ratfun(var, env)?)),
            Expr::Div(a, b) => {
                let den = b.eval_ratfun(var, env)?;
                a.eval_ratfun(var, env)?
                    .div(&den)
                    .map_err(|_| ExprError::DivisionByZero)
            }
            Expr::Neg(a) => Ok(a.eval_ratfun(var, env)?.neg()),
            Expr::Pow(a, b) => {
                // The exponent must not involve the variable.
                let scalar_env = |s: &str| if s == var { None } else { env(s) };
                let e = Self::integer_exponent::<K>(b, &scalar_env)?;
                let base = a.eval_ratfun(var, env)?;
                if e >= 0 {
                    Ok(base.pow(e as usize))
                } else {
                    RationalFunction::from_poly(Polynomial::one())
                        .div(&base.pow((-e) as usize))
                        .map_err(|_| ExprError::DivisionByZero)
                }
            }
        }
    }

    /// Evaluate to a jet at the origin in `var`.  Unlike [`Expr::eval_ratfun`]
    /// this supports powers with non-integer scalar exponents, provided the
    /// base has constant term 1 — exactly the shape of prefactors such as
    /// `(1-8*x/9)^(-3*a)`.  Division requires the divisor to be a unit.
    pub fn eval_series<K: Scalar>(
        &self,
        var: &str,
        order: usize,
        env: &impl Fn(&str) -> Option<K>,
    ) -> Result<TruncatedSeries<K>, ExprError> {
        match self {
            Expr::Num(r) => Ok(TruncatedSeries::constant(
                K::from_rational(r.clone()),
                order,
            )),
            Expr::Sym(s) if s == var => Ok(TruncatedSeries::x(order)),
            Expr::Sym(s) => env(s)
                .map(|v| TruncatedSeries::constant(v, order))
                .ok_or_else(|| ExprError::UnboundSymbol(s.clone())),
            Expr::Add(a, b) => {
                Ok(a.eval_series(var, order, env)?.add(&b.eval_series(var, order, env)?))
            }
            Expr::Sub(a, b) => {
                Ok(a.eval_series(var, order, env)?.sub(&b.eval_series(var, order, env)?))
            }
            Expr::Mul(a, b) => {
                Ok(a.eval_series(var, order, env)?.mul(&b.eval_series(var, order, env)?))
            }
            Expr::Div(a, b) => {
                let den = b.eval_series(var, order, env)?;
                let inv = den.invert().map_err(|_| ExprError::DivisionByZero)?;
                Ok(a.eval_series(var, order, env)?.mul(&inv))
            }
            Expr::Neg(a) => Ok(a.eval_series(var, order, env)?.neg()),
            Expr::Pow(a, b) => {
                let scalar_env = |s: &str| if s == var { None } else { env(s) };
                let e: K = b.eval_scalar(&scalar_env)?;
                let base = a.eval_series(var, order, env)?;
                if let Some(k) = e.as_rational().and_then(|r| r.to_i64()) {
                    return base.pow_i64(k).map_err(|_| ExprError::DivisionByZero);
                }
                base.pow_scalar(&e).map_err(|_| {
                    ExprError::NonIntegerExponent(format!(
                        "{e} on a base whose constant term is not 1"
                    ))
                })
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize conservatively; the catalog keeps raw source text
        // for round-tripping, so this printer only serves diagnostics and
        // derived records.
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn error<T>(&self, message: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            pos: self.pos,
            message: message.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(self.unary()?);
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.div(self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            self.skip_ws();
            let exponent = if self.peek() == Some(b'-') {
                self.bump();
                self.primary()?.neg()
            } else {
                self.primary()?
            };
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_ws();
                if self.bump() != Some(b')') {
                    return self.error("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.symbol(),
            _ => self.error("expected a number, symbol, or `(`"),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.bump();
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match text.parse::<num::BigInt>() {
            Ok(n) => Ok(Expr::Num(Rational::from_big(n, num::BigInt::from(1)))),
            Err(_) => self.error("bad integer literal"),
        }
    }

    fn symbol(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.bump();
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(Expr::sym(text))
    }
}
