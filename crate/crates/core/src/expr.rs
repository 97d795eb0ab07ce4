//! A small expression language in one variable `x`.
//!
//! ```text
//! expr   = term , { ( "+" | "-" ) , term } ;
//! term   = unary , { ( "*" | "/" ) , unary } ;
//! unary  = "-" , unary | power ;
//! power  = atom , [ "^" , unary ] ;              (* exponent must be free of x *)
//! atom   = number | "x" | "pi" | name , "(" , expr , ")" | "(" , expr , ")" ;
//! name   = "sin" | "cos" | "exp" | "erf" | "abs" ;
//! number = digit , { digit } , [ "." , { digit } ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;
//! ```
//!
//! Whitespace is ignored between tokens. `-x^2` is `-(x^2)`; `2^3^2` is `2^(3^2)`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::modulus::Shape;
use crate::operators::{Domain, FunctionSpec};
use crate::special;

const TWO_OVER_SQRT_PI: f64 = 2.0 * special::FRAC_1_SQRT_PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("division by zero in `{node}`")]
    DivisionByZero { node: String },
    #[error("`{node}` is not differentiable")]
    NonDifferentiable { node: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Erf,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "erf" => Func::Erf,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Erf => "erf",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Erf => special::erf(v),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::SyntaxError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(match self.unary()? {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exponent = self.unary()?;
        if exponent.contains_x() {
            return Err(ExprError::SyntaxError { offset: at, message: "exponent must not depend on x".into() });
        }
        let value = exponent
            .eval(0.0)
            .map_err(|_| ExprError::SyntaxError { offset: at, message: "exponent does not evaluate".into() })?;
        Ok(Expr::Pow(Box::new(base), value))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some(c) = self.peek() else { return Err(self.error("unexpected end of input")) };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            let len = self.src[start..].find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_').unwrap_or(self.src.len() - start);
            let name = &self.src[start..start + len];
            self.pos += len;
            return match name {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Const(PI)),
                _ => {
                    let func = Func::from_name(name)
                        .ok_or_else(|| ExprError::UnknownFunction { name: name.into(), offset: start })?;
                    if !self.eat('(') {
                        return Err(self.error("expected `(` after function name"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected `)`"));
                    }
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            };
        }
        Err(self.error(&format!("unexpected `{c}`")))
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut count = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            count += digits(&mut i);
        }
        if count == 0 {
            return Err(self.error("malformed number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                self.pos = j;
                return Err(self.error("malformed exponent"));
            }
            i = j;
        }
        self.pos = i;
        self.src[start..i].parse().map(Expr::Const).map_err(|_| ExprError::SyntaxError {
            offset: start,
            message: "malformed number".into(),
        })
    }
}

// Smart constructors: constant folding and zero/one elimination only.

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        e => Expr::Neg(Box::new(e)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p + q),
        (Expr::Const(z), e) | (e, Expr::Const(z)) if z == 0.0 => e,
        (a, Expr::Neg(b)) => sub(a, *b),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p - q),
        (e, Expr::Const(z)) if z == 0.0 => e,
        (Expr::Const(z), e) if z == 0.0 => neg(e),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(p * q),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), e) | (e, Expr::Const(o)) if o == 1.0 => e,
        (Expr::Const(m), e) | (e, Expr::Const(m)) if m == -1.0 => neg(e),
        (Expr::Neg(a), b) => neg(mul(*a, b)),
        (a, Expr::Neg(b)) => neg(mul(a, *b)),
        (a, Expr::Const(c)) => Expr::Mul(Box::new(Expr::Const(c)), Box::new(a)),
        (Expr::Const(p), Expr::Mul(l, r)) if matches!(*l, Expr::Const(_)) => {
            let Expr::Const(q) = *l else { unreachable!() };
            mul(Expr::Const(p * q), *r)
        }
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) if q != 0.0 => Expr::Const(p / q),
        (Expr::Const(z), _) if z == 0.0 => Expr::Const(0.0),
        (e, Expr::Const(o)) if o == 1.0 => e,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(base: Expr, p: f64) -> Expr {
    match base {
        _ if p == 0.0 => Expr::Const(1.0),
        e if p == 1.0 => e,
        Expr::Const(c) => Expr::Const(c.powf(p)),
        e => Expr::Pow(Box::new(e), p),
    }
}

fn call(f: Func, arg: Expr) -> Expr {
    Expr::Call(f, Box::new(arg))
}

impl Expr {
    pub fn contains_x(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::X => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.contains_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.contains_x() || b.contains_x(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(ExprError::DivisionByZero { node: self.to_string() });
                }
                a.eval(x)? / d
            }
            Expr::Pow(e, p) => {
                let v = e.eval(x)?;
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    if v == 0.0 && *p < 0.0 {
                        return Err(ExprError::DivisionByZero { node: self.to_string() });
                    }
                    v.powi(*p as i32)
                } else {
                    v.powf(*p)
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(x)?),
        })
    }

    fn derive(&self) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::X => Expr::Const(1.0),
            Expr::Neg(e) => neg(e.derive()?),
            Expr::Add(a, b) => add(a.derive()?, b.derive()?),
            Expr::Sub(a, b) => sub(a.derive()?, b.derive()?),
            Expr::Mul(a, b) => add(mul(a.derive()?, (**b).clone()), mul((**a).clone(), b.derive()?)),
            Expr::Div(a, b) => div(
                sub(mul(a.derive()?, (**b).clone()), mul((**a).clone(), b.derive()?)),
                pow((**b).clone(), 2.0),
            ),
            Expr::Pow(e, p) => mul(mul(Expr::Const(*p), pow((**e).clone(), p - 1.0)), e.derive()?),
            Expr::Call(f, e) => {
                let inner = (**e).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Erf => mul(Expr::Const(TWO_OVER_SQRT_PI), call(Func::Exp, neg(pow(inner, 2.0)))),
                    Func::Abs => {
                        if !e.contains_x() {
                            return Ok(Expr::Const(0.0));
                        }
                        return Err(ExprError::NonDifferentiable { node: self.to_string() });
                    }
                };
                mul(outer, e.derive()?)
            }
        })
    }

    /// Symbolic derivative of the given order (order 0 is a clone).
    pub fn differentiate(&self, order: usize) -> Result<Expr, ExprError> {
        let mut e = self.clone();
        for _ in 0..order {
            e = e.derive()?;
        }
        Ok(e)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            fmt::Display::fmt(self, f)?;
            return write!(f, ")");
        }
        fmt::Display::fmt(self, f)
    }

    /// `Some((slope, intercept))` when the expression is affine in `x`.
    fn affine(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Const(c) => Some((0.0, *c)),
            Expr::X => Some((1.0, 0.0)),
            Expr::Neg(e) => e.affine().map(|(s, c)| (-s, -c)),
            Expr::Add(a, b) => {
                let ((s1, c1), (s2, c2)) = (a.affine()?, b.affine()?);
                Some((s1 + s2, c1 + c2))
            }
            Expr::Sub(a, b) => {
                let ((s1, c1), (s2, c2)) = (a.affine()?, b.affine()?);
                Some((s1 - s2, c1 - c2))
            }
            Expr::Mul(a, b) => {
                let ((s1, c1), (s2, c2)) = (a.affine()?, b.affine()?);
                match (s1 == 0.0, s2 == 0.0) {
                    (true, _) => Some((c1 * s2, c1 * c2)),
                    (_, true) => Some((s1 * c2, c1 * c2)),
                    _ => None,
                }
            }
            Expr::Div(a, b) => {
                let ((s1, c1), (s2, c2)) = (a.affine()?, b.affine()?);
                (s2 == 0.0 && c2 != 0.0).then(|| (s1 / c2, c1 / c2))
            }
            Expr::Pow(..) | Expr::Call(..) if !self.contains_x() => self.eval(0.0).ok().map(|c| (0.0, c)),
            Expr::Pow(..) | Expr::Call(..) => None,
        }
    }

    /// Closed form with an exact modulus: affine maps, integer powers of affine maps,
    /// sinusoids, exponentials and absolute values of affine maps, times a constant.
    pub fn shape(&self) -> Option<Shape> {
        if let Some((slope, intercept)) = self.affine() {
            return Some(if slope == 0.0 { Shape::Constant { value: intercept } } else { Shape::Affine { slope, intercept } });
        }
        match self {
            Expr::Neg(e) => e.shape().and_then(|s| scale(s, -1.0)),
            Expr::Mul(a, b) => match (a.affine(), b.affine()) {
                (Some((0.0, k)), _) => b.shape().and_then(|s| scale(s, k)),
                (_, Some((0.0, k))) => a.shape().and_then(|s| scale(s, k)),
                _ => None,
            },
            Expr::Div(a, b) => match b.affine() {
                Some((0.0, k)) if k != 0.0 => a.shape().and_then(|s| scale(s, 1.0 / k)),
                _ => None,
            },
            Expr::Pow(e, p) => {
                let (s, c) = e.affine()?;
                (p.fract() == 0.0 && *p >= 2.0 && *p <= 64.0 && s != 0.0).then(|| Shape::Power {
                    coeff: s.powi(*p as i32),
                    shift: -c / s,
                    exponent: *p as u32,
                })
            }
            Expr::Call(f, e) => {
                let (s, c) = e.affine()?;
                Some(match f {
                    Func::Sin => Shape::Sinusoid { amp: 1.0, freq: s, phase: c },
                    Func::Cos => Shape::Sinusoid { amp: 1.0, freq: s, phase: c + 0.5 * PI },
                    Func::Exp => Shape::Exp { coeff: 1.0, rate: s, shift: c },
                    Func::Abs => Shape::Abs { coeff: 1.0, slope: s, intercept: c },
                    Func::Erf => return None,
                })
            }
            _ => None,
        }
    }
}

fn scale(s: Shape, k: f64) -> Option<Shape> {
    Some(match s {
        Shape::Constant { value } => Shape::Constant { value: k * value },
        Shape::Affine { slope, intercept } => Shape::Affine { slope: k * slope, intercept: k * intercept },
        Shape::Power { coeff, shift, exponent } => Shape::Power { coeff: k * coeff, shift, exponent },
        Shape::Sinusoid { amp, freq, phase } => Shape::Sinusoid { amp: k * amp, freq, phase },
        Shape::Exp { coeff, rate, shift } => Shape::Exp { coeff: k * coeff, rate, shift },
        Shape::Abs { coeff, slope, intercept } => Shape::Abs { coeff: k * coeff, slope, intercept },
    })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => write!(f, "x"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.write_at(f, 3)
            }
            Expr::Pow(e, p) => {
                e.write_at(f, 5)?;
                write!(f, "^{p}")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// A [`FunctionSpec`] evaluating `expr`, with symbolic derivatives up to `max_order`
/// (fewer if differentiation hits `abs`) and an exact shape where one is recognised.
///
/// Evaluation errors such as a zero denominator surface as NaN.
pub fn to_function_spec(id: &str, expr: &Expr, domain: Domain, max_order: usize) -> FunctionSpec {
    let mut derivatives = Vec::new();
    let mut current = expr.clone();
    for order in 1..=max_order {
        match current.derive() {
            Ok(d) => {
                derivatives.push(single(&format!("{id}^({order})"), &d, domain));
                current = d;
            }
            Err(_) => break,
        }
    }
    single(id, expr, domain).with_derivatives(derivatives)
}

fn single(id: &str, expr: &Expr, domain: Domain) -> FunctionSpec {
    let e = expr.clone();
    let spec = FunctionSpec::new(id, domain, move |t| e.eval(t).unwrap_or(f64::NAN));
    match expr.shape() {
        Some(s) => spec.with_shape(s),
        None => spec,
    }
}
