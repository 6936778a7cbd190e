//! Arithmetic expression trees.
//!
//! Expressions are parsed from a small grammar and can be evaluated at a
//! point, evaluated to a [`Jet`], or differentiated symbolically. Symbolic
//! differentiation works on the tree itself with no truncation and serves as
//! an independent check on the jet path.
//!
//! Grammar (version [`GRAMMAR_VERSION`]):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | ident | func "(" expr ")" | "(" expr ")"
//! func    := "exp" | "log" | "sin" | "cos"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Integer exponents are evaluated by repeated multiplication
//! and accept negative bases.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetShape};
use crate::scalar::Scalar;

pub const GRAMMAR_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

// Smart constructors with constant folding of the trivial cases. They keep
// symbolic derivatives from growing unboundedly.
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Neg(inner) => inner.as_const().map(|c| -c),
            _ => None,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            (Some(x), Some(y)) => Expr::Const(x + y),
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (_, Some(0.0)) => a,
            (Some(0.0), _) => Expr::neg(b),
            (Some(x), Some(y)) => Expr::Const(x - y),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(0.0), _) | (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match b.as_const() {
            Some(0.0) => Expr::Const(1.0),
            Some(1.0) => a,
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    pub fn log(a: Expr) -> Expr {
        Expr::Log(Box::new(a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(Box::new(a))
    }

    /// Number of variables referenced, i.e. one past the largest index.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Sin(a) | Expr::Cos(a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Sin(a) | Expr::Cos(a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    /// Replaces each `Var(i)` by `replacements[i]`.
    pub fn substitute(&self, replacements: &[Expr]) -> Result<Expr> {
        let sub = |e: &Expr| e.substitute(replacements);
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => replacements
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(format!("#{i}")))?,
            Expr::Neg(a) => Expr::neg(sub(a)?),
            Expr::Add(a, b) => Expr::add(sub(a)?, sub(b)?),
            Expr::Sub(a, b) => Expr::sub(sub(a)?, sub(b)?),
            Expr::Mul(a, b) => Expr::mul(sub(a)?, sub(b)?),
            Expr::Div(a, b) => Expr::div(sub(a)?, sub(b)?),
            Expr::Pow(a, b) => Expr::pow(sub(a)?, sub(b)?),
            Expr::Exp(a) => Expr::exp(sub(a)?),
            Expr::Log(a) => Expr::log(sub(a)?),
            Expr::Sin(a) => Expr::sin(sub(a)?),
            Expr::Cos(a) => Expr::cos(sub(a)?),
        })
    }

    /// Symbolic partial derivative with respect to `Var(var)`.
    pub fn diff(&self, var: usize) -> Expr {
        if !self.depends_on(var) {
            return Expr::Const(0.0);
        }
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.diff(var)),
            Expr::Add(a, b) => Expr::add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => Expr::sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(var), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(var), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(var)),
                ),
                Expr::pow((**b).clone(), Expr::Const(2.0)),
            ),
            Expr::Pow(a, b) => match b.as_const() {
                Some(c) => Expr::mul(
                    Expr::mul(Expr::Const(c), Expr::pow((**a).clone(), Expr::Const(c - 1.0))),
                    a.diff(var),
                ),
                None => Expr::mul(
                    self.clone(),
                    Expr::add(
                        Expr::mul(b.diff(var), Expr::log((**a).clone())),
                        Expr::div(Expr::mul((**b).clone(), a.diff(var)), (**a).clone()),
                    ),
                ),
            },
            Expr::Exp(a) => Expr::mul(self.clone(), a.diff(var)),
            Expr::Log(a) => Expr::div(a.diff(var), (**a).clone()),
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.diff(var)),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.diff(var))),
        }
    }

    /// Repeated symbolic differentiation, `exponents[i]` times in variable `i`.
    pub fn diff_multi(&self, exponents: &[u32]) -> Expr {
        let mut e = self.clone();
        for (var, &k) in exponents.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(var);
            }
        }
        e
    }

    /// Pointwise evaluation.
    pub fn eval<T: Scalar>(&self, point: &[T]) -> Result<T> {
        let ev = |e: &Expr| e.eval(point);
        Ok(match self {
            Expr::Const(c) => lift(*c)?,
            Expr::Var(i) => point
                .get(*i)
                .cloned()
                .ok_or(Error::DimensionMismatch {
                    expected: i + 1,
                    found: point.len(),
                })?,
            Expr::Neg(a) => -ev(a)?,
            Expr::Add(a, b) => ev(a)? + ev(b)?,
            Expr::Sub(a, b) => ev(a)? - ev(b)?,
            Expr::Mul(a, b) => ev(a)? * ev(b)?,
            Expr::Div(a, b) => {
                let d = ev(b)?;
                if d.is_zero() {
                    return Err(Error::Domain("division by zero".into()));
                }
                ev(a)? / d
            }
            Expr::Pow(a, b) => {
                let base = ev(a)?;
                match integer_exponent(b) {
                    Some(k) => powi_scalar(base, k)?,
                    None => {
                        if !base.is_positive() {
                            return Err(Error::Domain(format!(
                                "real power of non-positive value {:e}",
                                base.to_f64()
                            )));
                        }
                        base.try_powf(&ev(b)?).ok_or(Error::Transcendental("pow"))?
                    }
                }
            }
            Expr::Exp(a) => ev(a)?.try_exp().ok_or(Error::Transcendental("exp"))?,
            Expr::Log(a) => {
                let v = ev(a)?;
                if !v.is_positive() {
                    return Err(Error::Domain(format!(
                        "logarithm of non-positive value {:e}",
                        v.to_f64()
                    )));
                }
                v.try_ln().ok_or(Error::Transcendental("log"))?
            }
            Expr::Sin(a) => ev(a)?.try_sin().ok_or(Error::Transcendental("sin"))?,
            Expr::Cos(a) => ev(a)?.try_cos().ok_or(Error::Transcendental("cos"))?,
        })
    }

    /// Evaluates the expression with every variable bound to a jet.
    pub fn eval_jets<T: Scalar>(&self, inputs: &[Jet<T>]) -> Result<Jet<T>> {
        let first = inputs
            .first()
            .ok_or_else(|| Error::InvalidInput("no input jets".into()))?;
        self.eval_jets_in(inputs, first.shape(), first.base_point())
    }

    fn eval_jets_in<T: Scalar>(
        &self,
        inputs: &[Jet<T>],
        shape: &Arc<JetShape>,
        base: &Arc<[T]>,
    ) -> Result<Jet<T>> {
        let ev = |e: &Expr| e.eval_jets_in(inputs, shape, base);
        match self {
            Expr::Const(c) => Jet::constant(shape.clone(), base.clone(), lift(*c)?),
            Expr::Var(i) => inputs.get(*i).cloned().ok_or(Error::DimensionMismatch {
                expected: i + 1,
                found: inputs.len(),
            }),
            Expr::Neg(a) => Ok(ev(a)?.neg()),
            Expr::Add(a, b) => match (a.as_const(), b.as_const()) {
                (Some(c), _) => Ok(ev(b)?.add_constant(&lift(c)?)),
                (_, Some(c)) => Ok(ev(a)?.add_constant(&lift(c)?)),
                _ => ev(a)?.add(&ev(b)?),
            },
            Expr::Sub(a, b) => ev(a)?.sub(&ev(b)?),
            Expr::Mul(a, b) => match (a.as_const(), b.as_const()) {
                (Some(c), _) => Ok(ev(b)?.scale(&lift(c)?)),
                (_, Some(c)) => Ok(ev(a)?.scale(&lift(c)?)),
                _ => ev(a)?.mul(&ev(b)?),
            },
            Expr::Div(a, b) => {
                let d = ev(b)?;
                if d.value().is_zero() {
                    return Err(Error::Domain("division by zero".into()));
                }
                ev(a)?.div(&d)
            }
            Expr::Pow(a, b) => {
                let base_jet = ev(a)?;
                match (integer_exponent(b), b.as_const()) {
                    (Some(k), _) => {
                        if k < 0 && base_jet.value().is_zero() {
                            return Err(Error::Domain("negative power of zero".into()));
                        }
                        base_jet.powi(k)
                    }
                    (None, Some(c)) => base_jet.powf(&lift(c)?),
                    (None, None) => ev(b)?.mul(&base_jet.ln()?)?.exp(),
                }
            }
            Expr::Exp(a) => ev(a)?.exp(),
            Expr::Log(a) => ev(a)?.ln(),
            Expr::Sin(a) => Ok(ev(a)?.sin_cos()?.0),
            Expr::Cos(a) => Ok(ev(a)?.sin_cos()?.1),
        }
    }

    /// Jet of the expression in `point.len()` variables at `point`.
    pub fn eval_jet<T: Scalar>(&self, point: &[T], order: usize) -> Result<Jet<T>> {
        let shape = JetShape::get(point.len(), order)?;
        let base: Arc<[T]> = Arc::from(point.to_vec());
        if self.arity() > point.len() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: point.len(),
            });
        }
        let inputs = (0..point.len())
            .map(|i| Jet::variable(shape.clone(), base.clone(), i))
            .collect::<Result<Vec<_>>>()?;
        self.eval_jets_in(&inputs, &shape, &base)
    }

    /// Parses `source` with `names[i]` bound to `Var(i)`.
    pub fn parse(source: &str, names: &[&str]) -> Result<Expr> {
        let mut parser = Parser {
            src: source.as_bytes(),
            pos: 0,
            names,
        };
        let e = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Renders the expression with the given variable names, in a form
    /// [`Expr::parse`] accepts.
    pub fn display_with<'a>(&'a self, names: &'a [&'a str]) -> impl fmt::Display + 'a {
        Named { expr: self, names }
    }
}

fn lift<T: Scalar>(c: f64) -> Result<T> {
    T::from_f64(c).ok_or_else(|| Error::NonFinite(format!("literal {c}")))
}

fn integer_exponent(e: &Expr) -> Option<i64> {
    match e {
        Expr::Const(c) if c.fract() == 0.0 && c.abs() <= 64.0 => Some(*c as i64),
        Expr::Neg(inner) => integer_exponent(inner).map(|k| -k),
        _ => None,
    }
}

fn powi_scalar<T: Scalar>(base: T, k: i64) -> Result<T> {
    if k < 0 {
        if base.is_zero() {
            return Err(Error::Domain("negative power of zero".into()));
        }
        return Ok(T::one() / powi_scalar(base, -k)?);
    }
    let mut acc = T::one();
    for _ in 0..k {
        acc = acc * base.clone();
    }
    Ok(acc)
}

struct Named<'a> {
    expr: &'a Expr,
    names: &'a [&'a str],
}

impl<'a> Named<'a> {
    fn child<'b>(&'b self, expr: &'b Expr) -> Named<'b> {
        Named { expr, names: self.names }
    }
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| self.child(e);
        match self.expr {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(i) => match self.names.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "x{}", i + 1),
            },
            Expr::Neg(a) => write!(f, "(-{})", sub(a)),
            Expr::Add(a, b) => write!(f, "({} + {})", sub(a), sub(b)),
            Expr::Sub(a, b) => write!(f, "({} - {})", sub(a), sub(b)),
            Expr::Mul(a, b) => write!(f, "({} * {})", sub(a), sub(b)),
            Expr::Div(a, b) => write!(f, "({} / {})", sub(a), sub(b)),
            Expr::Pow(a, b) => write!(f, "({}^{})", sub(a), sub(b)),
            Expr::Exp(a) => write!(f, "exp({})", sub(a)),
            Expr::Log(a) => write!(f, "log({})", sub(a)),
            Expr::Sin(a) => write!(f, "sin({})", sub(a)),
            Expr::Cos(a) => write!(f, "cos({})", sub(a)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Named { expr: self, names: &[] })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if let Some(i) = self.names.iter().position(|n| *n == ident) {
                    return Ok(Expr::Var(i));
                }
                let func: fn(Expr) -> Expr = match ident {
                    "exp" => Expr::exp,
                    "log" => Expr::log,
                    "sin" => Expr::sin,
                    "cos" => Expr::cos,
                    _ => return Err(Error::UnknownVariable(ident.to_string())),
                };
                if !self.eat(b'(') {
                    return Err(self.error("expected `(` after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(func(arg))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Parse {
                position: start,
                message: format!("invalid number `{text}`"),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::MultiIndex;

    #[test]
    fn precedence() {
        let e = Expr::parse("-x^2 + 2*y/4", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[3.0, 2.0]).unwrap(), -9.0 + 1.0);
        let e = Expr::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval::<f64>(&[]).unwrap(), 512.0);
        let e = Expr::parse("1 - 2 - 3", &[]).unwrap();
        assert_eq!(e.eval::<f64>(&[]).unwrap(), -4.0);
        let e = Expr::parse("1.5e-1 * exp(0)", &[]).unwrap();
        assert!((e.eval::<f64>(&[]).unwrap() - 0.15).abs() < 1e-16);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Expr::parse("x +", &["x"]), Err(Error::Parse { .. })));
        assert!(matches!(Expr::parse("(x", &["x"]), Err(Error::Parse { .. })));
        assert_eq!(
            Expr::parse("q * 2", &["x"]),
            Err(Error::UnknownVariable("q".into()))
        );
        assert!(matches!(Expr::parse("x y", &["x", "y"]), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_round_trips() {
        let names = ["x", "y"];
        let src = "exp(x*y) / (1 + y^2) - cos(-x) * log(2 + sin(y))";
        let e = Expr::parse(src, &names).unwrap();
        let again = Expr::parse(&e.display_with(&names).to_string(), &names).unwrap();
        let p = [0.3, -0.4];
        assert_eq!(e.eval(&p).unwrap(), again.eval(&p).unwrap());
    }

    #[test]
    fn negative_base_integer_power() {
        let e = Expr::parse("x^3", &["x"]).unwrap();
        assert_eq!(e.eval(&[-2.0]).unwrap(), -8.0);
        let j = e.eval_jet(&[-2.0], 3).unwrap();
        assert_eq!(j.derivative(&MultiIndex::new(vec![1]).unwrap()).unwrap(), 12.0);
        assert_eq!(j.derivative(&MultiIndex::new(vec![3]).unwrap()).unwrap(), 6.0);
    }

    #[test]
    fn symbolic_derivative_of_exp_xy() {
        let e = Expr::parse("exp(x*y)", &["x", "y"]).unwrap();
        let d = e.diff_multi(&[1, 1]);
        assert_eq!(d.eval(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("log(x)", &["x"]).unwrap();
        assert!(matches!(e.eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(e.eval_jet(&[-1.0], 2), Err(Error::Domain(_))));
        let e = Expr::parse("1/x", &["x"]).unwrap();
        assert!(matches!(e.eval(&[0.0]), Err(Error::Domain(_))));
    }
}
