//! Scalar fields evaluable to jets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet, MultiIndex};
use crate::scalar::Scalar;

/// User-supplied jet evaluator: `(point, order) -> jet`.
pub type JetFn<T> = dyn Fn(&[T], usize) -> Result<Jet<T>> + Send + Sync;

/// A scalar function on `ℝⁿ`.
#[derive(Clone)]
pub enum Field<T = f64> {
    Expression { expr: Expr, n: usize },
    /// Pointwise product of the factors, all on the same `ℝⁿ`.
    Product { factors: Vec<Field<T>>, n: usize },
    Callable { eval: Arc<JetFn<T>>, n: usize },
}

impl<T: Scalar> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Expression { expr, n } => write!(f, "Expression(n={n}, {expr})"),
            Field::Product { factors, n } => f
                .debug_struct("Product")
                .field("n", n)
                .field("factors", factors)
                .finish(),
            Field::Callable { n, .. } => write!(f, "Callable(n={n})"),
        }
    }
}

impl<T: Scalar> Field<T> {
    pub fn expression(expr: Expr, n: usize) -> Result<Self> {
        if expr.arity() > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: expr.arity(),
            });
        }
        Ok(Field::Expression { expr, n })
    }

    /// Parses an expression in the default variable names for `n` (see
    /// [`variable_names`]).
    pub fn parse(source: &str, n: usize) -> Result<Self> {
        let names = variable_names(n);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::expression(parse_with_aliases(source, &refs)?, n)
    }

    pub fn product(factors: Vec<Field<T>>) -> Result<Self> {
        let n = factors
            .first()
            .map(Field::dim)
            .ok_or_else(|| Error::InvalidInput("product needs at least one factor".into()))?;
        if let Some(bad) = factors.iter().find(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Field::Product { factors, n })
    }

    pub fn callable(n: usize, eval: Arc<JetFn<T>>) -> Self {
        Field::Callable { eval, n }
    }

    pub fn dim(&self) -> usize {
        match self {
            Field::Expression { n, .. } | Field::Product { n, .. } | Field::Callable { n, .. } => *n,
        }
    }

    /// The jet of order `order` at `point`.
    pub fn jet(&self, point: &[T], order: usize) -> Result<Jet<T>> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: point.len(),
            });
        }
        let j = match self {
            Field::Expression { expr, .. } => expr.eval_jet(point, order)?,
            Field::Product { factors, .. } => {
                let mut acc = factors[0].jet(point, order)?;
                for f in &factors[1..] {
                    acc = acc.mul(&f.jet(point, order)?)?;
                }
                acc
            }
            Field::Callable { eval, .. } => {
                let j = eval(point, order)?;
                if j.n() != point.len() || j.order() != order {
                    return Err(Error::ShapeMismatch);
                }
                j
            }
        };
        if !j.is_finite() {
            return Err(Error::NonFinite(format!("jet at {point:?}")));
        }
        Ok(j)
    }

    pub fn value(&self, point: &[T]) -> Result<T> {
        match self {
            Field::Expression { expr, .. } => expr.eval(point),
            _ => Ok(self.jet(point, 0)?.value().clone()),
        }
    }
}

/// Default variable names: `x, y, z, w` for `n ≤ 4`, otherwise `x1 … xn`.
/// The indexed names `x1 … xn` are always accepted by [`Field::parse`].
pub fn variable_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn parse_with_aliases(source: &str, names: &[&str]) -> Result<Expr> {
    let n = names.len();
    let indexed: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut all: Vec<&str> = names.to_vec();
    all.extend(indexed.iter().map(String::as_str));
    let e = Expr::parse(source, &all)?;
    // Fold the indexed aliases back onto Var(0..n).
    let map: Vec<Expr> = (0..2 * n).map(|i| Expr::Var(i % n.max(1))).collect();
    e.substitute(&map)
}

/// The `K`-jet of `field` at `point`.
pub fn jet_eval<T: Scalar>(field: &Field<T>, point: &[T], order: usize) -> Result<Jet<T>> {
    field.jet(point, order)
}

/// The jet of `log f`.
pub fn jet_log<T: Scalar>(j: &Jet<T>) -> Result<Jet<T>> {
    j.ln()
}

/// `∂^α f` at the jet's base point.
pub fn extract_derivative<T: Scalar>(j: &Jet<T>, alpha: &MultiIndex) -> Result<T> {
    j.derivative(alpha)
}
