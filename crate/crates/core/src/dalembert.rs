//! Residuals and structural constants of the n-d'Alembert equation
//! `∂ⁿ log f / ∂x₁⋯∂xₙ = 0`.
//!
//! Two residual forms are provided. The log form evaluates the mixed partial
//! of `log f` directly and needs `f > 0`. The polynomial form `F` is the
//! numerator obtained by clearing `fⁿ`, generated by symbolic expansion of
//! the log-derivative; it is defined everywhere, including the zero set of
//! `f`.
//!
//! For `n = 2` this is `u_xy·u − u_x·u_y`. For `n = 3` the expansion is
//! `u_xyz·u² − (u_xy·u_z + u_xz·u_y + u_yz·u_x)·u + 2·u_x·u_y·u_z`; the
//! four-term variant `u_xyz·u² − u_xy·u_z·u − u_xz·u_y·u + u_x·u_y·u_z`, which
//! lacks the `u_yz·u_x·u` term and the factor 2, does not vanish on every
//! solution and is not used.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::jet::{Jet, MultiIndex};
use crate::scalar::Scalar;

/// Largest `n` for which the polynomial form is generated.
pub const MAX_POLYNOMIAL_DIMENSION: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualForm {
    LogForm,
    PolynomialForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DAlembertProblem {
    n: usize,
    form: ResidualForm,
}

impl DAlembertProblem {
    pub fn new(n: usize, form: ResidualForm) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self { n, form })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> ResidualForm {
        self.form
    }

    pub fn residual<T: Scalar>(&self, f: &Field<T>, point: &[T]) -> Result<T> {
        match self.form {
            ResidualForm::LogForm => residual_log(f, point, self.n),
            ResidualForm::PolynomialForm => residual_poly(f, point, self.n),
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "d'Alembert dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn check_point<T: Scalar>(f: &Field<T>, point: &[T], n: usize) -> Result<()> {
    check_dimension(n)?;
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: point.len(),
        });
    }
    Ok(())
}

fn finite<T: Scalar>(v: T, what: &str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// `∂ⁿ log f / ∂x₁⋯∂xₙ` at `point`.
pub fn residual_log<T: Scalar>(f: &Field<T>, point: &[T], n: usize) -> Result<T> {
    check_point(f, point, n)?;
    let j = f.jet(point, n)?;
    log_mixed_partial(&j)
}

/// Mixed partial `∂x₁⋯∂xₙ` of `log f` from a jet of `f` of order ≥ n.
pub fn log_mixed_partial<T: Scalar>(j: &Jet<T>) -> Result<T> {
    let n = j.n();
    if j.value().is_zero() {
        return Err(Error::OutsideRegularLocus(
            j.base_point().iter().map(Scalar::to_f64).collect(),
        ));
    }
    // The constant term of log f never enters a derivative.
    let l = j.truncate(n)?.ln_with_constant(T::zero())?;
    finite(l.derivative(&MultiIndex::all_ones(n))?, "log-form residual")
}

/// The polynomial residual `F(Dⁿf) = fⁿ·∂ⁿ log f / ∂x₁⋯∂xₙ` at `point`.
pub fn residual_poly<T: Scalar>(f: &Field<T>, point: &[T], n: usize) -> Result<T> {
    check_point(f, point, n)?;
    let poly = LogDerivativePolynomial::for_dimension(n)?;
    let j = f.jet(point, n)?;
    finite(poly.evaluate(&j)?, "polynomial residual")
}

/// `fⁿ·∂ⁿ log f / ∂x₁⋯∂xₙ` expanded as a polynomial in `u` and the
/// square-free mixed partials `u_S`, `S ⊆ {1…n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDerivativePolynomial {
    n: usize,
    terms: Vec<PolyTerm>,
}

/// `coefficient · u^u_power · Π u_S` with each `S` a bit mask, bit `i` for `x^{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTerm {
    pub coefficient: i64,
    pub u_power: u32,
    pub factors: Vec<u32>,
}

impl LogDerivativePolynomial {
    /// The cached expansion for `n`.
    pub fn for_dimension(n: usize) -> Result<Arc<LogDerivativePolynomial>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LogDerivativePolynomial>>>> =
            OnceLock::new();
        check_dimension(n)?;
        if n > MAX_POLYNOMIAL_DIMENSION {
            return Err(Error::InvalidInput(format!(
                "polynomial form is generated for n ≤ {MAX_POLYNOMIAL_DIMENSION}, got {n}"
            )));
        }
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("polynomial cache poisoned");
        Ok(guard
            .entry(n)
            .or_insert_with(|| Arc::new(Self::expand(n)))
            .clone())
    }

    /// Differentiates `log u` once in each direction, tracking terms
    /// `c · u^{-r} · Π u_S`, then multiplies through by `uⁿ`.
    fn expand(n: usize) -> Self {
        // key: (r, sorted factor masks)
        let mut terms: BTreeMap<(u32, Vec<u32>), i64> = BTreeMap::new();
        terms.insert((1, vec![1]), 1);
        for j in 1..n {
            let bit = 1u32 << j;
            let mut next: BTreeMap<(u32, Vec<u32>), i64> = BTreeMap::new();
            for ((r, factors), c) in terms {
                // d/dx_j of u^{-r}
                let mut f = factors.clone();
                f.push(bit);
                f.sort_unstable();
                *next.entry((r + 1, f)).or_default() -= c * r as i64;
                // d/dx_j of each u_S
                for k in 0..factors.len() {
                    let mut f = factors.clone();
                    f[k] |= bit;
                    f.sort_unstable();
                    *next.entry((r, f)).or_default() += c;
                }
            }
            next.retain(|_, c| *c != 0);
            terms = next;
        }
        let terms = terms
            .into_iter()
            .map(|((r, factors), coefficient)| PolyTerm {
                coefficient,
                u_power: n as u32 - r,
                factors,
            })
            .collect();
        Self { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    /// Evaluates `F` from a jet of order ≥ n.
    pub fn evaluate<T: Scalar>(&self, j: &Jet<T>) -> Result<T> {
        if j.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: j.n(),
            });
        }
        let full = (1u32 << self.n) - 1;
        let partials = (0..=full)
            .map(|mask| j.derivative(&mask_index(mask, self.n)))
            .collect::<Result<Vec<T>>>()?;
        let u = &partials[0];
        let mut total = T::zero();
        for term in &self.terms {
            let mut t = T::from_i64(term.coefficient);
            for _ in 0..term.u_power {
                t = t * u.clone();
            }
            for &mask in &term.factors {
                t = t * partials[mask as usize].clone();
            }
            total = total + t;
        }
        Ok(total)
    }

    /// Renders `F` with the given coordinate names, e.g. `u_xy*u - u_x*u_y`.
    pub fn render(&self, names: &[&str]) -> String {
        let mut out = String::new();
        for (k, term) in self.terms.iter().enumerate() {
            let mag = term.coefficient.abs();
            if k == 0 {
                if term.coefficient < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if term.coefficient < 0 { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if mag != 1 {
                parts.push(mag.to_string());
            }
            for &mask in &term.factors {
                let sub: String = (0..self.n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| names.get(i).copied().unwrap_or("?"))
                    .collect();
                parts.push(format!("u_{sub}"));
            }
            match term.u_power {
                0 => {}
                1 => parts.push("u".into()),
                p => parts.push(format!("u^{p}")),
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

fn mask_index(mask: u32, n: usize) -> MultiIndex {
    MultiIndex::new((0..n).map(|i| (mask >> i) & 1).collect()).expect("n ≥ 1")
}

/// The n = 2 polynomial `u_xy·u − u_x·u_y` from raw derivative values.
pub fn dalembert_2d<T: Scalar>(u: T, u_x: T, u_y: T, u_xy: T) -> T {
    u_xy * u - u_x * u_y
}

fn binomial(m: u64, k: u64) -> Option<u64> {
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(m as u128 - k as u128 + i)? / i;
    }
    u64::try_from(c).ok()
}

/// Dimension of the symbol at the top order: `(2n−1)!/(n!(n−1)!) − 1`.
pub fn symbol_dimension(n: usize) -> Result<u64> {
    check_dimension(n)?;
    let n = n as u64;
    binomial(2 * n - 1, n)
        .map(|c| c - 1)
        .ok_or_else(|| Error::Overflow(format!("symbol dimension for n = {n}")))
}

/// Dimension of the equation as a subbundle of the jet space: `n + (2n)!/(n!)² − 1`.
pub fn equation_dimension(n: usize) -> Result<u64> {
    check_dimension(n)?;
    let n64 = n as u64;
    binomial(2 * n64, n64)
        .and_then(|c| c.checked_add(n64))
        .map(|c| c - 1)
        .ok_or_else(|| Error::Overflow(format!("equation dimension for n = {n}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WhitneyCheck {
    pub dim_equation: u64,
    pub required: u64,
    pub embeddable: bool,
}

/// Whether an `(n−1)`-manifold fits in the equation by the Whitney bound
/// `dim ≥ 2(n−1) + 1`.
pub fn whitney_check(n: usize) -> Result<WhitneyCheck> {
    let dim_equation = equation_dimension(n)?;
    let required = 2 * (n as u64 - 1) + 1;
    Ok(WhitneyCheck {
        dim_equation,
        required,
        embeddable: dim_equation >= required,
    })
}

/// `(f_xy·f − f_x·f_y, f_xxy·f − f_xx·f_y, f_xyy·f − f_yy·f_x)`: the n = 2
/// equation and its first prolongation.
pub fn prolongation_residuals_2d<T: Scalar>(f: &Field<T>, point: &[T]) -> Result<(T, T, T)> {
    check_point(f, point, 2)?;
    let j = f.jet(point, 3)?;
    let d = |a: u32, b: u32| j.derivative(&MultiIndex::new(vec![a, b]).expect("2 vars"));
    let (u, ux, uy) = (d(0, 0)?, d(1, 0)?, d(0, 1)?);
    let (uxx, uxy, uyy) = (d(2, 0)?, d(1, 1)?, d(0, 2)?);
    let (uxxy, uxyy) = (d(2, 1)?, d(1, 2)?);
    let r0 = uxy * u.clone() - ux.clone() * uy.clone();
    let r1 = uxxy * u.clone() - uxx * uy;
    let r2 = uxyy * u - uyy * ux;
    Ok((
        finite(r0, "prolongation residual")?,
        finite(r1, "prolongation residual")?,
        finite(r2, "prolongation residual")?,
    ))
}

/// A product `f = f₁⋯fₙ` where factor `i` does not depend on `x^{i+1}`.
#[derive(Clone)]
pub struct ProductSolution<T = f64> {
    factors: Vec<Field<T>>,
    field: Field<T>,
}

impl<T: Scalar> std::fmt::Debug for ProductSolution<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductSolution").field("factors", &self.factors).finish()
    }
}

impl<T: Scalar> ProductSolution<T> {
    /// Expression factors are checked structurally; other factor kinds are
    /// checked with [`ProductSolution::independence_defect`].
    pub fn new(factors: Vec<Field<T>>) -> Result<Self> {
        let n = factors.len();
        check_dimension(n)?;
        for (i, f) in factors.iter().enumerate() {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.dim(),
                });
            }
            if let Field::Expression { expr, .. } = f {
                if expr.depends_on(i) {
                    return Err(Error::InvalidInput(format!(
                        "factor {} depends on x{}",
                        i + 1,
                        i + 1
                    )));
                }
            }
        }
        let field = Field::product(factors.clone())?;
        Ok(Self { factors, field })
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Field<T>] {
        &self.factors
    }

    pub fn field(&self) -> &Field<T> {
        &self.field
    }

    /// Largest `|coefficient|` of factor `i`'s jet over indices with a
    /// positive exponent in position `i`.
    pub fn independence_defect(&self, point: &[T], order: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, f) in self.factors.iter().enumerate() {
            let j = f.jet(point, order)?;
            for (alpha, c) in j.shape().indices().iter().zip(j.coefficients()) {
                if alpha.exponents()[i] > 0 {
                    worst = worst.max(c.to_f64().abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Per-point residual record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    pub value: f64,
    /// Absent when `f ≤ 0`.
    pub residual_log: Option<f64>,
    pub residual_poly: Option<f64>,
    pub status: PointStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    /// Residual within tolerance.
    Solution,
    NotSolution,
    /// `f = 0`: decided by the polynomial form alone.
    OutsideRegularLocus,
}

/// Evaluates both residual forms where they are defined and gates the point
/// at `tolerance` (scaled by `max(1, |f|ⁿ)` for the polynomial form).
pub fn evaluate_point(f: &Field<f64>, point: &[f64], n: usize, tolerance: f64) -> Result<PointResidual> {
    check_point(f, point, n)?;
    let j = f.jet(point, n)?;
    let value = *j.value();
    let residual_log = if value > 0.0 {
        Some(log_mixed_partial(&j)?)
    } else {
        None
    };
    let residual_poly = if n <= MAX_POLYNOMIAL_DIMENSION {
        Some(LogDerivativePolynomial::for_dimension(n)?.evaluate(&j)?)
    } else {
        None
    };
    let poly_ok = residual_poly.map(|r| r.abs() < tolerance * 1f64.max(value.abs().powi(n as i32)));
    let status = match (residual_log, poly_ok) {
        _ if value == 0.0 => match poly_ok {
            Some(true) => PointStatus::OutsideRegularLocus,
            _ => PointStatus::NotSolution,
        },
        (Some(r), _) if r.abs() < tolerance => PointStatus::Solution,
        (None, Some(true)) => PointStatus::Solution,
        _ => PointStatus::NotSolution,
    };
    Ok(PointResidual {
        point: point.to_vec(),
        value,
        residual_log,
        residual_poly,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn field(src: &str, n: usize) -> Field {
        Field::parse(src, n).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(symbol_dimension(2).unwrap(), 2);
        assert_eq!(symbol_dimension(3).unwrap(), 9);
        assert_eq!(symbol_dimension(8).unwrap(), 6434);
        assert_eq!(equation_dimension(2).unwrap(), 7);
        assert_eq!(equation_dimension(3).unwrap(), 22);
        assert_eq!(equation_dimension(8).unwrap(), 12877);
        assert!(symbol_dimension(1).is_err());
        assert!(matches!(equation_dimension(40), Err(Error::Overflow(_))));
        assert!(symbol_dimension(33).is_ok());
    }

    #[test]
    fn dimensions_strictly_increase() {
        for n in 2..30 {
            assert!(symbol_dimension(n + 1).unwrap() > symbol_dimension(n).unwrap());
            assert!(equation_dimension(n + 1).unwrap() > equation_dimension(n).unwrap());
        }
    }

    #[test]
    fn whitney() {
        let w = whitney_check(8).unwrap();
        assert_eq!((w.dim_equation, w.required, w.embeddable), (12877, 15, true));
        let w = whitney_check(2).unwrap();
        assert_eq!((w.dim_equation, w.required, w.embeddable), (7, 3, true));
        let w = whitney_check(3).unwrap();
        assert_eq!((w.dim_equation, w.required, w.embeddable), (22, 5, true));
    }

    #[test]
    fn expansion_n2_n3() {
        let p2 = LogDerivativePolynomial::for_dimension(2).unwrap();
        assert_eq!(p2.render(&["x", "y"]), "u_xy*u - u_x*u_y");
        let p3 = LogDerivativePolynomial::for_dimension(3).unwrap();
        let mut terms: Vec<(i64, u32, Vec<u32>)> = p3
            .terms()
            .iter()
            .map(|t| (t.coefficient, t.u_power, t.factors.clone()))
            .collect();
        terms.sort();
        let mut expected = vec![
            (1, 2, vec![0b111]),
            (-1, 1, vec![0b011, 0b100]),
            (-1, 1, vec![0b010, 0b101]),
            (-1, 1, vec![0b001, 0b110]),
            (2, 0, vec![0b001, 0b010, 0b100]),
        ];
        expected.sort();
        assert_eq!(terms, expected);
    }

    #[test]
    fn expansion_term_counts_are_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for n in 2..=8 {
            let p = LogDerivativePolynomial::for_dimension(n).unwrap();
            assert_eq!(p.terms().len(), bell[n], "n = {n}");
            // leading term u_{1⋯n}·u^{n−1}
            let full = (1u32 << n) - 1;
            let lead = p.terms().iter().find(|t| t.factors == vec![full]).unwrap();
            assert_eq!((lead.coefficient, lead.u_power), (1, n as u32 - 1));
        }
    }

    #[test]
    fn separable_exponentials() {
        let f = field("exp(x)*exp(y)", 2);
        for p in [[0.0, 0.0], [1.2, -0.3], [-2.0, 0.7]] {
            assert!(residual_log(&f, &p, 2).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn exp_xy_has_unit_residual() {
        let f = field("exp(x*y)", 2);
        for p in [[0.0, 0.0], [0.5, -0.4], [1.0, 1.0]] {
            assert!((residual_log(&f, &p, 2).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_poly_residual() {
        let f = field("x + y + 3", 2);
        assert_eq!(residual_poly(&f, &[0.0, 0.0], 2).unwrap(), -1.0);
    }

    #[test]
    fn footnote_formula_exact_mode() {
        let f: Field<BigRational> = Field::parse("x^2*y + 3*x - y^2/2 + 1", 2).unwrap();
        let p = [
            BigRational::new(1.into(), 3.into()),
            BigRational::new((-5).into(), 7.into()),
        ];
        let j = f.jet(&p, 2).unwrap();
        let d = |a, b| j.derivative(&MultiIndex::new(vec![a, b]).unwrap()).unwrap();
        let direct = dalembert_2d(d(0, 0), d(1, 0), d(0, 1), d(1, 1));
        assert_eq!(residual_poly(&f, &p, 2).unwrap(), direct);
    }

    #[test]
    fn log_form_exact_mode_matches_poly() {
        let f: Field<BigRational> = Field::parse("1 + x^2 + x*y*z + z^3", 3).unwrap();
        let p = [
            BigRational::new(1.into(), 2.into()),
            BigRational::new(2.into(), 3.into()),
            BigRational::new((-1).into(), 4.into()),
        ];
        let u = f.value(&p).unwrap();
        let log = residual_log(&f, &p, 3).unwrap();
        let poly = residual_poly(&f, &p, 3).unwrap();
        assert_eq!(poly, u.clone() * u.clone() * u * log);
    }

    #[test]
    fn zero_field_is_outside_regular_locus() {
        let f = field("x*y", 2);
        assert!(matches!(
            residual_log(&f, &[0.0, 1.0], 2),
            Err(Error::OutsideRegularLocus(_))
        ));
        // x·y is separable, so F vanishes even where f = 0.
        assert_eq!(residual_poly(&f, &[0.0, 1.0], 2).unwrap(), 0.0);
        let r = evaluate_point(&f, &[0.0, 1.0], 2, 1e-9).unwrap();
        assert_eq!(r.status, PointStatus::OutsideRegularLocus);
        assert!(r.residual_log.is_none());
    }

    #[test]
    fn negative_field_log_form_errors_poly_form_works() {
        let f = field("-1 - x^2", 2);
        assert!(matches!(residual_log(&f, &[0.3, 0.1], 2), Err(Error::Domain(_))));
        assert_eq!(residual_poly(&f, &[0.3, 0.1], 2).unwrap(), 0.0);
        let r = evaluate_point(&f, &[0.3, 0.1], 2, 1e-9).unwrap();
        assert_eq!(r.status, PointStatus::Solution);
    }

    #[test]
    fn prolongation_of_constant_and_separable() {
        let (a, b, c) = prolongation_residuals_2d(&field("4.5", 2), &[0.1, 0.2]).unwrap();
        assert_eq!((a, b, c), (0.0, 0.0, 0.0));
        let f = field("exp(x^2)*(1 + y^2)", 2);
        let (a, b, c) = prolongation_residuals_2d(&f, &[0.0, 1.0]).unwrap();
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14 && c.abs() < 1e-14, "{a} {b} {c}");
        let f = field("(0/2*y^2 + y + 1)*exp(x)", 2);
        let (a, b, c) = prolongation_residuals_2d(&f, &[0.0, 0.0]).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && c.abs() < 1e-15);
    }

    #[test]
    fn product_solution_rejects_dependent_factor() {
        let bad = ProductSolution::new(vec![field("x + y", 2), field("1 + x", 2)]);
        assert!(bad.is_err());
        let good = ProductSolution::new(vec![field("1 + y^2", 2), field("2 + x", 2)]).unwrap();
        assert_eq!(good.independence_defect(&[0.3, 0.4], 3).unwrap(), 0.0);
        assert!(residual_log(good.field(), &[0.3, 0.4], 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn problem_dispatch() {
        assert!(DAlembertProblem::new(1, ResidualForm::LogForm).is_err());
        let p = DAlembertProblem::new(2, ResidualForm::PolynomialForm).unwrap();
        assert_eq!(p.residual(&field("x + y + 3", 2), &[0.0, 0.0]).unwrap(), -1.0);
    }
}
