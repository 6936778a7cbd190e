//! Truncated multivariate Taylor expansions.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f(x₀) / α!` of a scalar field
//! for every multi-index with `|α| ≤ K`, laid out in graded order. All jets of
//! the same dimension and order share one [`JetShape`], which holds the index
//! tables and the convolution pairs used by multiplication and the
//! degree-by-degree recurrences of the elementary functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest coefficient count a shape may hold. `n = 8` at order 8 needs 12870.
pub const MAX_JET_COEFFICIENTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidInput(
                "multi-index needs at least one variable".into(),
            ));
        }
        Ok(Self(exponents))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    /// `(1, 1, …, 1)`, the index of the mixed partial `∂x₁⋯∂xₙ`.
    pub fn all_ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α!` as a product of factorials.
    pub fn factorial(&self) -> i64 {
        self.0.iter().map(|&e| factorial(e)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn factorial(k: u32) -> i64 {
    (1..=k as i64).product()
}

/// Index tables shared by all jets with the same `(n, K)`.
#[derive(Debug)]
pub struct JetShape {
    n: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    degrees: Vec<usize>,
    lookup: HashMap<Vec<u32>, usize>,
    /// `pairs[k]` lists every `(i, j)` with `indices[i] + indices[j] = indices[k]`,
    /// ordered by increasing `i`.
    pairs: Vec<Vec<(u32, u32)>>,
}

impl JetShape {
    /// Returns the cached shape for `(n, order)`, building it on first use.
    pub fn get(n: usize, order: usize) -> Result<Arc<JetShape>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetShape>>>> = OnceLock::new();
        if n == 0 {
            return Err(Error::InvalidInput("jet dimension must be at least 1".into()));
        }
        let size = coefficient_count(n, order);
        if size > MAX_JET_COEFFICIENTS {
            return Err(Error::ShapeTooLarge { n, order, size });
        }
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(shape) = cache.lock().expect("jet shape cache poisoned").get(&(n, order)) {
            return Ok(shape.clone());
        }
        let shape = Arc::new(Self::build(n, order));
        cache
            .lock()
            .expect("jet shape cache poisoned")
            .entry((n, order))
            .or_insert_with(|| shape.clone());
        Ok(shape)
    }

    fn build(n: usize, order: usize) -> Self {
        let mut indices = Vec::with_capacity(coefficient_count(n, order));
        for degree in 0..=order {
            let mut current = vec![0u32; n];
            compositions(degree as u32, 0, &mut current, &mut indices);
        }
        let degrees: Vec<usize> = indices.iter().map(MultiIndex::order).collect();
        let lookup: HashMap<Vec<u32>, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.0.clone(), k))
            .collect();
        let pairs = indices
            .iter()
            .map(|alpha| {
                let mut list = Vec::new();
                let mut beta = vec![0u32; n];
                sub_indices(&alpha.0, 0, &mut beta, &mut |b| {
                    let gamma: Vec<u32> = alpha.0.iter().zip(b).map(|(a, b)| a - b).collect();
                    list.push((lookup[b] as u32, lookup[&gamma] as u32));
                });
                list.sort_unstable();
                list
            })
            .collect();
        Self {
            n,
            order,
            indices,
            degrees,
            lookup,
            pairs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(&alpha.0).copied()
    }
}

/// Number of multi-indices in `n` variables with total order at most `order`.
pub fn coefficient_count(n: usize, order: usize) -> usize {
    // C(n + order, order), computed incrementally; each partial product is exact.
    let mut c: u128 = 1;
    for k in 1..=order as u128 {
        c = c * (n as u128 + k) / k;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

/// All exponent vectors with the given total, in reverse lexicographic order.
fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        compositions(remaining - e, pos + 1, current, out);
    }
    current[pos] = 0;
}

fn sub_indices(alpha: &[u32], pos: usize, beta: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if pos == alpha.len() {
        visit(beta);
        return;
    }
    for e in 0..=alpha[pos] {
        beta[pos] = e;
        sub_indices(alpha, pos + 1, beta, visit);
    }
    beta[pos] = 0;
}

/// Truncated Taylor expansion of a scalar field at a base point.
#[derive(Clone)]
pub struct Jet<T> {
    shape: Arc<JetShape>,
    base: Arc<[T]>,
    coeffs: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("n", &self.shape.n)
            .field("order", &self.shape.order)
            .field("base", &self.base)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Scalar> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other) && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> Jet<T> {
    pub fn constant(shape: Arc<JetShape>, base: Arc<[T]>, value: T) -> Result<Self> {
        check_base(&shape, &base)?;
        let mut coeffs = vec![T::zero(); shape.len()];
        coeffs[0] = value;
        Ok(Self { shape, base, coeffs })
    }

    /// The jet of the coordinate function `x^i`.
    pub fn variable(shape: Arc<JetShape>, base: Arc<[T]>, i: usize) -> Result<Self> {
        check_base(&shape, &base)?;
        if i >= shape.n {
            return Err(Error::UnknownVariable(format!("x{}", i + 1)));
        }
        let mut coeffs = vec![T::zero(); shape.len()];
        coeffs[0] = base[i].clone();
        if shape.order >= 1 {
            coeffs[shape.position(&MultiIndex::unit(shape.n, i)).expect("unit index")] = T::one();
        }
        Ok(Self { shape, base, coeffs })
    }

    /// Builds a jet from raw Taylor coefficients in the shape's graded order.
    pub fn from_coefficients(shape: Arc<JetShape>, base: Arc<[T]>, coeffs: Vec<T>) -> Result<Self> {
        check_base(&shape, &base)?;
        if coeffs.len() != shape.len() {
            return Err(Error::DimensionMismatch {
                expected: shape.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { shape, base, coeffs })
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn order(&self) -> usize {
        self.shape.order
    }

    pub fn shape(&self) -> &Arc<JetShape> {
        &self.shape
    }

    pub fn base_point(&self) -> &Arc<[T]> {
        &self.base
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    /// Taylor coefficient `∂^α f / α!`.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Result<T> {
        self.check_index(alpha)?;
        Ok(self.coeffs[self.shape.position(alpha).expect("index in range")].clone())
    }

    /// The mixed partial `∂^α f` at the base point, `coeffs[α]·α!`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<T> {
        Ok(self.coefficient(alpha)? * T::from_i64(alpha.factorial()))
    }

    /// The jet of `∂^β f`, one order `|β|` lower.
    pub fn derivative_jet(&self, beta: &MultiIndex) -> Result<Jet<T>> {
        self.check_index(beta)?;
        let shape = JetShape::get(self.shape.n, self.shape.order - beta.order())?;
        let coeffs = shape
            .indices()
            .iter()
            .map(|gamma| {
                let shifted = gamma.plus(beta);
                let k = self.shape.position(&shifted).expect("shifted index in range");
                self.coeffs[k].clone()
                    * T::from_i64(shifted.factorial() / gamma.factorial())
            })
            .collect();
        Ok(Jet {
            shape,
            base: self.base.clone(),
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<Jet<T>> {
        if order > self.shape.order {
            return Err(Error::OrderOverflow {
                requested: order,
                available: self.shape.order,
            });
        }
        let shape = JetShape::get(self.shape.n, order)?;
        let coeffs = self.coeffs[..shape.len()].to_vec();
        Ok(Jet {
            shape,
            base: self.base.clone(),
            coeffs,
        })
    }

    fn check_index(&self, alpha: &MultiIndex) -> Result<()> {
        if alpha.dim() != self.shape.n {
            return Err(Error::DimensionMismatch {
                expected: self.shape.n,
                found: alpha.dim(),
            });
        }
        if alpha.order() > self.shape.order {
            return Err(Error::OrderOverflow {
                requested: alpha.order(),
                available: self.shape.order,
            });
        }
        Ok(())
    }

    fn same_frame(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.shape, &other.shape)
            || (self.shape.n == other.shape.n && self.shape.order == other.shape.order))
            && self.base == other.base
    }

    fn check_frame(&self, other: &Self) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch)
        }
    }

    fn with_coeffs(&self, coeffs: Vec<T>) -> Jet<T> {
        Jet {
            shape: self.shape.clone(),
            base: self.base.clone(),
            coeffs,
        }
    }

    fn zeros(&self) -> Vec<T> {
        vec![T::zero(); self.shape.len()]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a.clone() * factor.clone()).collect())
    }

    pub fn add_constant(&self, c: &T) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].clone() + c.clone();
        self.with_coeffs(coeffs)
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let coeffs = self
            .shape
            .pairs
            .iter()
            .map(|pairs| {
                pairs.iter().fold(T::zero(), |acc, &(i, j)| {
                    acc + self.coeffs[i as usize].clone() * other.coeffs[j as usize].clone()
                })
            })
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let b0 = other.coeffs[0].clone();
        if b0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a = q·b solved for q in graded order.
        let mut q = self.zeros();
        for k in 0..q.len() {
            let mut acc = self.coeffs[k].clone();
            for &(i, j) in &self.shape.pairs[k] {
                let (i, j) = (i as usize, j as usize);
                if i != 0 {
                    acc = acc - other.coeffs[i].clone() * q[j].clone();
                }
            }
            q[k] = acc / b0.clone();
        }
        Ok(self.with_coeffs(q))
    }

    pub fn recip(&self) -> Result<Self> {
        let one = Jet::constant(self.shape.clone(), self.base.clone(), T::one())?;
        one.div(self)
    }

    pub fn exp(&self) -> Result<Self> {
        let g0 = self.coeffs[0]
            .try_exp()
            .ok_or(Error::Transcendental("exp"))?;
        // |α|·g[α] = Σ_{β+γ=α, β≠0} |β|·f[β]·g[γ]
        let mut g = self.zeros();
        g[0] = g0;
        for k in 1..g.len() {
            let mut acc = T::zero();
            for &(i, j) in &self.shape.pairs[k] {
                let (i, j) = (i as usize, j as usize);
                if i != 0 {
                    acc = acc + self.weight(i) * self.coeffs[i].clone() * g[j].clone();
                }
            }
            g[k] = acc / self.weight(k);
        }
        Ok(self.with_coeffs(g))
    }

    /// The jet of `log f` with the constant term replaced by `constant`.
    ///
    /// Only the constant term of `log f` is transcendental, so the remaining
    /// coefficients are available for every scalar type.
    pub fn ln_with_constant(&self, constant: T) -> Result<Self> {
        let f0 = self.coeffs[0].clone();
        if !f0.is_positive() {
            return Err(Error::Domain(format!(
                "logarithm of non-positive value {:e}",
                f0.to_f64()
            )));
        }
        // |α|·f[α] = Σ_{β+γ=α, β≠0} |β|·g[β]·f[γ]
        let mut g = self.zeros();
        g[0] = constant;
        for k in 1..g.len() {
            let mut acc = self.weight(k) * self.coeffs[k].clone();
            for &(i, j) in &self.shape.pairs[k] {
                let (i, j) = (i as usize, j as usize);
                if i != 0 && j != 0 {
                    acc = acc - self.weight(i) * g[i].clone() * self.coeffs[j].clone();
                }
            }
            g[k] = acc / (self.weight(k) * f0.clone());
        }
        Ok(self.with_coeffs(g))
    }

    pub fn ln(&self) -> Result<Self> {
        let f0 = &self.coeffs[0];
        if !f0.is_positive() {
            return Err(Error::Domain(format!(
                "logarithm of non-positive value {:e}",
                f0.to_f64()
            )));
        }
        let c = f0.try_ln().ok_or(Error::Transcendental("log"))?;
        self.ln_with_constant(c)
    }

    /// Returns `(sin f, cos f)`.
    pub fn sin_cos(&self) -> Result<(Self, Self)> {
        let s0 = self.coeffs[0].try_sin().ok_or(Error::Transcendental("sin"))?;
        let c0 = self.coeffs[0].try_cos().ok_or(Error::Transcendental("cos"))?;
        let mut s = self.zeros();
        let mut c = self.zeros();
        s[0] = s0;
        c[0] = c0;
        for k in 1..s.len() {
            let mut acc_s = T::zero();
            let mut acc_c = T::zero();
            for &(i, j) in &self.shape.pairs[k] {
                let (i, j) = (i as usize, j as usize);
                if i != 0 {
                    let w = self.weight(i) * self.coeffs[i].clone();
                    acc_s = acc_s + w.clone() * c[j].clone();
                    acc_c = acc_c - w * s[j].clone();
                }
            }
            s[k] = acc_s / self.weight(k);
            c[k] = acc_c / self.weight(k);
        }
        Ok((self.with_coeffs(s), self.with_coeffs(c)))
    }

    /// `f^p` for a real exponent; requires a positive base value.
    pub fn powf(&self, p: &T) -> Result<Self> {
        let f0 = self.coeffs[0].clone();
        if !f0.is_positive() {
            return Err(Error::Domain(format!(
                "real power of non-positive value {:e}",
                f0.to_f64()
            )));
        }
        let g0 = f0.try_powf(p).ok_or(Error::Transcendental("pow"))?;
        // f·E(g) = p·g·E(f), E the Euler degree operator.
        let mut g = self.zeros();
        g[0] = g0;
        for k in 1..g.len() {
            let mut acc = T::zero();
            for &(i, j) in &self.shape.pairs[k] {
                let (i, j) = (i as usize, j as usize);
                // i indexes g, j indexes f
                if j != 0 {
                    let w = p.clone() * self.weight(j) - self.weight(i);
                    acc = acc + w * g[i].clone() * self.coeffs[j].clone();
                }
            }
            g[k] = acc / (self.weight(k) * f0.clone());
        }
        Ok(self.with_coeffs(g))
    }

    /// Integer power by repeated squaring; exact for rational scalars.
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = Jet::constant(self.shape.clone(), self.base.clone(), T::one())?;
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }

    fn weight(&self, k: usize) -> T {
        T::from_i64(self.shape.degrees[k] as i64)
    }
}

fn check_base<T>(shape: &JetShape, base: &[T]) -> Result<()> {
    if base.len() != shape.n {
        return Err(Error::DimensionMismatch {
            expected: shape.n,
            found: base.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary jet arithmetic selected at run time.
pub fn jet_arith<T: Scalar>(a: &Jet<T>, b: &Jet<T>, op: JetOp) -> Result<Jet<T>> {
    match op {
        JetOp::Add => a.add(b),
        JetOp::Sub => a.sub(b),
        JetOp::Mul => a.mul(b),
        JetOp::Div => a.div(b),
    }
}
