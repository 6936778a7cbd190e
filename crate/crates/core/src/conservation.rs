//! Conservation laws `ω = Σ_i ω_i dx¹∧⋯∧dx̂ⁱ∧⋯∧dxⁿ` built from the invariants
//! `I_{α i} = ∂^α ∂x₁⋯∂̂xᵢ⋯∂xₙ log f`, and numerical checks of `dω = 0` on
//! solutions.
//!
//! Component `i` is an expression over its input list: the coordinates
//! `x^j` (`j ≠ i`) first, then the invariants `I_{α i}` with `α_i = 0` and
//! `|α| ≤ max_alpha_order`, by increasing order. Invariants are named
//! `I_a1_a2_…_an`, e.g. `I_0_1` for `α = (0, 1)` when `n = 2`.
//!
//! Since `ω_i` never depends on `x^i` directly, the single coefficient of
//! `dω` against `dx¹∧⋯∧dxⁿ` is
//! `Σ_i (−1)^{i−1} Σ_α (∂ω_i/∂I_{α i})·∂^α ∂x₁⋯∂xₙ log f`.

use serde::Serialize;

use crate::dalembert::residual_log;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::{variable_names, Field};
use crate::jet::{Jet, MultiIndex};
use crate::quadrature::CompositeRule;

pub const DEFAULT_MAX_ALPHA_ORDER: usize = 2;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

/// An argument slot of a component function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormInput {
    Coordinate(usize),
    Invariant(MultiIndex),
}

/// Input slots of component `i` (0-based) in their canonical order.
pub fn component_inputs(n: usize, i: usize, max_alpha_order: usize) -> Vec<FormInput> {
    let mut out: Vec<FormInput> = (0..n).filter(|&j| j != i).map(FormInput::Coordinate).collect();
    for order in 0..=max_alpha_order {
        let mut alphas = Vec::new();
        compositions(n, i, order, &mut vec![0; n], 0, &mut alphas);
        out.extend(alphas.into_iter().map(FormInput::Invariant));
    }
    out
}

fn compositions(n: usize, skip: usize, left: usize, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<MultiIndex>) {
    if pos == n {
        if left == 0 {
            out.push(MultiIndex::new(cur.clone()).expect("nonempty"));
        }
        return;
    }
    if pos == skip {
        compositions(n, skip, left, cur, pos + 1, out);
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u32;
        compositions(n, skip, left - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Names of [`component_inputs`], as accepted by [`ConservationForm::parse`].
pub fn component_input_names(n: usize, i: usize, max_alpha_order: usize) -> Vec<String> {
    let coords = variable_names(n);
    component_inputs(n, i, max_alpha_order)
        .into_iter()
        .map(|input| match input {
            FormInput::Coordinate(j) => coords[j].clone(),
            FormInput::Invariant(a) => {
                let parts: Vec<String> = a.exponents().iter().map(|e| e.to_string()).collect();
                format!("I_{}", parts.join("_"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationForm {
    n: usize,
    components: Vec<Expr>,
    max_alpha_order: usize,
    inputs: Vec<Vec<FormInput>>,
}

impl ConservationForm {
    /// `components[i]` reads its arguments through `Var(k)`, `k` indexing
    /// [`component_inputs`]`(n, i, max_alpha_order)`.
    pub fn new(n: usize, components: Vec<Expr>, max_alpha_order: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("conservation forms need n ≥ 2, got {n}")));
        }
        if components.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: components.len() });
        }
        let inputs: Vec<Vec<FormInput>> = (0..n).map(|i| component_inputs(n, i, max_alpha_order)).collect();
        for (i, (c, slots)) in components.iter().zip(&inputs).enumerate() {
            if c.arity() > slots.len() {
                return Err(Error::InvalidInput(format!(
                    "component {} uses input {} but only {} are available",
                    i + 1,
                    c.arity() - 1,
                    slots.len()
                )));
            }
        }
        Ok(Self { n, components, max_alpha_order, inputs })
    }

    /// Parses one expression per component over [`component_input_names`].
    pub fn parse<S: AsRef<str>>(n: usize, sources: &[S], max_alpha_order: usize) -> Result<Self> {
        if sources.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: sources.len() });
        }
        let components = sources
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let names = component_input_names(n, i, max_alpha_order);
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                Expr::parse(s.as_ref(), &refs)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, components, max_alpha_order)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn max_alpha_order(&self) -> usize {
        self.max_alpha_order
    }

    pub fn inputs(&self, i: usize) -> &[FormInput] {
        &self.inputs[i]
    }

    /// Jet order of `log f` needed for the `dω` coefficient.
    fn required_order(&self) -> usize {
        self.n + self.max_alpha_order
    }

    fn input_values(&self, i: usize, point: &[f64], log_jet: &Jet<f64>) -> Result<Vec<f64>> {
        let omit = omit_one(self.n, i);
        self.inputs[i]
            .iter()
            .map(|slot| match slot {
                FormInput::Coordinate(j) => Ok(point[*j]),
                FormInput::Invariant(a) => log_jet.derivative(&a.plus(&omit)),
            })
            .collect()
    }

    /// Values `ω_i(point)` for every component, from the field's log-jet.
    pub fn component_values(&self, f: &Field<f64>, point: &[f64]) -> Result<Vec<f64>> {
        let log_jet = log_jet(f, point, self.n - 1 + self.max_alpha_order)?;
        (0..self.n)
            .map(|i| {
                let args = self.input_values(i, point, &log_jet)?;
                self.components[i].eval(&args)
            })
            .collect()
    }

    /// The coefficient of `dω` against `dx¹∧⋯∧dxⁿ` at `point`, for any
    /// positive field. On solutions it vanishes.
    pub fn exterior_derivative_coefficient(&self, f: &Field<f64>, point: &[f64]) -> Result<f64> {
        let log_jet = log_jet(f, point, self.required_order())?;
        let ones = MultiIndex::all_ones(self.n);
        let mut total = 0.0;
        for i in 0..self.n {
            let args = self.input_values(i, point, &log_jet)?;
            let grad = self.components[i].eval_jet(&args, 1)?;
            let mut d_i = 0.0;
            for (k, slot) in self.inputs[i].iter().enumerate() {
                if let FormInput::Invariant(a) = slot {
                    let partial = grad.derivative(&MultiIndex::unit(args.len(), k))?;
                    if partial != 0.0 {
                        d_i += partial * log_jet.derivative(&a.plus(&ones))?;
                    }
                }
            }
            if i % 2 == 0 {
                total += d_i;
            } else {
                total -= d_i;
            }
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::NonFinite(format!("dω coefficient at {point:?}")))
        }
    }
}

fn omit_one(n: usize, i: usize) -> MultiIndex {
    let mut e = vec![1; n];
    e[i] = 0;
    MultiIndex::new(e).expect("nonempty")
}

fn log_jet(f: &Field<f64>, point: &[f64], order: usize) -> Result<Jet<f64>> {
    let j = f.jet(point, order)?;
    let v = *j.value();
    if !(v > 0.0) {
        return Err(Error::Domain(format!("log f needs f > 0, got f = {v} at {point:?}")));
    }
    j.ln()
}

/// `I_{α i}(point) = ∂^α ∂x₁⋯∂̂xᵢ⋯∂xₙ log f`, with `i` 0-based.
pub fn invariant_i(f: &Field<f64>, alpha: &MultiIndex, i: usize, point: &[f64]) -> Result<f64> {
    let n = f.dim();
    if point.len() != n || alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: point.len().min(alpha.dim()) });
    }
    if i >= n {
        return Err(Error::InvalidInput(format!("direction {i} out of range for n = {n}")));
    }
    if alpha.exponents()[i] != 0 {
        return Err(Error::InvalidInput(format!("α must not differentiate along direction {}", i + 1)));
    }
    let total = alpha.plus(&omit_one(n, i));
    let j = log_jet(f, point, total.order())?;
    j.derivative(&total)
}

/// Sample points that passed the solution gate `|residual_log| < residual_tol`.
#[derive(Debug, Clone)]
pub struct SolutionSampleSet {
    field: Field<f64>,
    points: Vec<Vec<f64>>,
    residual_tol: f64,
}

impl SolutionSampleSet {
    pub fn new(field: Field<f64>, points: Vec<Vec<f64>>, residual_tol: f64) -> Result<Self> {
        let n = field.dim();
        for (index, p) in points.iter().enumerate() {
            let r = residual_log(&field, p, n)?;
            if !(r.abs() < residual_tol) {
                return Err(Error::GateFailed { index, residual: r.abs(), tolerance: residual_tol });
            }
        }
        Ok(Self { field, points, residual_tol })
    }

    pub fn field(&self) -> &Field<f64> {
        &self.field
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn residual_tol(&self) -> f64 {
        self.residual_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCoefficient {
    pub point: Vec<f64>,
    pub coefficient: f64,
}

/// Per-point `dω` coefficients on any positive field, without the gate.
pub fn exterior_derivative_coefficients(
    form: &ConservationForm,
    f: &Field<f64>,
    points: &[Vec<f64>],
) -> Result<Vec<PointCoefficient>> {
    if f.dim() != form.n() {
        return Err(Error::DimensionMismatch { expected: form.n(), found: f.dim() });
    }
    points
        .iter()
        .map(|p| {
            Ok(PointCoefficient {
                point: p.clone(),
                coefficient: form.exterior_derivative_coefficient(f, p)?,
            })
        })
        .collect()
}

/// `max |dω|` over the gated sample.
pub fn exterior_derivative_residual(form: &ConservationForm, sample: &SolutionSampleSet) -> Result<f64> {
    Ok(exterior_derivative_coefficients(form, sample.field(), sample.points())?
        .iter()
        .fold(0.0, |m, c| m.max(c.coefficient.abs())))
}

/// `∮ ω = ∮ ω₁ dy + ω₂ dx` along a closed polyline in the plane. For a
/// counter-clockwise loop this equals the integral of the `dω` coefficient
/// over the enclosed region.
pub fn loop_integral(
    form: &ConservationForm,
    f: &Field<f64>,
    polyline: &[[f64; 2]],
    points_per_segment: usize,
) -> Result<f64> {
    if form.n() != 2 || f.dim() != 2 {
        return Err(Error::InvalidInput("loop integrals are defined for n = 2".into()));
    }
    let (first, last) = match (polyline.first(), polyline.last()) {
        (Some(a), Some(b)) if polyline.len() >= 2 => (a, b),
        _ => return Err(Error::InvalidInput("a loop needs at least two vertices".into())),
    };
    if (first[0] - last[0]).abs() > 1e-12 || (first[1] - last[1]).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("loop is not closed: {first:?} ≠ {last:?}")));
    }
    let rule = CompositeRule::new(0.0, 1.0, points_per_segment)?;
    let mut total = 0.0;
    for seg in polyline.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        if dx == 0.0 && dy == 0.0 {
            continue;
        }
        total += rule.integrate(|s| {
            let p = [a[0] + s * dx, a[1] + s * dy];
            let w = form.component_values(f, &p)?;
            Ok(w[0] * dy + w[1] * dx)
        })?;
    }
    Ok(total)
}

/// Axis-aligned counter-clockwise rectangle as a closed polyline.
pub fn rectangle_loop(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<[f64; 2]> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
}
