//! Linearized perturbations of the closed-form solution and the average
//! asymptotic stability test.
//!
//! The perturbation is `ξ(x, y) = [s(y) + r(x)]·u(x, y)`. The second
//! coordinate plays the role of time: the averaging box at time `t` is the
//! slice `{(x, t) : |x| ≤ L}` with measure `dx`, and the material derivative
//! along the characteristic flow is `δξ/δt = (∂y ξ)·u`.
//!
//! The stability verdict comes from the fitted decay rate of `log p(t)`:
//! `p(t) = p(0)·e^{−ct}` with `c > 0` is stable. The literal supremum of
//! `ṗ/p` over the grid is reported next to it.

use serde::{Serialize, Serializer};

use crate::characteristics::ClosedFormSolution;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::Field;
use crate::jet::{Jet, MultiIndex};
use crate::quadrature::CompositeRule;

/// Smallest fitted rate counted as decay.
pub const DEFAULT_C_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    /// `s(y)`, an expression in `Var(0)`.
    pub s: Expr,
    /// `r(x)`, an expression in `Var(0)`.
    pub r: Expr,
    pub base: ClosedFormSolution,
}

impl Perturbation {
    pub fn new(s: Expr, r: Expr, base: ClosedFormSolution) -> Result<Self> {
        if s.arity() > 1 || r.arity() > 1 {
            return Err(Error::InvalidInput("s and r take one variable each".into()));
        }
        Ok(Self { s, r, base })
    }

    /// Parses `s` in `y` and `r` in `x`.
    pub fn parse(s: &str, r: &str, base: ClosedFormSolution) -> Result<Self> {
        Self::new(Expr::parse(s, &["y"])?, Expr::parse(r, &["x"])?, base)
    }

    /// `ξ` as an expression in `(x, y)`.
    pub fn xi_expr(&self) -> Expr {
        let s = self.s.substitute(&[Expr::var(1)]).expect("arity ≤ 1");
        let r = self.r.substitute(&[Expr::var(0)]).expect("arity ≤ 1");
        Expr::mul(Expr::add(s, r), self.base.expr())
    }

    pub fn xi_field(&self) -> Field<f64> {
        Field::Expression { expr: self.xi_expr(), n: 2 }
    }

    fn base_field(&self) -> Field<f64> {
        Field::Expression { expr: self.base.expr(), n: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageWindow {
    pub half_width: f64,
    pub t_grid: Vec<f64>,
    pub quadrature_points: usize,
}

impl AverageWindow {
    pub fn new(half_width: f64, t_grid: Vec<f64>, quadrature_points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("half-width must be positive, got {half_width}")));
        }
        if t_grid.is_empty()
            || t_grid.iter().any(|t| !t.is_finite())
            || t_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput("t grid must be finite and strictly increasing".into()));
        }
        if quadrature_points < 16 {
            return Err(Error::InvalidInput(format!(
                "at least 16 quadrature points are required, got {quadrature_points}"
            )));
        }
        Ok(Self { half_width, t_grid, quadrature_points })
    }

    /// `count` evenly spaced times on `[t0, t1]`.
    pub fn uniform(half_width: f64, t0: f64, t1: f64, count: usize, quadrature_points: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidInput("t grid needs at least two points".into()));
        }
        let grid = (0..count)
            .map(|k| t0 + (t1 - t0) * k as f64 / (count - 1) as f64)
            .collect();
        Self::new(half_width, grid, quadrature_points)
    }

    fn rule(&self) -> Result<CompositeRule> {
        CompositeRule::new(-self.half_width, self.half_width, self.quadrature_points)
    }
}

impl Default for AverageWindow {
    /// `L = 5`, 64 times on `[0.1, 10]`, 128 quadrature points.
    fn default() -> Self {
        Self::uniform(5.0, 0.1, 10.0, 64, 128).expect("valid default window")
    }
}

fn jet_at(f: &Field<f64>, x: f64, y: f64, order: usize) -> Result<Jet<f64>> {
    f.jet(&[x, y], order)
}

fn d(j: &Jet<f64>, a: u32, b: u32) -> f64 {
    j.derivative(&MultiIndex::new(vec![a, b]).expect("two variables"))
        .expect("order checked by caller")
}

pub fn xi_eval(pert: &Perturbation, x: f64, y: f64) -> Result<f64> {
    let s = pert.s.eval(&[y])?;
    let r = pert.r.eval(&[x])?;
    Ok((s + r) * pert.base.value(x, y)?)
}

/// Linearization of `u·u_xy − u_x·u_y` at the base, applied to `ξ`:
/// `ξ_xy·u + u_xy·ξ − ξ_x·u_y − u_x·ξ_y`.
pub fn linearized_residual(pert: &Perturbation, point: [f64; 2]) -> Result<f64> {
    let xi = jet_at(&pert.xi_field(), point[0], point[1], 2)?;
    let u = jet_at(&pert.base_field(), point[0], point[1], 2)?;
    let v = d(&xi, 1, 1) * d(&u, 0, 0) + d(&u, 1, 1) * d(&xi, 0, 0)
        - d(&xi, 1, 0) * d(&u, 0, 1)
        - d(&u, 1, 0) * d(&xi, 0, 1);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("linearized residual".into()))
    }
}

/// `δξ/δt = (∂y ξ)·u`.
pub fn material_derivative(pert: &Perturbation, x: f64, y: f64) -> Result<f64> {
    let xi = jet_at(&pert.xi_field(), x, y, 1)?;
    Ok(d(&xi, 0, 1) * pert.base.value(x, y)?)
}

/// `δφ = u·∂yφ`.
pub fn forward_operator(base: &ClosedFormSolution, phi: &Field<f64>, x: f64, y: f64) -> Result<f64> {
    let p = jet_at(phi, x, y, 1)?;
    Ok(base.value(x, y)? * d(&p, 0, 1))
}

/// `δ*φ = −∂y(u·φ) = −u·∂yφ − u_y·φ`.
pub fn adjoint_operator(base: &ClosedFormSolution, phi: &Field<f64>, x: f64, y: f64) -> Result<f64> {
    let p = jet_at(phi, x, y, 1)?;
    let u = jet_at(&closed_field(base), x, y, 1)?;
    Ok(-(d(&u, 0, 0) * d(&p, 0, 1) + d(&u, 0, 1) * d(&p, 0, 0)))
}

fn closed_field(base: &ClosedFormSolution) -> Field<f64> {
    Field::Expression { expr: base.expr(), n: 2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointDefect {
    /// `max |δφ − δ*φ|` over the quadrature nodes of the slice.
    pub pointwise_max: f64,
    /// `∫ [(δξ/δt)·φ + ξ·∂y(u·φ)] dx` over the slice. It equals
    /// `d/dt ∫ u·ξ·φ dx`, the boundary term left after moving `δ` across.
    pub pairing: f64,
}

/// Self-adjointness defect of `δ/δt` on the slice `y = t`.
pub fn adjoint_defect(
    pert: &Perturbation,
    phi: &Field<f64>,
    window: &AverageWindow,
    t: f64,
) -> Result<AdjointDefect> {
    let rule = window.rule()?;
    let xi_f = pert.xi_field();
    let u_f = pert.base_field();
    let mut pointwise_max = 0.0f64;
    for &x in &rule.nodes {
        let gap = forward_operator(&pert.base, phi, x, t)? - adjoint_operator(&pert.base, phi, x, t)?;
        if !gap.is_finite() {
            return Err(Error::NonFinite(format!("operator defect at x = {x}")));
        }
        pointwise_max = pointwise_max.max(gap.abs());
    }
    let pairing = rule.integrate(|x| {
        let xi = jet_at(&xi_f, x, t, 1)?;
        let u = jet_at(&u_f, x, t, 1)?;
        let p = jet_at(phi, x, t, 1)?;
        let delta_xi = d(&xi, 0, 1) * d(&u, 0, 0);
        let d_u_phi = d(&u, 0, 1) * d(&p, 0, 0) + d(&u, 0, 0) * d(&p, 0, 1);
        Ok(delta_xi * d(&p, 0, 0) + d(&xi, 0, 0) * d_u_phi)
    })?;
    Ok(AdjointDefect { pointwise_max, pairing })
}

/// `p(t) = 1/(2·vol B_t) ∫_{B_t} ξ² = (1/4L) ∫_{−L}^{L} ξ(x, t)² dx`.
pub fn average_power(pert: &Perturbation, window: &AverageWindow, t: f64) -> Result<f64> {
    let rule = window.rule()?;
    let integral = rule.integrate(|x| {
        let v = xi_eval(pert, x, t)?;
        Ok(v * v)
    })?;
    Ok(integral / (4.0 * window.half_width))
}

/// `ṗ(t) = (1/vol B_t) ∫_{B_t} (δξ/δt)·ξ = (1/2L) ∫_{−L}^{L} ξ_y·u·ξ dx`.
pub fn average_power_rate(pert: &Perturbation, window: &AverageWindow, t: f64) -> Result<f64> {
    let rule = window.rule()?;
    let xi_f = pert.xi_field();
    let integral = rule.integrate(|x| {
        let xi = jet_at(&xi_f, x, t, 1)?;
        Ok(d(&xi, 0, 1) * pert.base.value(x, t)? * d(&xi, 0, 0))
    })?;
    Ok(integral / (2.0 * window.half_width))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AverageStable,
    AverageUnstable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    #[serde(rename = "p")]
    pub p_samples: Vec<(f64, f64)>,
    #[serde(rename = "pdot")]
    pub pdot_samples: Vec<(f64, f64)>,
    /// Least-squares slope of `−log p(t)`.
    pub fitted_rate: f64,
    /// `1/ĉ`, infinite when there is no decay. Serialized as `"inf"` then.
    #[serde(serialize_with = "serialize_extended")]
    pub tau0: f64,
    /// `max ṗ/p` over the grid.
    pub literal_c0: f64,
    pub verdict: Verdict,
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("nan")
    }
}

impl StabilityReport {
    /// Assembles the report from sampled `p` and `ṗ`.
    pub fn from_samples(p_samples: Vec<(f64, f64)>, pdot_samples: Vec<(f64, f64)>, c_min: f64) -> Result<Self> {
        if p_samples.len() != pdot_samples.len() || p_samples.len() < 2 {
            return Err(Error::InvalidInput(
                "p and ṗ need the same grid with at least two points".into(),
            ));
        }
        if p_samples.iter().any(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(Error::NonFinite("p(t) sample".into()));
        }
        if p_samples.iter().any(|(_, p)| *p == 0.0) {
            return Ok(Self {
                p_samples,
                pdot_samples,
                fitted_rate: 0.0,
                tau0: f64::INFINITY,
                literal_c0: 0.0,
                verdict: Verdict::Indeterminate,
            });
        }
        let points: Vec<(f64, f64)> = p_samples.iter().map(|&(t, p)| (t, -p.ln())).collect();
        let fitted_rate = least_squares_slope(&points);
        let literal_c0 = p_samples
            .iter()
            .zip(&pdot_samples)
            .map(|((_, p), (_, pd))| pd / p)
            .fold(f64::NEG_INFINITY, f64::max);
        let stable = fitted_rate >= c_min;
        Ok(Self {
            p_samples,
            pdot_samples,
            fitted_rate,
            tau0: if stable { 1.0 / fitted_rate } else { f64::INFINITY },
            literal_c0,
            verdict: if stable { Verdict::AverageStable } else { Verdict::AverageUnstable },
        })
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for &(t, v) in points {
        num += (t - mean_t) * (v - mean_v);
        den += (t - mean_t) * (t - mean_t);
    }
    num / den
}

/// Samples `p` and `ṗ` over the window's grid and fits the decay rate.
pub fn stability_verdict(pert: &Perturbation, window: &AverageWindow, c_min: f64) -> Result<StabilityReport> {
    let mut p = Vec::with_capacity(window.t_grid.len());
    let mut pdot = Vec::with_capacity(window.t_grid.len());
    for &t in &window.t_grid {
        p.push((t, average_power(pert, window, t)?));
        pdot.push((t, average_power_rate(pert, window, t)?));
    }
    StabilityReport::from_samples(p, pdot, c_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundedness {
    Bounded,
    Unbounded,
}

/// Growth of `max_{|x| ≤ x_half_width} |ξ(x, y)|` along `y = 1, 2, 4, …, ≤ y_max`.
/// Unbounded when the sequence never decreases and ends above 10⁶ times its
/// first value.
pub fn boundedness_probe(pert: &Perturbation, y_max: f64, x_half_width: f64) -> Result<Boundedness> {
    if !(y_max >= 1.0) || !(x_half_width > 0.0) {
        return Err(Error::InvalidInput("need y_max ≥ 1 and a positive x range".into()));
    }
    const X_SAMPLES: usize = 33;
    let mut maxima = Vec::new();
    let mut y = 1.0;
    while y <= y_max {
        let mut m = 0.0f64;
        for k in 0..X_SAMPLES {
            let x = -x_half_width + 2.0 * x_half_width * k as f64 / (X_SAMPLES - 1) as f64;
            let v = xi_eval(pert, x, y)?;
            m = m.max(if v.is_finite() { v.abs() } else { f64::INFINITY });
        }
        maxima.push(m);
        y *= 2.0;
    }
    let first = maxima[0];
    let monotone = maxima.windows(2).all(|w| w[1] >= w[0]);
    let last = *maxima.last().expect("at least y = 1");
    if first > 0.0 && monotone && last > 1e6 * first {
        Ok(Boundedness::Unbounded)
    } else {
        Ok(Boundedness::Bounded)
    }
}
