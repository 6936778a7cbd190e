//! Characteristic strips of the two-dimensional equation `u·u_xy − u_x·u_y = 0`,
//! their sub-equations, and the characteristic flow on the closed-form
//! solution family `u = (β/2·y² + α·y + 1)·h(x)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::Field;
use crate::jet::{Jet, MultiIndex};
use crate::scalar::Scalar;

/// States with any component above this magnitude end the integration.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StripId {
    Zeta1,
    Zeta2,
}

impl StripId {
    pub fn swapped(self) -> Self {
        match self {
            StripId::Zeta1 => StripId::Zeta2,
            StripId::Zeta2 => StripId::Zeta1,
        }
    }
}

/// A point of the second-order jet space over `ℝ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint2<T = f64> {
    pub x: T,
    pub y: T,
    pub u: T,
    pub u_x: T,
    pub u_y: T,
    pub u_xx: T,
    pub u_xy: T,
    pub u_yy: T,
}

impl<T: Scalar> JetPoint2<T> {
    /// Coordinates in the order `(x, y, u, u_x, u_y, u_xx, u_xy, u_yy)`.
    pub fn from_array(c: [T; 8]) -> Self {
        let [x, y, u, u_x, u_y, u_xx, u_xy, u_yy] = c;
        Self { x, y, u, u_x, u_y, u_xx, u_xy, u_yy }
    }

    pub fn to_array(&self) -> [T; 8] {
        [
            self.x.clone(),
            self.y.clone(),
            self.u.clone(),
            self.u_x.clone(),
            self.u_y.clone(),
            self.u_xx.clone(),
            self.u_xy.clone(),
            self.u_yy.clone(),
        ]
    }

    /// Reads the point off a jet of order ≥ 2 over `ℝ²`.
    pub fn from_jet(j: &Jet<T>) -> Result<Self> {
        if j.n() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: j.n() });
        }
        let d = |a, b| j.derivative(&MultiIndex::new(vec![a, b]).expect("two variables"));
        Ok(Self {
            x: j.base_point()[0].clone(),
            y: j.base_point()[1].clone(),
            u: d(0, 0)?,
            u_x: d(1, 0)?,
            u_y: d(0, 1)?,
            u_xx: d(2, 0)?,
            u_xy: d(1, 1)?,
            u_yy: d(0, 2)?,
        })
    }

    /// The image under `x ↔ y`.
    pub fn swap_xy(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            u: self.u.clone(),
            u_x: self.u_y.clone(),
            u_y: self.u_x.clone(),
            u_xx: self.u_yy.clone(),
            u_xy: self.u_xy.clone(),
            u_yy: self.u_xx.clone(),
        }
    }
}

/// The strip field at `p`, components ordered as in [`JetPoint2::to_array`].
///
/// `ζ₁ = u(∂y + u_y∂u + u_xy∂u_x + u_yy∂u_y) + u_xx·u_y∂u_xx + u_yy·u_x∂u_xy`,
/// and `ζ₂` is its image under `x ↔ y`.
pub fn strip_vector<T: Scalar>(strip: StripId, p: &JetPoint2<T>) -> [T; 8] {
    let z = T::zero;
    let u = p.u.clone();
    match strip {
        StripId::Zeta1 => [
            z(),
            u.clone(),
            u.clone() * p.u_y.clone(),
            u.clone() * p.u_xy.clone(),
            u * p.u_yy.clone(),
            p.u_xx.clone() * p.u_y.clone(),
            p.u_yy.clone() * p.u_x.clone(),
            z(),
        ],
        StripId::Zeta2 => [
            u.clone(),
            z(),
            u.clone() * p.u_x.clone(),
            u.clone() * p.u_xx.clone(),
            u * p.u_xy.clone(),
            z(),
            p.u_xx.clone() * p.u_y.clone(),
            p.u_yy.clone() * p.u_x.clone(),
        ],
    }
}

/// Residuals of the sub-equation `i`: `(u_xx, u·u_xy − u_x·u_y)` for `i = 1`
/// and `(u_yy, u·u_xy − u_x·u_y)` for `i = 2`.
pub fn subequation_residuals<T: Scalar>(i: u8, p: &JetPoint2<T>) -> Result<(T, T)> {
    let second = p.u.clone() * p.u_xy.clone() - p.u_x.clone() * p.u_y.clone();
    match i {
        1 => Ok((p.u_xx.clone(), second)),
        2 => Ok((p.u_yy.clone(), second)),
        _ => Err(Error::InvalidInput(format!("sub-equation index must be 1 or 2, got {i}"))),
    }
}

/// `u(x, y) = (β/2·y² + α·y + 1)·h(x)` with `h` an expression in `Var(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    pub alpha: f64,
    pub beta: f64,
    pub h: Expr,
}

impl ClosedFormSolution {
    pub fn new(alpha: f64, beta: f64, h: Expr) -> Result<Self> {
        if h.arity() > 1 {
            return Err(Error::InvalidInput("h must depend on x only".into()));
        }
        Ok(Self { alpha, beta, h })
    }

    /// Parses `h` in the variable `x`.
    pub fn parse(alpha: f64, beta: f64, h: &str) -> Result<Self> {
        Self::new(alpha, beta, Expr::parse(h, &["x"])?)
    }

    /// The solution as an expression in `(x, y)`.
    pub fn expr(&self) -> Expr {
        let y = Expr::var(1);
        let quad = Expr::add(
            Expr::add(
                Expr::mul(
                    Expr::constant(self.beta / 2.0),
                    Expr::pow(y.clone(), Expr::constant(2.0)),
                ),
                Expr::mul(Expr::constant(self.alpha), y),
            ),
            Expr::constant(1.0),
        );
        let h = self.h.substitute(&[Expr::var(0)]).expect("h has arity ≤ 1");
        Expr::mul(quad, h)
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        let h = self.h.eval(&[x])?;
        Ok((0.5 * self.beta * y * y + self.alpha * y + 1.0) * h)
    }

    pub fn h_value(&self, x: f64) -> Result<f64> {
        self.h.eval(&[x])
    }
}

/// The closed-form solution as a field on `ℝ²`.
pub fn closed_form_field(sol: &ClosedFormSolution) -> Field<f64> {
    Field::Expression { expr: sol.expr(), n: 2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<FlowSample>,
    /// Set when the state left the finite range and integration stopped early.
    pub blow_up: bool,
}

impl Trajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectory has the initial sample")
    }

    /// `max_t |u(t) − u_closed(x(t), y(t))|`.
    pub fn u_consistency(&self, sol: &ClosedFormSolution) -> Result<f64> {
        let mut worst = 0.0f64;
        for s in &self.samples {
            worst = worst.max((s.u - sol.value(s.x, s.y)?).abs());
        }
        Ok(worst)
    }
}

/// Integrates `ẋ = 0, ẏ = u, u̇ = u·u_y` with classic fixed-step RK4, starting
/// on the graph of `sol` at `(x0, y0)`. The coupling `u_y` is read from the
/// closed form along the trajectory.
pub fn integrate_characteristic_flow(
    sol: &ClosedFormSolution,
    x0: f64,
    y0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be non-negative, got {t_end}")));
    }
    let h0 = sol.h_value(x0)?;
    // ∂y u = (β·y + α)·h(x); x stays at x0.
    let u_y = |y: f64| (sol.beta * y + sol.alpha) * h0;
    let rhs = |s: [f64; 3]| [0.0, s[2], s[2] * u_y(s[1])];

    let u0 = sol.value(x0, y0)?;
    let mut state = [x0, y0, u0];
    let mut t = 0.0;
    let mut samples = vec![FlowSample { t, x: x0, y: y0, u: u0 }];
    let steps = (t_end / dt).ceil() as usize;
    for k in 0..steps {
        let h = if k + 1 == steps { t_end - t } else { dt };
        if h <= 0.0 {
            break;
        }
        let k1 = rhs(state);
        let k2 = rhs(axpy(state, 0.5 * h, k1));
        let k3 = rhs(axpy(state, 0.5 * h, k2));
        let k4 = rhs(axpy(state, h, k3));
        let mut next = state;
        for i in 0..3 {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        // ẋ = 0 holds exactly.
        next[0] = x0;
        if next.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP_THRESHOLD) {
            return Ok(Trajectory { samples, blow_up: true });
        }
        state = next;
        t = if k + 1 == steps { t_end } else { t + h };
        samples.push(FlowSample { t, x: state[0], y: state[1], u: state[2] });
    }
    Ok(Trajectory { samples, blow_up: false })
}

fn axpy(s: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]]
}
