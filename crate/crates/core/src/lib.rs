//! Verification toolkit for the n-d'Alembert equation `∂ⁿ log f / ∂x₁⋯∂xₙ = 0`.
//!
//! The crate evaluates residuals through truncated Taylor jets, integrates
//! the characteristic flow of the two-dimensional equation, computes the
//! average-stability functional of its perturbations, checks conservation
//! laws, tabulates integral bordism ranks and samples Brieskorn 7-spheres.
//!
//! The jet engine and the residual evaluators are generic over [`Scalar`],
//! which covers `f32`, `f64` and exact [`BigRational`] arithmetic. The
//! aliases below fix the common choices.

pub mod bordism;
pub mod characteristics;
pub mod conservation;
pub mod dalembert;
pub mod error;
pub mod exotic;
pub mod expr;
pub mod field;
pub mod jet;
pub mod quadrature;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use expr::Expr;
pub use field::{extract_derivative, jet_eval, jet_log, Field};
pub use jet::{jet_arith, Jet, JetOp, JetShape, MultiIndex};
pub use num_rational::BigRational;
pub use scalar::Scalar;

pub type Jet64 = Jet<f64>;
pub type Jet32 = Jet<f32>;
pub type ExactJet = Jet<BigRational>;

pub type Field64 = Field<f64>;
pub type ExactField = Field<BigRational>;
