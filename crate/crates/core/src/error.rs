use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("field vanishes at {0:?}: point lies outside the regular locus u ≠ 0")]
    OutsideRegularLocus(Vec<f64>),

    #[error("jet shapes or base points do not match")]
    ShapeMismatch,

    #[error("division by a jet with zero constant term")]
    DivisionByZero,

    #[error("derivative of order {requested} requested from a jet of order {available}")]
    OrderOverflow { requested: usize, available: usize },

    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("jet with n = {n}, order {order} needs {size} coefficients, above the supported limit")]
    ShapeTooLarge { n: usize, order: usize, size: usize },

    #[error("{0} is not available for this scalar type")]
    Transcendental(&'static str),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{table} table has no entry for degree {degree}")]
    TableTooShort { table: &'static str, degree: usize },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("projection did not converge after {iterations} iterations (poly residual {poly:e}, sphere residual {sphere:e})")]
    NotConverged {
        iterations: usize,
        poly: f64,
        sphere: f64,
    },

    #[error("only {converged} of {requested} samples converged")]
    SamplingFailure { converged: usize, requested: usize },

    #[error("solution gate failed at point {index}: residual {residual:e} exceeds {tolerance:e}")]
    GateFailed {
        index: usize,
        residual: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
