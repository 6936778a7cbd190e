use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Coefficient type for jets and expression evaluation.
///
/// The field operations are always available. Transcendental functions are
/// optional: floating-point types provide them, exact rationals return `None`
/// so that polynomial and rational work can run in exact arithmetic.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64(value: f64) -> Option<Self>;

    fn from_i64(value: i64) -> Self;

    /// Lossy conversion used for tolerances and reporting.
    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    fn abs_value(&self) -> Self;

    fn try_exp(&self) -> Option<Self> {
        None
    }

    fn try_ln(&self) -> Option<Self> {
        None
    }

    fn try_sin(&self) -> Option<Self> {
        None
    }

    fn try_cos(&self) -> Option<Self> {
        None
    }

    fn try_powf(&self, _exponent: &Self) -> Option<Self> {
        None
    }

    fn is_positive(&self) -> bool {
        self.to_f64() > 0.0
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64(value: f64) -> Option<Self> {
                <$t as FromPrimitive>::from_f64(value)
            }

            fn from_i64(value: i64) -> Self {
                value as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_finite(&self) -> bool {
                Float::is_finite(*self)
            }

            fn abs_value(&self) -> Self {
                Float::abs(*self)
            }

            fn try_exp(&self) -> Option<Self> {
                Some(Float::exp(*self))
            }

            fn try_ln(&self) -> Option<Self> {
                Some(Float::ln(*self))
            }

            fn try_sin(&self) -> Option<Self> {
                Some(Float::sin(*self))
            }

            fn try_cos(&self) -> Option<Self> {
                Some(Float::cos(*self))
            }

            fn try_powf(&self, exponent: &Self) -> Option<Self> {
                Some(Float::powf(*self, *exponent))
            }

            fn is_positive(&self) -> bool {
                *self > 0.0
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_f64(value: f64) -> Option<Self> {
        Ratio::from_float(value)
    }

    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(BigInt::from(value))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn abs_value(&self) -> Self {
        Signed::abs(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}
