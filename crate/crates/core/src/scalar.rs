//! Scalar abstractions shared by the reference models.
//!
//! The reference evaluators in [`crate::oracle`] and the symbolic feedback
//! expansion in [`crate::filter`] are written once over [`Scalar`] and run
//! in `f32`, `f64` or exact rational arithmetic. Trigonometric references
//! additionally need [`RealScalar`], which only the float types provide.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// A field-like number type the reference models can compute in.
pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd {
    /// Converts a binary fixed-point value `raw / 2^fraction_bits` exactly
    /// (exact for rationals; correctly rounded for floats).
    fn from_fixed(raw: i64, fraction_bits: u8) -> Self;

    /// Nearest `f64`, used for reporting.
    fn to_f64_lossy(&self) -> f64;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_fixed(raw: i64, fraction_bits: u8) -> Self {
                (raw as f64 / (1u64 << fraction_bits) as f64) as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_fixed(raw: i64, fraction_bits: u8) -> Self {
        BigRational::new(BigInt::from(raw), BigInt::from(1u64) << fraction_bits as usize)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Real scalars with transcendental functions, for the DFT/DCT references.
pub trait RealScalar: Scalar + Float + FloatConst + FromPrimitive {}

impl<T> RealScalar for T where T: Scalar + Float + FloatConst + FromPrimitive {}

/// Converts a small integer into any [`RealScalar`].
pub(crate) fn real<T: RealScalar>(v: f64) -> T {
    T::from_f64(v).expect("finite constant")
}
