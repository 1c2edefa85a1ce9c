//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Floating-point type the model and privacy formulas are generic over.
///
/// Implemented for `f32` and `f64`. Sampling and the experiment harness run in
/// `f64`; everything else accepts either.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this type.
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("finite literal fits the scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(e^a + e^b)` without overflow; `-inf` inputs are handled.
#[inline]
pub fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Natural log that maps an exact zero to `-inf`.
#[inline]
pub(crate) fn ln<T: Scalar>(v: T) -> T {
    if v <= T::zero() {
        T::neg_infinity()
    } else {
        v.ln()
    }
}
