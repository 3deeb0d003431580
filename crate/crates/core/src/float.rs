//! Scalar abstraction the numeric core is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed};

/// Floating-point scalar type of the physics core.
///
/// Implemented for `f32` and `f64` through the blanket impl below. Every
/// tolerance quoted in the test suite assumes `f64`; the crate-root aliases
/// pin that choice for downstream code, and `f32` remains available for
/// rough, memory-light runs.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Signed
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`, panicking only for values a
    /// float type cannot hold at all (never for ordinary finite literals).
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 literal")
    }

    /// Nearest `f64`, for diagnostics that are not generic (error messages).
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Signed
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Terse typed-literal helper used throughout the crate.
pub(crate) fn of<T: Real>(x: f64) -> T {
    T::of(x)
}
