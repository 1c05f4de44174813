//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point scalar so the same code runs in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// The bounds are the union of what the linear algebra, RNG plumbing and
/// error reporting need; `f32` and `f64` satisfy all of them.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + ScalarOperand
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for turning configuration values and
    /// sampled doubles into the working precision.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from(x).expect("finite f64 converts to any supported scalar")
    }

    /// Conversion to `f64` for reporting and diagnostics.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
