//! Scalar abstraction for the numerical core.
//!
//! Kinematics, statics and the NLP solver are generic over [`Real`] so the
//! same code runs in `f32` or `f64`. Everything that touches files or the
//! simulator uses the `f64` aliases exported from the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point scalar used by the numerical core: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumCast + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lift an `f64` literal into this scalar type.
    #[inline]
    fn c(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Standard gravity, m/s^2.
#[inline]
pub fn gravity<R: Real>() -> R {
    R::c(9.81)
}
