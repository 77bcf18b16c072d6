use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type the numeric pipeline can run on.
///
/// `rustfft::FftNum` brings `num_traits::Signed` along with it, so `abs` and
/// `signum` are ambiguous on a bare `T`; call them as `Float::abs(x)`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FftNum + Sum + Default + Display + Debug + Serialize + DeserializeOwned
{
    /// Converts a literal. Every finite `f64` is representable (possibly rounded) in both impls.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
