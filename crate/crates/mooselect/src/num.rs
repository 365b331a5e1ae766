//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Scalar`].

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Display + Debug + Send + Sync + 'static
{
    /// Natural log of the gamma function, used for `log(y!) = ln_gamma(y + 1)`.
    fn ln_gamma(self) -> Self;
}

impl Scalar for f64 {
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Scalar for f32 {
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

/// Convert an `f64` constant into the working scalar type.
///
/// Panics only if the constant is not representable, which cannot happen for
/// the fixed literals this crate converts.
pub(crate) fn real<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in scalar type")
}

/// Convert a count into the working scalar type.
pub(crate) fn count<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("count representable in scalar type")
}
