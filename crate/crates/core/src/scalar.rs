//! Scalar abstraction: the one trait bound the rest of the crate builds on.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real floating-point scalar underlying all matrices and rates.
///
/// Implemented for `f32` and `f64`. The stated numerical tolerances
/// (eigensolver residuals, oracle agreement, trace drift) are calibrated for
/// `f64`; `f32` works but scales them by its epsilon.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar.
///
/// Panics only if the target type cannot represent any finite value of the
/// argument, which cannot happen for the two provided implementations.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal convertible to scalar")
}

/// Complex literal helper.
#[inline]
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

/// Complex zero.
#[inline]
pub fn c_zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
#[inline]
pub fn c_one<T: Scalar>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// The imaginary unit.
#[inline]
pub fn c_i<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Real value promoted to complex.
#[inline]
pub fn c_re<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_roundtrips() {
        let x: f64 = real::<f64>(0.25);
        assert_eq!(x, 0.25);
        let y: f32 = real::<f32>(0.25);
        assert_eq!(y, 0.25f32);
    }

    #[test]
    fn complex_helpers() {
        let i = c_i::<f64>();
        assert_eq!(i * i, cplx(-1.0, 0.0));
        assert_eq!(c_one::<f64>() + c_zero::<f64>(), c_one::<f64>());
    }
}
