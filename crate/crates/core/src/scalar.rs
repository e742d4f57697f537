//! Real scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Complex entries are `num_complex::Complex<T>`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as the real part of matrix entries.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Default `(rank_tol, eig_tol, sim_tol)` for this precision.
    fn default_tolerances() -> (Self, Self, Self);

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tolerances() -> (Self, Self, Self) {
        (1e-10, 1e-9, 1e-12)
    }
}

impl Real for f32 {
    fn default_tolerances() -> (Self, Self, Self) {
        (1e-4, 1e-4, 1e-5)
    }
}

/// Shorthand for a complex number built from two reals.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
