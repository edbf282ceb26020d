//! Real scalar abstraction underlying all complex arithmetic in this crate.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Every matrix, state, and channel in this crate is generic over the real
/// type `T`, with entries of type `Complex<T>`. The crate root exports `f64`
/// aliases, which is what the CLI and all stated tolerances assume.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Convert an `f64` constant (tolerances, weights) into `T`.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Widen to `f64` for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the crate's scalar type.
pub type Cplx<T> = Complex<T>;

/// Zero complex value.
pub fn czero<T: Scalar>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

/// One (real unit) as a complex value.
pub fn cone<T: Scalar>() -> Cplx<T> {
    Complex::new(T::one(), T::zero())
}

/// Purely real complex value.
pub fn creal<T: Scalar>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// `re + i·im` from raw parts.
pub fn c<T: Scalar>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}
