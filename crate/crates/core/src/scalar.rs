//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Accuracy targets quoted throughout the crate (1e-8 and tighter) assume
/// `f64`; `f32` instantiations work but saturate near `f32::EPSILON`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline(always)]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
