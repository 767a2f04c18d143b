//! Floating point abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar the simulation and the network are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless for every literal used in this crate; panics only if `T` cannot hold a finite f64.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("scalar conversion from f64")
    }

    #[inline]
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("scalar conversion from usize")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
