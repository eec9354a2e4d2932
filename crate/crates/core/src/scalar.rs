//! Scalar abstraction shared by the geometric model, the forest and the
//! evaluation harness.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point coordinate / feature type. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Number type an evaluation score can be expressed in. Covers the floats and
/// exact rationals, so counts-based metrics can be checked without rounding.
pub trait Fraction: Num + Copy + PartialOrd + Debug {
    fn from_count(n: u64) -> Self;
    fn approx(self) -> f64;
}

impl Fraction for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
    fn approx(self) -> f64 {
        self
    }
}

impl Fraction for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }
    fn approx(self) -> f64 {
        self as f64
    }
}

impl Fraction for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count fits in i64"))
    }
    fn approx(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
