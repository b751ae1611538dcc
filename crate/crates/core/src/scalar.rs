//! The floating-point scalar the numerical core is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Binary floating point: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// An absolute tolerance stated for `f64`, widened to a few ulps when the
    /// scalar type cannot resolve it.
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(16.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of scalars.
pub fn compensated_sum<T: Scalar>(iter: impl IntoIterator<Item = T>) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().total()
}
