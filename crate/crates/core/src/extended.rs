//! Reals extended by a single `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::scalar::Scalar;

/// A finite real or `+∞`. Divergences and bound functions take values here.
///
/// `-∞` and NaN are not representable; every finite value orders below
/// `Infinite`, and `Infinite` absorbs addition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> ExtendedReal<T> {
    pub const INFINITY: Self = ExtendedReal::Infinite;

    pub fn zero() -> Self {
        ExtendedReal::Finite(T::zero())
    }

    /// Maps a float into the extended reals; `+inf` becomes [`ExtendedReal::Infinite`].
    ///
    /// Returns `None` for NaN and `-inf`.
    pub fn new(x: T) -> Option<Self> {
        if x.is_nan() || x == T::neg_infinity() {
            None
        } else if x == T::infinity() {
            Some(ExtendedReal::Infinite)
        } else {
            // normalizes -0.0
            Some(ExtendedReal::Finite(x + T::zero()))
        }
    }

    /// Like [`ExtendedReal::new`] for values known to be NaN-free.
    ///
    /// # Panics
    /// On NaN or `-inf`.
    pub fn from_float(x: T) -> Self {
        Self::new(x).unwrap_or_else(|| panic!("{x} has no extended-real representation"))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<T> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    /// The value as a float, with `+∞` mapped to `T::infinity()`.
    pub fn to_float(self) -> T {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::Infinite => T::infinity(),
        }
    }

    /// Multiplication by a nonnegative weight, with `0 · ∞ = 0`.
    pub fn scale(self, w: T) -> Self {
        debug_assert!(w >= T::zero());
        match self {
            _ if w == T::zero() => Self::zero(),
            ExtendedReal::Finite(x) => Self::from_float(x * w),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn cast<U: Scalar>(self) -> ExtendedReal<U> {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(U::lit(x.as_f64())),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }
}

impl<T: Scalar> From<T> for ExtendedReal<T> {
    fn from(x: T) -> Self {
        Self::from_float(x)
    }
}

impl<T: Scalar> PartialOrd for ExtendedReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => Some(Ordering::Less),
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl<T: Scalar> Add for ExtendedReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Self::from_float(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl<T: Scalar> PartialEq<T> for ExtendedReal<T> {
    fn eq(&self, other: &T) -> bool {
        *self == Self::from_float(*other)
    }
}

impl<T: Scalar> PartialOrd<T> for ExtendedReal<T> {
    fn partial_cmp(&self, other: &T) -> Option<Ordering> {
        self.partial_cmp(&Self::new(*other)?)
    }
}

impl<T: Scalar> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => fmt::Display::fmt(x, f),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseExtendedRealError(pub String);

impl fmt::Display for ParseExtendedRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected a number or \"inf\", got {:?}", self.0)
    }
}

impl std::error::Error for ParseExtendedRealError {}

/// Accepts decimal numbers and the token `inf` (case-insensitive, optional
/// leading `+`). NaN and `-inf` are rejected.
impl<T: Scalar> FromStr for ExtendedReal<T> {
    type Err = ParseExtendedRealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseExtendedRealError(s.to_string());
        let t = s.trim();
        let body = t.strip_prefix('+').unwrap_or(t);
        if body.eq_ignore_ascii_case("inf") || body.eq_ignore_ascii_case("infinity") {
            return Ok(ExtendedReal::Infinite);
        }
        if !body.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '-') {
            return Err(err());
        }
        let x: f64 = t.parse().map_err(|_| err())?;
        if !x.is_finite() {
            return Err(err());
        }
        Ok(ExtendedReal::Finite(T::lit(x)))
    }
}

impl<T: Scalar> Serialize for ExtendedReal<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => serializer.serialize_f64(x.as_f64()),
            ExtendedReal::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ExtendedReal<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtVisitor<T>(std::marker::PhantomData<T>);

        impl<T: Scalar> Visitor<'_> for ExtVisitor<T> {
            type Value = ExtendedReal<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                if v.is_finite() {
                    Ok(ExtendedReal::Finite(T::lit(v)))
                } else {
                    Err(E::custom(format!("non-finite number {v}")))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtVisitor(std::marker::PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type X = ExtendedReal<f64>;

    #[test]
    fn infinity_dominates_order_and_addition() {
        assert!(X::Finite(1e300) < X::Infinite);
        assert_eq!(X::Finite(1.0) + X::Infinite, X::Infinite);
        assert_eq!(X::Finite(1.0) + X::Finite(2.0), X::Finite(3.0));
        assert_eq!(X::Infinite.scale(0.0), X::zero());
        assert_eq!(X::Infinite.scale(0.5), X::Infinite);
    }

    #[test]
    fn rejects_nan_and_negative_infinity() {
        assert!(X::new(f64::NAN).is_none());
        assert!(X::new(f64::NEG_INFINITY).is_none());
        assert_eq!(X::new(f64::INFINITY), Some(X::Infinite));
        assert!("nan".parse::<X>().is_err());
        assert!("-inf".parse::<X>().is_err());
        assert!("1e400".parse::<X>().is_err());
        assert!("abc".parse::<X>().is_err());
    }

    #[test]
    fn text_and_json_forms() {
        assert_eq!("inf".parse::<X>().unwrap(), X::Infinite);
        assert_eq!("INF".parse::<X>().unwrap(), X::Infinite);
        assert_eq!("0.25".parse::<X>().unwrap(), X::Finite(0.25));
        assert_eq!(X::Infinite.to_string(), "inf");
        assert_eq!(serde_json::to_string(&X::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<X>("\"inf\"").unwrap(), X::Infinite);
        assert_eq!(serde_json::from_str::<X>("2").unwrap(), X::Finite(2.0));
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(X::from_float(-0.0).to_string(), "0");
    }
}
