//! Scalar traits.
//!
//! Group arithmetic only needs ring operations, so it is written against
//! [`Field`] and also runs on exact rationals. Everything that takes roots,
//! evaluates trigonometric functions or integrates needs [`Real`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Coordinates of group elements: anything with exact `+ - *` and an order.
pub trait Field:
    Copy + Num + Neg<Output = Self> + PartialOrd + Debug + ToPrimitive + Send + Sync + 'static
{
    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Absolute value through the order, for types without `Signed`.
    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    /// Lossy conversion used when comparing against floating tolerances.
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Field for T where
    T: Copy + Num + Neg<Output = T> + PartialOrd + Debug + ToPrimitive + Send + Sync + 'static
{
}

/// Floating point scalar (`f32` or `f64`).
pub trait Real: Field + Float + FloatConst + FromPrimitive + Display {
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }
}

impl<T> Real for T where T: Field + Float + FloatConst + FromPrimitive + Display {}

pub(crate) fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
