//! Scalar abstraction over trajectory coordinates.
//!
//! The encoder only ever needs a zero, a midpoint, and a way to import the
//! rational corner coordinates, so it is written once against this trait and
//! instantiated with [`Rational`] (exact, decodable) or `f64` (feature fast
//! path).

use num::rational::Ratio;
use num::traits::ToPrimitive;
use num::BigInt;

use crate::rational::Rational;

pub trait CgrScalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn midpoint(a: &Self, b: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
}

impl CgrScalar for Rational {
    fn zero() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        (a + b) / Ratio::from_integer(BigInt::from(2))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("rational out of f64 range")
    }
}

impl CgrScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        0.5 * (a + b)
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).expect("rational out of f64 range")
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}
