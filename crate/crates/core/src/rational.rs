//! Exact rational substrate: the q-grid modulus, tolerance-snapped grid
//! rounding, and 2-D points.
//!
//! Every corner and trajectory coordinate is a reduced [`Rational`]
//! (arbitrary-precision numerator, positive denominator, gcd 1 — maintained
//! by `num::BigRational` on every operation), so equality is exact and
//! decodability is decidable.

use num::rational::BigRational;
use num::BigInt;

use crate::error::{Error, Result};
use crate::scalar::CgrScalar;

/// Arbitrary-precision rational in canonical reduced form.
pub type Rational = BigRational;

/// Snap tolerance: trig values this close to an integer are treated as that
/// integer before flooring, so axis-aligned corners land exactly on the grid.
pub const EPS_SNAP: f64 = 1e-12;

/// Smallest power of two >= 4m. This is the grid modulus q for an alphabet
/// of size m: corner coordinates are multiples of 1/q.
pub fn grid_modulus(m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    Ok((4 * m as u64).next_power_of_two())
}

/// Project a real value onto the q-grid: floor(q * x) / q, after snapping
/// values within [`EPS_SNAP`] of an integer to that integer. Without the
/// snap, trig noise like cos(3*pi/2) = -1.8e-16 would floor to -1/q instead
/// of 0 and break corner symmetry.
pub fn snap_round_q(x: f64, q: u64) -> Result<Rational> {
    let nearest = x.round();
    let snapped = if (x - nearest).abs() < EPS_SNAP {
        nearest
    } else {
        x
    };
    if snapped.abs() > 1.0 {
        return Err(Error::OutOfRange { value: x });
    }
    let num = (snapped * q as f64).floor() as i64;
    Ok(Rational::new(BigInt::from(num), BigInt::from(q)))
}

/// 2-D point with coordinates in any [`CgrScalar`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: CgrScalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Point2 { x, y }
    }

    pub fn origin() -> Self {
        Point2 {
            x: S::zero(),
            y: S::zero(),
        }
    }

    pub fn midpoint(a: &Self, b: &Self) -> Self {
        Point2 {
            x: S::midpoint(&a.x, &b.x),
            y: S::midpoint(&a.y, &b.y),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Point2<Rational> {
    /// Exact coordinates rendered as "num/den" strings (lossless).
    pub fn to_fraction_strings(&self) -> [String; 2] {
        [
            format!("{}/{}", self.x.numer(), self.x.denom()),
            format!("{}/{}", self.y.numer(), self.y.denom()),
        ]
    }
}
