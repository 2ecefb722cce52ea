//! Multi-scale reversible chaos game representation (MS-RCGR).
//!
//! Sequences over DNA or protein alphabets are encoded as planar trajectories
//! by an iterative midpoint process over exact rational corner points, at
//! several k-mer scales. The exact trajectory decodes back to the original
//! sequence without loss. A fixed 24-dimensional geometric descriptor is
//! extracted per sequence and fed, alone or fused with other feature blocks,
//! to an l2-regularised multinomial logistic regression.
//!
//! The geometric core is generic over the scalar type through [`CgrScalar`]:
//! the [`Rational`] instantiation gives exact, decodable trajectories, the
//! `f64` instantiation is a fast path used only for feature extraction.

pub mod alphabet;
pub mod cgr;
pub mod classify;
pub mod dataset;
pub mod error;
pub mod features;
pub mod io;
pub mod rational;
pub mod scalar;

pub use alphabet::{Alphabet, BaseAlphabet, CornerTable, DEFAULT_ALPHABET_LIMIT};
pub use cgr::{ScalarCorners, Trajectory};
pub use error::{Error, Result};
pub use rational::{Point2, Rational};
pub use scalar::CgrScalar;

/// Exact point on the q-grid; the coordinate type of decodable trajectories.
pub type ExactPoint = Point2<Rational>;
/// Double-precision point; the coordinate type of the feature fast path.
pub type FloatPoint = Point2<f64>;
/// Exact trajectory, losslessly decodable.
pub type ExactTrajectory = Trajectory<Rational>;
/// Fixed-precision trajectory, for feature extraction only.
pub type FloatTrajectory = Trajectory<f64>;

/// Version string embedded in every file artifact this crate writes.
pub const FORMAT_VERSION: &str = "mscgr-1";
