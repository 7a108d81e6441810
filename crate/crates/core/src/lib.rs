//! Equidistribution of norm-one elements of quadratic fields.
//!
//! Every nonzero `α` of the ring of integers of `K = Q(√d)` gives the norm-one
//! element `π(α) = α/ᾱ`. Ordered by the norm or the height of `α`, the images
//! become equidistributed on the unit circle (imaginary `K`) or on the circle
//! `R / 2 log ε` (real `K`). This crate enumerates the points exactly and measures
//! the convergence with rigorous error bounds.

pub mod arith;
pub mod equidist;
pub mod error;
pub mod heights;
pub mod quadfield;
pub mod real;
pub mod selftest;
pub mod units;
pub mod visible;

pub use error::{Error, Result, Signature};
pub use quadfield::{make_context, FieldContext, OmegaShape, QuadInt, QuadIntOf};
pub use real::{RealApprox, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
pub use units::{fundamental_unit, UnitGroupInfo};
pub use visible::VisiblePoint;

/// Machine-integer element, for callers that know their coordinates are small.
pub type QuadInt64 = QuadIntOf<i64>;
