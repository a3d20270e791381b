//! Scalar abstractions for the closed-form formulas.
//!
//! The formulas are evaluated over any signed ring (`BigInt`, `i64`, `f64`, ...)
//! when only ring operations are needed, and over a [`Field`] when harmonic
//! numbers or means are involved. The exact instantiation is
//! [`crate::Rational`]; the float instantiations exist for quick rendering and
//! for sanity checks against the exact values.

use std::fmt::Debug;

use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed};

/// A signed ring that small non-negative integers embed into.
pub trait Ring: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug {
    /// Embeds a small integer.
    fn of(x: usize) -> Self {
        Self::from_usize(x).expect("integer does not fit the scalar type")
    }
}

impl<T> Ring for T where T: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug {}

/// A ring with true division.
pub trait Field: Ring {
    /// Equality for exact types, a relative tolerance for floats.
    fn agrees_with(&self, other: &Self) -> bool;

    fn to_f64_lossy(&self) -> f64;
}

impl Field for f64 {
    fn agrees_with(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-9 * scale
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn agrees_with(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-4 * scale
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Field for BigRational {
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }

    fn to_f64_lossy(&self) -> f64 {
        crate::exact::ratio_to_f64(self)
    }
}

impl Field for Ratio<i128> {
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }

    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
