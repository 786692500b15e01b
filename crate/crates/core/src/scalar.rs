//! Scalar abstraction shared by every solver.
//!
//! All numerical code is written against [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances in this crate are stated for `f64`; with `f32`
//! the algorithms run unchanged but the tighter thresholds are not attainable.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A quotient that may be reported as infinite when its denominator is
/// negligible relative to the numerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quotient<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Quotient<T> {
    /// `num / den`, or `Infinite` when `den < 1e-12 * (1 + num)`.
    pub fn guarded(num: T, den: T) -> Self {
        if den < T::lit(1e-12) * (T::one() + num) {
            Quotient::Infinite
        } else {
            Quotient::Finite(num / den)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Quotient::Infinite)
    }

    /// Projects onto `[lo, hi]`; `Infinite` maps to `hi`.
    pub fn clamp(self, lo: T, hi: T) -> T {
        match self {
            Quotient::Finite(q) => q.max(lo).min(hi),
            Quotient::Infinite => hi,
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Quotient::Finite(q) => Some(q),
            Quotient::Infinite => None,
        }
    }
}
