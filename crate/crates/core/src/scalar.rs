//! Scalar abstraction for the numeric core.
//!
//! Everything numerical is generic over [`Scalar`] so the same code runs in
//! f32 and f64. Disk formats store f32 by default; in-memory math promotes to
//! f64 (see the crate-root aliases).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign};

/// Floating-point scalar usable by every numeric routine in this crate.
pub trait Scalar:
    Float + NumAssign + Sum<Self> + for<'a> Sum<&'a Self> + Debug + Display + Default + 'static
{
    /// Lossy conversion from f64 (exact for f64, rounded for f32).
    fn from_f64(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("finite f64 converts to any float scalar")
    }

    /// Widening conversion to f64.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float scalar converts to f64")
    }

    /// Conversion from a count or index.
    fn from_usize(x: usize) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("usize converts to float scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(<f64 as Scalar>::from_f64(0.25), 0.25);
        assert_eq!(<f32 as Scalar>::from_f64(0.25), 0.25f32);
        assert_eq!(0.25f32.as_f64(), 0.25);
        assert_eq!(<f64 as Scalar>::from_usize(7), 7.0);
    }
}
