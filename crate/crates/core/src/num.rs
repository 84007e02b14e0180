//! Scalar abstraction for the scoring arithmetic.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the severity formula can run on: f32 or f64.
pub trait ScoreFloat: Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts a weight constant. Constants are all small decimals, so this cannot fail.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }
}

impl ScoreFloat for f32 {}
impl ScoreFloat for f64 {}
