//! The scalar abstraction shared by the double and double-double engines.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::DoubleDouble;

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit roundoff of the arithmetic.
    const EPSILON: f64;
    /// Relative step below which an iteration counts as stagnant.
    const STEP_TOL: f64;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// x^e for x ≥ 0.
    fn powf(self, e: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn is_zero(self) -> bool {
        self.to_f64() == 0.0
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
    const STEP_TOL: f64 = 1e-15;
    const NAME: &'static str = "double";

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = DoubleDouble::EPSILON;
    const STEP_TOL: f64 = 1e-30;
    const NAME: &'static str = "double-double";

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn powf(self, e: f64) -> Self {
        DoubleDouble::powf(self, e)
    }
}
