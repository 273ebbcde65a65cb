//! Numeric backends for exact and floating-point counting.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arithmetic needed by the counting routines.
///
/// `f64` sums with Neumaier compensation; `BigRational` is exact.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// Largest permanent dimension the backend accepts.
    const PERMANENT_LIMIT: usize;

    fn from_u64(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self;

    fn factorial(n: u64) -> Self {
        (1..=n).fold(Self::one(), |acc, k| acc * Self::from_u64(k))
    }
}

impl Scalar for f64 {
    const PERMANENT_LIMIT: usize = 30;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

impl Scalar for BigRational {
    const PERMANENT_LIMIT: usize = 24;

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(BigRational::zero(), |acc, x| acc + x)
    }
}

/// Compensated summation (Kahan–Babuška–Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Exact conversion of a finite float to a rational.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}
