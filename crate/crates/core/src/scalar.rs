//! Numeric tower shared by the polynomial machinery: operations are
//! generic over either IEEE doubles or exact arbitrary-precision
//! rationals, so identity checks can demand literal equality.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational};
use num_traits::{One, Zero};

pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    fn factorial(n: u64) -> Self {
        let mut acc = Self::one();
        for k in 2..=n {
            acc = acc * Self::from_i64(k as i64);
        }
        acc
    }

    fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Convenience constructor for rational test inputs.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
