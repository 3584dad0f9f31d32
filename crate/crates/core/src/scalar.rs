//! Value types for functions, towers and witnesses.
//!
//! Certified computations run over [`BigRational`], where every comparison is
//! exact. The same code also runs over `f64`/`f32` (comparisons then use a
//! small absolute tolerance) and over `Ratio<i64>` for speed on small inputs.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// True when arithmetic and comparison are exact.
    const EXACT: bool;

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;

    /// Exact rational value of `self` (for floats, of the binary value).
    fn to_rational(&self) -> BigRational;

    fn tolerance() -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(&BigInt::from(n), &BigInt::from(1))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    /// `self <= other` up to tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tolerance()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        let n = num.to_i64().expect("numerator exceeds i64");
        let d = den.to_i64().expect("denominator exceeds i64");
        Ratio::new(n, d)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
    fn tolerance() -> Self {
        Ratio::zero()
    }
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    BigRational::new(num.clone(), den.clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        ratio_to_f64(num, den)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite float")
    }
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        ratio_to_f64(num, den) as f32
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite float")
    }
    fn tolerance() -> Self {
        1e-5
    }
}

/// `num/den` for machine integers.
pub fn ratio<S: Scalar>(num: i64, den: i64) -> S {
    S::from_ratio(&BigInt::from(num), &BigInt::from(den))
}

pub fn from_u64<S: Scalar>(n: u64) -> S {
    S::from_ratio(&BigInt::from_u64(n).unwrap(), &BigInt::from(1))
}
