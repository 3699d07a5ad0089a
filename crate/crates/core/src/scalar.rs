//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! [`Scalar`] covers ordered fields: `f32`, `f64` and the exact
//! [`BigRational`]. Routines that only need field arithmetic and comparisons
//! (inclusion–exclusion, the simplex solver, Carathéodory decompositions,
//! bound formulas) are generic over it, so they can run in exact arithmetic.
//! [`Real`] adds the transcendental functions of [`Float`] and is only
//! implemented by the machine floats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field element usable by the exact-capable algorithms.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Threshold below which a quantity is treated as zero by pivoting and
    /// feasibility tests. Zero for exact types.
    fn tolerance() -> Self;

    /// `true` when arithmetic is exact (no rounding).
    fn is_exact() -> bool {
        false
    }

    /// Lossless for the floats, exact binary expansion for rationals.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite value")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in the scalar type")
    }

    /// `2^-k`, computed by repeated halving so it is exact for every type
    /// that can represent it.
    fn pow2_neg(k: u32) -> Self {
        let half = Self::half();
        let mut out = Self::one();
        for _ in 0..k {
            out = out * half.clone();
        }
        out
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// A machine floating-point scalar.
pub trait Real: Scalar + Float + Copy {}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
    fn pow2_neg(k: u32) -> Self {
        (2.0f64).powi(-(k as i32))
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
    fn pow2_neg(k: u32) -> Self {
        (2.0f32).powi(-(k as i32))
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn is_exact() -> bool {
        true
    }

    fn pow2_neg(k: u32) -> Self {
        BigRational::new(BigInt::from(1), BigInt::from(1) << k as usize)
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Convenience constructor for rational literals in tests and examples.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
