//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! Expression evaluation is written once against [`Scalar`] and runs over
//! exact rationals (guards, rate instantiation) as well as `f32`/`f64`.
//! Numerical analyses are written against [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// A commutative ring that can absorb exact rational literals.
pub trait Scalar:
    Clone
    + Debug
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r) as f32
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
}

/// Floating-point type used by the numerical analyses (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + Scalar + Sum + Display + Debug + Send + Sync + 'static
{
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    // `BigRational::to_f64` rounds correctly for the magnitudes we use.
    r.to_f64().unwrap_or_else(|| {
        if r.is_zero() {
            0.0
        } else if r > &Rational::zero() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rational(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Exact rational from a small integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exact integer value of a rational, if it has one that fits in `i64`.
pub fn to_i64_exact(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
