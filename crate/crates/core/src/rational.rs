//! Exact rational helpers backing the step-CDF and welfare arithmetic.
//!
//! Every finite `f64` is a dyadic rational, so conversion into
//! [`BigRational`] is exact. This lets welfare values computed from float
//! supports with rational probability weights stay exact end to end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational value of a finite float.
///
/// Returns `None` for NaN or infinities.
pub fn exact(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Nearest `f64` to a rational.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rational from an integer pair, e.g. `ratio(35, 36)`.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Formats `r` as `numer/denom` over the given denominator when `r * denom`
/// is an integer, e.g. `56/36` instead of the reduced `14/9`.
///
/// Returns `None` when the value cannot be written over `denom`.
pub fn over_denominator(r: &BigRational, denom: i64) -> Option<String> {
    let scaled = r * BigRational::from_integer(BigInt::from(denom));
    if scaled.is_integer() {
        Some(format!("{}/{}", scaled.to_integer(), denom))
    } else {
        None
    }
}

/// `true` when `r` equals the integer pair `numer/denom`.
pub fn eq_ratio(r: &BigRational, numer: i64, denom: i64) -> bool {
    *r == ratio(numer, denom)
}

/// Absolute difference between a rational and a float, as `f64`.
pub fn abs_diff_f64(r: &BigRational, x: f64) -> f64 {
    match exact(x) {
        Some(xr) => to_f64(&(r - xr).abs()),
        None => f64::INFINITY,
    }
}

/// `true` when the rational is zero.
pub fn is_zero(r: &BigRational) -> bool {
    r.is_zero()
}
