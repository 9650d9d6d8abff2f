//! Time values.
//!
//! Everything that carries a duration or a timestamp is generic over
//! [`Scalar`]. Exact rationals are the default (see [`crate::Rational`]);
//! floating point is supported for experimentation but cannot decide strict
//! separations exactly.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// A number usable as a time value.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `numer / denom`. `denom` must be non-zero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Parses a literal of the form `3`, `-2`, `2.5` or `5/2`.
    fn parse_literal(text: &str) -> Option<Self>;

    /// Lossy conversion used for reporting.
    fn to_f64(&self) -> f64;

    fn from_i64(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }
}

/// Splits a literal into an integer numerator and denominator.
fn literal_parts(text: &str) -> Option<(i128, i128)> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some((n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: i128 = match int {
            "" | "-" | "+" => 0,
            s => s.parse().ok()?,
        };
        let scale = 10i128.checked_pow(frac.len() as u32)?;
        let frac_part: i128 = frac.parse().ok()?;
        let magnitude = int_part.abs().checked_mul(scale)?.checked_add(frac_part)?;
        return Some((if negative { -magnitude } else { magnitude }, scale));
    }
    Some((text.parse().ok()?, 1))
}

macro_rules! impl_ratio_scalar {
    ($($int:ty),*) => {
        $(
            impl Scalar for Ratio<$int> {
                fn from_ratio(numer: i64, denom: i64) -> Self {
                    Ratio::new(numer as $int, denom as $int)
                }

                fn parse_literal(text: &str) -> Option<Self> {
                    let (n, d) = literal_parts(text)?;
                    let r = Ratio::new(n, d);
                    Some(Ratio::new(
                        <$int>::try_from(*r.numer()).ok()?,
                        <$int>::try_from(*r.denom()).ok()?,
                    ))
                }

                fn to_f64(&self) -> f64 {
                    *self.numer() as f64 / *self.denom() as f64
                }
            }
        )*
    };
}

impl_ratio_scalar!(i64, i128);

macro_rules! impl_float_scalar {
    ($($float:ty),*) => {
        $(
            impl Scalar for $float {
                fn from_ratio(numer: i64, denom: i64) -> Self {
                    numer as $float / denom as $float
                }

                fn parse_literal(text: &str) -> Option<Self> {
                    let (n, d) = literal_parts(text)?;
                    Some(n as $float / d as $float)
                }

                fn to_f64(&self) -> f64 {
                    *self as f64
                }
            }
        )*
    };
}

impl_float_scalar!(f32, f64);
