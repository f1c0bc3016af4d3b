//! Numeric scalar abstraction shared by the metric and aggregation code.
//!
//! Everything that divides counts (precision, recall, F1, acceptance rates,
//! complexity means) is written against [`Scalar`] so it can be evaluated in
//! `f32`, `f64`, or exactly in rational arithmetic.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// A number type the harness can compute ratios and means in.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// Lossless (for the rational impls) or rounded conversion of a count.
    fn from_count(n: u64) -> Self;

    fn to_f64(self) -> f64;
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn from_count(n: u64) -> Self {
                n as $t
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    )*};
}

float_scalar!(f32, f64);

macro_rules! ratio_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn from_count(n: u64) -> Self {
                Ratio::from_integer(<$t>::try_from(n).expect("count exceeds rational range"))
            }

            fn to_f64(self) -> f64 {
                ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
            }
        }
    )*};
}

ratio_scalar!(u64, i64, u128, i128);

/// `num / den` with the harness-wide convention that an empty denominator
/// yields zero.
pub fn ratio_or_zero<T: Scalar>(num: T, den: T) -> T {
    if den == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// Arithmetic mean in iteration order; `None` for an empty input.
pub fn mean<T: Scalar, I: IntoIterator<Item = T>>(values: I) -> Option<T> {
    let mut sum = T::zero();
    let mut n = 0u64;
    for v in values {
        sum = sum + v;
        n += 1;
    }
    (n > 0).then(|| sum / T::from_count(n))
}

/// Rounds to `places` decimals for report output.
pub fn round_to(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (value * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_exact_in_rationals() {
        let m: Ratio<u64> = mean([1u64, 2, 2].map(Ratio::from_integer)).unwrap();
        assert_eq!(m, Ratio::new(5, 3));
    }

    #[test]
    fn empty_mean_is_none() {
        assert_eq!(mean::<f64, _>(std::iter::empty()), None);
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(ratio_or_zero(3.0f32, 0.0), 0.0);
        assert_eq!(ratio_or_zero(Ratio::<u64>::from_count(1), Ratio::from_count(4)), Ratio::new(1, 4));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to(0.87754, 3), 0.878);
        assert_eq!(round_to(2.546, 2), 2.55);
    }
}
