//! Scalar abstraction shared by every criterion.
//!
//! All closed-form criteria (pairwise sum, Kronecker quadratic form,
//! balance-pattern form, residual bound, full-factorial value) are rational
//! functions of the design when quantitative values sit on the midpoint
//! lattice, so they are written once over [`Scalar`] and can be run in
//! `f32`, `f64` or exactly in [`BigRational`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive};

/// Numeric type a criterion can be evaluated in.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// `num / den`, exact where the type allows it.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Conversion from an exact rational (rounded for floating types).
    fn from_rational(value: &BigRational) -> Self;

    /// Conversion from a double; `None` for non-finite input.
    fn try_from_f64(value: f64) -> Option<Self>;

    fn as_f64(&self) -> f64;

    fn from_count(value: usize) -> Self {
        Self::from_ratio(value as i64, 1)
    }

    /// Integer power by repeated squaring.
    fn powu(&self, exp: usize) -> Self {
        num_traits::pow::pow(self.clone(), exp)
    }
}

/// Scalars that also support transcendental functions (bounds with
/// fractional exponents, square roots).
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn from_rational(value: &BigRational) -> Self {
                // Ratio::to_f64 keeps precision for huge numerators and
                // denominators where naive division would overflow.
                ToPrimitive::to_f64(value).map(|v| v as $t).unwrap_or(<$t>::NAN)
            }

            fn try_from_f64(value: f64) -> Option<Self> {
                value.is_finite().then_some(value as $t)
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn try_from_f64(value: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(value)
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Neumaier-compensated accumulator. For exact types the compensation term
/// stays zero.
#[derive(Debug, Clone)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, value: T) {
        let total = self.sum.clone() + value.clone();
        if Signed::abs(&self.sum) >= Signed::abs(&value) {
            self.carry = self.carry.clone() + ((self.sum.clone() - total.clone()) + value);
        } else {
            self.carry = self.carry.clone() + ((value - total.clone()) + self.sum.clone());
        }
        self.sum = total;
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.carry.clone()
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}
