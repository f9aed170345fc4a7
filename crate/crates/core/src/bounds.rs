//! Analytic lower bounds on the squared QQD of U-type designs and the value
//! attained by (repeated) full factorials.
//!
//! All bounds here use the default kernel weights `a = 3/2`, `b = 5/4`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::config::CriterionConfig;
use crate::design::DesignSpec;
use crate::discrepancy::constant_term;
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, FloatScalar, Scalar};

/// Which bound supplied [`LowerBound::value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    Lb1,
    Lb2,
    /// Both bounds apply and agree exactly.
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound<T> {
    pub value: T,
    pub source: BoundSource,
    pub lb1: T,
    /// `None` when the spec is not of the form `U(n, s^p 2^q)`.
    pub lb2: Option<T>,
}

/// Log-domain product `Π base^exponent`.
struct LogProduct<T> {
    acc: CompensatedSum<T>,
}

impl<T: FloatScalar> LogProduct<T> {
    fn new() -> Self {
        Self {
            acc: CompensatedSum::new(),
        }
    }

    fn times(&mut self, base: T, exponent: T) {
        self.acc.add(exponent * base.ln());
    }

    fn value(&self) -> T {
        self.acc.value().exp()
    }
}

/// `3/2 - i(s-i)/s^2`: the wrap kernel between two lattice levels `i` apart
/// (equal to `3/2 - 2i(2s-2i)/(4s^2)`).
fn lattice_kernel<T: Scalar>(i: usize, s: usize) -> T {
    T::from_ratio(3, 2) - T::from_ratio((i * (s - i)) as i64, (s * s) as i64)
}

fn single_point<T: Scalar>(spec: &DesignSpec) -> T {
    T::from_ratio(3, 2).powu(spec.factors()) + constant_term(spec, &CriterionConfig::default())
}

/// Lower bound from the geometric mean of the off-diagonal kernel values,
/// valid for any U-type design with the spec's parameters. Quantitative
/// factors may mix odd and even level counts in any order.
pub fn lb1<T: FloatScalar>(spec: &DesignSpec) -> Result<T> {
    spec.require_utype_feasible()?;
    let n = spec.runs();
    if n == 1 {
        return Ok(single_point(spec));
    }
    let cfg = CriterionConfig::<T>::default();
    let ratio = |num: usize, den: usize| T::from_ratio(num as i64, den as i64);

    let mut prod = LogProduct::new();
    prod.times(T::from_ratio(5, 4), T::from_count(spec.qualitative()));
    for &s in spec.qualitative_levels() {
        prod.times(T::from_ratio(6, 5), ratio(n - s, s * (n - 1)));
    }
    for &s in spec.quantitative_levels() {
        prod.times(T::from_ratio(3, 2), ratio(n - s, s * (n - 1)));
        let top = if s % 2 == 0 {
            prod.times(T::from_ratio(5, 4), ratio(n, s * (n - 1)));
            s / 2 - 1
        } else {
            (s - 1) / 2
        };
        for i in 1..=top {
            prod.times(lattice_kernel(i, s), ratio(2 * n, s * (n - 1)));
        }
    }
    let c = constant_term(spec, &cfg);
    Ok(c + T::from_ratio(3, 2).powu(spec.factors()) / T::from_count(n) + ratio(n - 1, n) * prod.value())
}

/// Closed-form bound for `U(n, s1^p s2^q)`, branching on the parity of `s2`.
pub fn lb_symmetric<T: FloatScalar>(n: usize, p: usize, q: usize, s1: usize, s2: usize) -> Result<T> {
    let spec = DesignSpec::symmetric(n, p, q, s1, s2)?;
    spec.require_utype_feasible()?;
    if n == 1 {
        return Ok(single_point(&spec));
    }
    let f = |x: usize| T::from_count(x);
    let nn = f(n);
    let n1 = f(n - 1);
    let c = -(T::from_ratio(5 * s1 as i64 + 1, 4 * s1 as i64).powi(p as i32) * T::from_ratio(4, 3).powi(q as i32));
    let mut tail = T::from_ratio(5, 4).powi(p as i32)
        * T::from_ratio(6, 5).powf(f(p) * (nn - f(s1)) / (f(s1) * n1))
        * T::from_ratio(3, 2).powf(f(q) * (nn - f(s2)) / (f(s2) * n1));
    let top = if s2 % 2 == 1 {
        (s2 - 1) / 2
    } else {
        tail = tail * T::from_ratio(5, 4).powf(nn * f(q) / (f(s2) * n1));
        s2 / 2 - 1
    };
    for i in 1..=top {
        let base = T::from_ratio(3, 2) - f(2 * i) * f(2 * s2 - 2 * i) / (f(4) * f(s2) * f(s2));
        tail = tail * base.powf(f(2) * nn * f(q) / (f(s2) * n1));
    }
    Ok(c + T::from_ratio(3, 2).powi((p + q) as i32) / nn + n1 / nn * tail)
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Balance-pattern bound for `D1 ∈ U(n, s^p)`, `D2 ∈ U(n, 2^q)`, in exact
/// arithmetic.
pub fn lb2_exact(n: usize, p: usize, q: usize, s: usize) -> Result<BigRational> {
    if n == 0 || p + q == 0 || s == 0 {
        return Err(Error::domain("lb2 needs n >= 1, p + q >= 1 and s >= 1"));
    }
    if p > 0 && !n.is_multiple_of(s) {
        return Err(Error::domain(format!("{s} levels do not divide n = {n}")));
    }
    if q > 0 && !n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "two-level quantitative factors need even n, got {n}"
        )));
    }
    let frac = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let base = num_traits::pow(frac(5 * s as i64 + 1, 4 * s as i64), p);
    let head = base.clone() * num_traits::pow(frac(11, 8), q) - base * num_traits::pow(frac(4, 3), q);

    let big_n = BigInt::from(n);
    let mut residual_sum = BigRational::zero();
    for k in 1..=p + q {
        let mut inner = BigRational::zero();
        for k1 in k.saturating_sub(q)..=k.min(p) {
            let k2 = k - k1;
            let cells = num_traits::pow(BigInt::from(s), k1) * num_traits::pow(BigInt::from(2), k2);
            let r = big_n.mod_floor(&cells);
            if r.is_zero() {
                continue;
            }
            let penalty = BigRational::from_integer(r.clone()) * (BigRational::one() - BigRational::new(r, cells));
            inner += BigRational::from_integer(binomial(p, k1) * binomial(q, k2)) * penalty;
        }
        residual_sum += inner * num_traits::pow(frac(1, 5), k);
    }
    Ok(head + num_traits::pow(frac(5, 4), p + q) * residual_sum / BigRational::from_integer(big_n.pow(2)))
}

pub fn lb2<T: Scalar>(n: usize, p: usize, q: usize, s: usize) -> Result<T> {
    lb2_exact(n, p, q, s).map(|v| T::from_rational(&v))
}

/// The qualitative level count `s` when the spec is `U(n, s^p 2^q)`.
pub fn lb2_parameters(spec: &DesignSpec) -> Option<usize> {
    if spec.quantitative_levels().iter().any(|&s| s != 2) {
        return None;
    }
    match spec.qualitative_levels() {
        [] => Some(2),
        [first, rest @ ..] => rest.iter().all(|s| s == first).then_some(*first),
    }
}

/// `max(LB1, LB2)` with provenance.
pub fn lb<T: FloatScalar>(spec: &DesignSpec) -> Result<LowerBound<T>> {
    let first = lb1::<T>(spec)?;
    let second = match lb2_parameters(spec) {
        Some(s) => Some(lb2::<T>(spec.runs(), spec.qualitative(), spec.quantitative(), s)?),
        None => None,
    };
    let (value, source) = match &second {
        Some(v2) if *v2 > first => (*v2, BoundSource::Lb2),
        Some(v2) if *v2 == first => (first, BoundSource::Tie),
        _ => (first, BoundSource::Lb1),
    };
    Ok(LowerBound {
        value,
        source,
        lb1: first,
        lb2: second,
    })
}

/// Squared QQD of any repetition of the full factorial on `spec`'s
/// factors: `C + Π_{k≤p} (a + (s_k-1)b)/s_k · Π_{k>p} (4/3 + 1/(6 s_k^2))`.
pub fn full_factorial_qqd<T: Scalar>(spec: &DesignSpec, config: &CriterionConfig<T>) -> T {
    let qual = spec
        .qualitative_levels()
        .iter()
        .fold(T::one(), |acc, &s| acc * config.qualitative_mean(s));
    let quant = spec.quantitative_levels().iter().fold(T::one(), |acc, &s| {
        acc * (T::from_ratio(4, 3) + T::from_ratio(1, 6 * (s * s) as i64))
    });
    constant_term(spec, config) + qual * quant
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lb2_example_four() {
        let v: f64 = lb2(4, 1, 2, 4).unwrap();
        assert!((v - 0.1706).abs() < 5e-5);
    }

    #[test]
    fn lb2_without_residuals_equals_full_factorial_value() {
        // 8 = 2 * 2^2: every s^k1 2^k2 divides n
        let spec = DesignSpec::new(8, 1, 2, vec![2, 2, 2]).unwrap();
        let exact = lb2_exact(8, 1, 2, 2).unwrap();
        assert_eq!(exact, full_factorial_qqd(&spec, &CriterionConfig::default()));
        assert!((exact.as_f64() - 0.155165).abs() < 5e-7);
    }

    #[test]
    fn lb1_example_five() {
        let spec = DesignSpec::symmetric(8, 7, 7, 2, 4).unwrap();
        let v: f64 = lb1(&spec).unwrap();
        assert!((v - 17.0235).abs() < 5e-4);
        let w: f64 = lb_symmetric(8, 7, 7, 2, 4).unwrap();
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn lb1_rejects_infeasible_and_handles_single_run() {
        assert!(lb1::<f64>(&DesignSpec::new(3, 1, 0, vec![2]).unwrap()).is_err());
        let spec = DesignSpec::new(1, 1, 1, vec![1, 1]).unwrap();
        let v: f64 = lb1(&spec).unwrap();
        assert!((v - (2.25 - 1.5 * 4.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn provenance() {
        let spec = DesignSpec::new(4, 1, 2, vec![4, 2, 2]).unwrap();
        let b = lb::<f64>(&spec).unwrap();
        assert_eq!(b.source, BoundSource::Lb2);
        assert!(b.value >= b.lb1);
        let spec = DesignSpec::new(6, 1, 1, vec![2, 3]).unwrap();
        let b = lb::<f64>(&spec).unwrap();
        assert_eq!(b.source, BoundSource::Lb1);
        assert!(b.lb2.is_none());
    }

    #[test]
    fn full_factorial_value_of_qualitative_only_spec_is_zero() {
        for levels in [vec![2], vec![3, 5], vec![2, 2, 7]] {
            let p = levels.len();
            let spec = DesignSpec::new(1, p, 0, levels).unwrap();
            assert!(full_factorial_qqd(&spec, &CriterionConfig::<BigRational>::default()).is_zero());
        }
    }
}
