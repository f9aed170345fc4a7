//! Balance pattern of asymmetric designs `U(n, s1^p s2^q)` and the
//! balance-pattern form of the squared QQD.
//!
//! For a column subset `l` with `k1` qualitative and `k2` quantitative
//! columns, `B_l = Σ_cells (n_cell - n / (s1^k1 s2^k2))²`, and
//! `B_k = mean of B_l over all k-subsets`. Counts are accumulated in exact
//! integer arithmetic; conversion to the caller's scalar happens once at the
//! end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest `p + q` for which all column subsets are enumerated.
pub const MAX_SUBSET_FACTORS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancePattern<T> {
    /// `B_l` keyed by the 0-based column subset (ascending). Empty for the
    /// row-form computation, which never visits individual subsets.
    pub components: BTreeMap<Vec<usize>, T>,
    /// `(B_1, ..., B_{p+q})`.
    pub aggregate: Vec<T>,
}

impl<T: Scalar> BalancePattern<T> {
    /// Largest `k` such that `B_1 = ... = B_k = 0`.
    pub fn strength(&self) -> usize {
        self.aggregate.iter().take_while(|b| b.is_zero()).count()
    }
}

/// Validated lattice rows of a `U(n, s1^p s2^q)` design.
struct Balanced {
    rows: Vec<Vec<usize>>,
    n: usize,
    p: usize,
    q: usize,
    s1: usize,
    s2: usize,
}

fn admissible<T: Scalar>(design: &Design<T>) -> Result<Balanced> {
    let spec = design.spec();
    let s1 = match spec.common_qualitative_level() {
        Some(s) => s,
        None if spec.qualitative() == 0 => 1,
        None => return Err(Error::domain("qualitative factors must share one level count")),
    };
    let s2 = match spec.common_quantitative_level() {
        Some(s) => s,
        None if spec.quantitative() == 0 => 1,
        None => return Err(Error::domain("quantitative factors must share one level count")),
    };
    let report = design.validate_utype();
    if let Some(c) = report.defects().next() {
        return Err(Error::domain(format!(
            "balance pattern needs a U-type lattice design; factor {} has defect {:?}",
            c.factor, c.defect
        )));
    }
    Ok(Balanced {
        rows: design.lattice_rows()?,
        n: design.runs(),
        p: spec.qualitative(),
        q: spec.quantitative(),
        s1,
        s2,
    })
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn cells(b: &Balanced, k1: usize, k2: usize) -> BigInt {
    num_traits::pow(BigInt::from(b.s1), k1) * num_traits::pow(BigInt::from(b.s2), k2)
}

/// `n² Σ_{k1+k2=k} C(p,k1) C(q,k2) / (s1^k1 s2^k2)`, the uniform part of
/// `Σ_Ω` at size `k`.
fn uniform_share(b: &Balanced, k: usize) -> BigRational {
    let n2 = BigInt::from(b.n).pow(2);
    (k.saturating_sub(b.q)..=k.min(b.p))
        .map(|k1| {
            let k2 = k - k1;
            BigRational::new(binomial(b.p, k1) * binomial(b.q, k2) * n2.clone(), cells(b, k1, k2))
        })
        .fold(BigRational::zero(), |acc, x| acc + x)
}

fn finish<T: Scalar>(b: &Balanced, sums: Vec<BigRational>) -> Vec<T> {
    let m = b.p + b.q;
    sums.into_iter()
        .enumerate()
        .map(|(idx, total)| T::from_rational(&(total / BigRational::from_integer(binomial(m, idx + 1)))))
        .collect()
}

/// Exact subset-enumeration balance pattern.
pub fn balance_pattern_exact<T: Scalar>(design: &Design<T>) -> Result<BalancePattern<BigRational>> {
    let b = admissible(design)?;
    let m = b.p + b.q;
    if m > MAX_SUBSET_FACTORS {
        return Err(Error::capacity(format!(
            "{m} factors exceed the subset-enumeration cap of {MAX_SUBSET_FACTORS}"
        )));
    }
    let mut components = BTreeMap::new();
    let mut sums = vec![BigRational::zero(); m];
    let n2 = BigInt::from(b.n).pow(2);
    for mask in 1u32..(1u32 << m) {
        let columns: Vec<usize> = (0..m).filter(|&c| mask & (1 << c) != 0).collect();
        let k1 = columns.iter().filter(|&&c| c < b.p).count();
        let k2 = columns.len() - k1;
        let mut keys: Vec<Vec<usize>> = b.rows.iter().map(|r| columns.iter().map(|&c| r[c]).collect()).collect();
        keys.sort_unstable();
        let mut squares: u128 = 0;
        let mut run: u128 = 0;
        for (idx, key) in keys.iter().enumerate() {
            run += 1;
            if idx + 1 == keys.len() || keys[idx + 1] != *key {
                squares += run * run;
                run = 0;
            }
        }
        let component =
            BigRational::from_integer(BigInt::from(squares)) - BigRational::new(n2.clone(), cells(&b, k1, k2));
        sums[columns.len() - 1] += component.clone();
        components.insert(columns, component);
    }
    let aggregate = finish(&b, sums);
    Ok(BalancePattern { components, aggregate })
}

/// Balance pattern by enumerating every column subset.
pub fn balance_pattern<T: Scalar>(design: &Design<T>) -> Result<BalancePattern<T>> {
    let exact = balance_pattern_exact(design)?;
    Ok(BalancePattern {
        components: exact
            .components
            .iter()
            .map(|(k, v)| (k.clone(), T::from_rational(v)))
            .collect(),
        aggregate: exact.aggregate.iter().map(T::from_rational).collect(),
    })
}

/// `B_l` for a single column subset (0-based, any order).
pub fn balance_component<T: Scalar>(design: &Design<T>, columns: &[usize]) -> Result<T> {
    let b = admissible(design)?;
    let m = b.p + b.q;
    if columns.is_empty() {
        return Err(Error::domain("column subset must be nonempty"));
    }
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if cols.len() != columns.len() {
        return Err(Error::domain("column subset has duplicates"));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= m) {
        return Err(Error::Index { index: c, len: m });
    }
    let k1 = cols.iter().filter(|&&c| c < b.p).count();
    let mut counts: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
    for r in &b.rows {
        *counts.entry(cols.iter().map(|&c| r[c]).collect()).or_default() += 1;
    }
    let squares: u128 = counts.values().map(|c| c * c).sum();
    let value = BigRational::from_integer(BigInt::from(squares))
        - BigRational::new(BigInt::from(b.n).pow(2), cells(&b, k1, cols.len() - k1));
    Ok(T::from_rational(&value))
}

/// Exact row-form balance pattern: for each ordered pair of rows agreeing on
/// `m_ij` columns, `Σ_Ω δ_ij = C(m_ij, k)`.
pub fn balance_pattern_rowform_exact<T: Scalar>(design: &Design<T>) -> Result<Vec<BigRational>> {
    let b = admissible(design)?;
    let m = b.p + b.q;
    // agreement histogram over ordered pairs, diagonal included
    let mut histogram = vec![0u64; m + 1];
    for i in 0..b.n {
        histogram[m] += 1;
        for j in i + 1..b.n {
            let agree = b.rows[i].iter().zip(&b.rows[j]).filter(|(x, y)| x == y).count();
            histogram[agree] += 2;
        }
    }
    let sums = (1..=m)
        .map(|k| {
            let pairs: BigInt = histogram
                .iter()
                .enumerate()
                .map(|(agree, &count)| binomial(agree, k) * BigInt::from(count))
                .sum();
            BigRational::from_integer(pairs) - uniform_share(&b, k)
        })
        .collect();
    Ok(finish(&b, sums))
}

/// Balance pattern from pairwise row agreements. Only `aggregate` is
/// filled.
pub fn balance_pattern_rowform<T: Scalar>(design: &Design<T>) -> Result<BalancePattern<T>> {
    Ok(BalancePattern {
        components: BTreeMap::new(),
        aggregate: balance_pattern_rowform_exact(design)?
            .iter()
            .map(T::from_rational)
            .collect(),
    })
}

/// Squared QQD of a design in `U(n, s^p 2^q)` from its balance pattern:
///
/// ```text
/// -((5s+1)/(4s))^p (4/3)^q + ((5s+1)/(4s))^p (11/8)^q
///     + 1/n² (5/4)^{p+q} Σ_k (1/5)^k C(p+q, k) B_k
/// ```
///
/// Uses the default kernel weights.
pub fn qqd_from_balance<T: Scalar>(design: &Design<T>) -> Result<T> {
    let spec = design.spec();
    if let Some(&s) = spec.quantitative_levels().iter().find(|&&s| s != 2) {
        return Err(Error::domain(format!(
            "the balance-pattern form holds only for two-level quantitative factors (found {s} levels)"
        )));
    }
    let pattern = balance_pattern_exact(design)?;
    let (n, p, q) = (spec.runs(), spec.qualitative(), spec.quantitative());
    let s = spec.common_qualitative_level().unwrap_or(1) as i64;
    let frac = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let base = num_traits::pow(frac(5 * s + 1, 4 * s), p);
    let head = base.clone() * num_traits::pow(frac(11, 8), q) - base * num_traits::pow(frac(4, 3), q);
    let weighted = pattern
        .aggregate
        .iter()
        .enumerate()
        .map(|(idx, bk)| {
            let k = idx + 1;
            num_traits::pow(frac(1, 5), k) * BigRational::from_integer(binomial(p + q, k)) * bk.clone()
        })
        .fold(BigRational::zero(), |acc, x| acc + x);
    let value =
        head + num_traits::pow(frac(5, 4), p + q) * weighted / BigRational::from_integer(BigInt::from(n).pow(2));
    Ok(T::from_rational(&value))
}
