//! Per-pair kernel cache with O(n) updates for single-column swaps.

use crate::config::CriterionConfig;
use crate::design::Design;
use crate::discrepancy::{coincidences, constant_term, diagonal_kernel};
use crate::error::{Error, Result};
use crate::kernel::wrap_kernel;
use crate::scalar::{CompensatedSum, Scalar};

/// Cached coincidence counts and quantitative kernel factors for every
/// unordered row pair `i < j`.
///
/// A pair's kernel is `a^δ b^(p-δ) Π_k f_k` where `f_k` is the wrap kernel of
/// quantitative column `k`.
#[derive(Debug, Clone)]
pub struct PairCache<T> {
    n: usize,
    p: usize,
    q: usize,
    agree: Vec<usize>,
    factors: Vec<T>,
    terms: Vec<T>,
    a_pow: Vec<T>,
    b_pow: Vec<T>,
    off_diagonal: CompensatedSum<T>,
    diagonal: T,
    constant: T,
}

/// One recomputed pair after a prospective swap.
#[derive(Debug, Clone)]
struct PairUpdate<T> {
    pair: usize,
    agree: usize,
    factor: Option<(usize, T)>,
    term: T,
}

impl<T: Scalar> PairCache<T> {
    pub fn new(design: &Design<T>, config: &CriterionConfig<T>) -> Self {
        let spec = design.spec();
        let (n, p, q) = (design.runs(), spec.qualitative(), spec.quantitative());
        let a_pow: Vec<T> = (0..=p).map(|e| config.a.powu(e)).collect();
        let b_pow: Vec<T> = (0..=p).map(|e| config.b.powu(e)).collect();
        let pairs = n * n.saturating_sub(1) / 2;
        let mut cache = Self {
            n,
            p,
            q,
            agree: Vec::with_capacity(pairs),
            factors: Vec::with_capacity(pairs * q),
            terms: Vec::with_capacity(pairs),
            a_pow,
            b_pow,
            off_diagonal: CompensatedSum::new(),
            diagonal: diagonal_kernel(spec, config),
            constant: constant_term(spec, config),
        };
        for i in 0..n {
            for j in i + 1..n {
                let agree = coincidences(design.qual_row(i), design.qual_row(j));
                for (x, z) in design.quant_row(i).iter().zip(design.quant_row(j)) {
                    cache.factors.push(wrap_kernel(x, z));
                }
                let idx = cache.agree.len();
                cache.agree.push(agree);
                let term = cache.term(agree, &cache.factors[idx * q..(idx + 1) * q]);
                cache.off_diagonal.add(term.clone());
                cache.terms.push(term);
            }
        }
        cache
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn term(&self, agree: usize, factors: &[T]) -> T {
        factors.iter().fold(
            self.a_pow[agree].clone() * self.b_pow[self.p - agree].clone(),
            |acc, f| acc * f.clone(),
        )
    }

    /// Current squared QQD.
    pub fn value(&self) -> T {
        let n = T::from_count(self.n);
        let sum = n.clone() * self.diagonal.clone() + T::from_ratio(2, 1) * self.off_diagonal.value();
        self.constant.clone() + sum / (n.clone() * n)
    }

    /// Cached kernel of the pair `(i, j)`, `i != j`.
    pub fn pair_term(&self, i: usize, j: usize) -> &T {
        &self.terms[self.pair_index(i, j)]
    }

    pub fn pair_agreement(&self, i: usize, j: usize) -> usize {
        self.agree[self.pair_index(i, j)]
    }

    fn check(&self, design: &Design<T>, factor: usize, row_i: usize, row_j: usize) -> Result<()> {
        if design.runs() != self.n {
            return Err(Error::domain("cache and design disagree on the run count"));
        }
        let m = self.p + self.q;
        if factor >= m {
            return Err(Error::Index { index: factor, len: m });
        }
        for r in [row_i, row_j] {
            if r >= self.n {
                return Err(Error::Index { index: r, len: self.n });
            }
        }
        Ok(())
    }

    fn updates(&self, design: &Design<T>, factor: usize, row_i: usize, row_j: usize) -> Vec<PairUpdate<T>> {
        let mut out = Vec::with_capacity(2 * self.n);
        for (moved, other_row) in [(row_i, row_j), (row_j, row_i)] {
            for k in (0..self.n).filter(|&k| k != row_i && k != row_j) {
                let pair = self.pair_index(moved, k);
                let mut agree = self.agree[pair];
                let fs = &self.factors[pair * self.q..(pair + 1) * self.q];
                let update = if factor < self.p {
                    let old = design.qual(moved, factor);
                    let new = design.qual(other_row, factor);
                    let theirs = design.qual(k, factor);
                    agree = agree + usize::from(new == theirs) - usize::from(old == theirs);
                    PairUpdate {
                        pair,
                        agree,
                        factor: None,
                        term: self.term(agree, fs),
                    }
                } else {
                    let col = factor - self.p;
                    let value = wrap_kernel(design.quant(other_row, col), design.quant(k, col));
                    let mut new_fs = fs.to_vec();
                    new_fs[col] = value.clone();
                    PairUpdate {
                        pair,
                        agree,
                        factor: Some((col, value)),
                        term: self.term(agree, &new_fs),
                    }
                };
                out.push(update);
            }
        }
        out
    }

    fn scale(&self, off_delta: T) -> T {
        let n = T::from_count(self.n);
        T::from_ratio(2, 1) * off_delta / (n.clone() * n)
    }

    /// Change in squared QQD if `factor` were swapped between two rows;
    /// neither the cache nor the design is modified.
    pub fn swap_delta(&self, design: &Design<T>, factor: usize, row_i: usize, row_j: usize) -> Result<T> {
        self.check(design, factor, row_i, row_j)?;
        if row_i == row_j {
            return Ok(T::zero());
        }
        let off: CompensatedSum<T> = self
            .updates(design, factor, row_i, row_j)
            .into_iter()
            .map(|u| u.term - self.terms[u.pair].clone())
            .collect();
        Ok(self.scale(off.value()))
    }

    /// Swaps `factor` between two rows of `design`, updates the cache and
    /// returns the new squared QQD.
    pub fn apply_swap(&mut self, design: &mut Design<T>, factor: usize, row_i: usize, row_j: usize) -> Result<T> {
        self.check(design, factor, row_i, row_j)?;
        if row_i == row_j {
            return Ok(self.value());
        }
        let updates = self.updates(design, factor, row_i, row_j);
        let mut off = CompensatedSum::new();
        for u in updates {
            off.add(u.term.clone() - self.terms[u.pair].clone());
            self.agree[u.pair] = u.agree;
            if let Some((col, value)) = u.factor {
                self.factors[u.pair * self.q + col] = value;
            }
            self.terms[u.pair] = u.term;
        }
        self.off_diagonal.add(off.value());
        design.swap_entries(factor, row_i, row_j);
        Ok(self.value())
    }

    /// Re-sums the cached pair terms from scratch, discarding accumulated
    /// rounding in the running total.
    pub fn resum(&mut self) -> T {
        self.off_diagonal = self.terms.iter().cloned().collect();
        self.value()
    }
}

/// Swaps `column` between two rows through the cache; returns the new
/// squared QQD.
pub fn qqd_delta_swap<T: Scalar>(
    cache: &mut PairCache<T>,
    design: &mut Design<T>,
    column: usize,
    row_i: usize,
    row_j: usize,
) -> Result<T> {
    cache.apply_swap(design, column, row_i, row_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::DesignSpec;
    use crate::discrepancy::{pair_kernel, qqd_squared};
    use num_rational::BigRational;

    fn design() -> Design<f64> {
        let spec = DesignSpec::new(8, 1, 2, vec![2, 8, 8]).unwrap();
        let first = [0, 2, 4, 6, 1, 3, 5, 7];
        let second = [2, 0, 6, 4, 5, 3, 7, 1];
        let rows: Vec<Vec<usize>> = (0..8).map(|i| vec![usize::from(i >= 4), first[i], second[i]]).collect();
        Design::from_level_rows(spec, &rows).unwrap()
    }

    #[test]
    fn cache_reproduces_closed_form_and_pair_terms() {
        let cfg = CriterionConfig::default();
        let d = design();
        let cache = PairCache::new(&d, &cfg);
        assert!((cache.value() - qqd_squared(&d, &cfg)).abs() < 1e-14);
        for i in 0..8 {
            for j in i + 1..8 {
                assert!((cache.pair_term(i, j) - pair_kernel(&d, &cfg, i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn swap_and_back_is_exact_in_rationals() {
        let cfg = CriterionConfig::<BigRational>::default();
        let mut d: Design<BigRational> = design().convert().unwrap();
        let mut cache = PairCache::new(&d, &cfg);
        let before = cache.value();
        for factor in 0..3 {
            let mid = qqd_delta_swap(&mut cache, &mut d, factor, 1, 6).unwrap();
            assert_eq!(mid, qqd_squared(&d, &cfg));
            let back = qqd_delta_swap(&mut cache, &mut d, factor, 1, 6).unwrap();
            assert_eq!(back, before);
        }
    }

    #[test]
    fn constant_column_swap_is_free() {
        let spec = DesignSpec::new(4, 1, 1, vec![1, 4]).unwrap();
        let mut d = Design::<f64>::from_level_rows(spec, &[vec![0, 0], vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let cfg = CriterionConfig::default();
        let mut cache = PairCache::new(&d, &cfg);
        let before = cache.value();
        assert_eq!(cache.swap_delta(&d, 0, 0, 3).unwrap(), 0.0);
        assert_eq!(cache.apply_swap(&mut d, 0, 0, 3).unwrap(), before);
    }

    #[test]
    fn same_row_is_noop_and_bad_index_errors() {
        let cfg = CriterionConfig::default();
        let mut d = design();
        let mut cache = PairCache::new(&d, &cfg);
        let before = cache.value();
        assert_eq!(cache.apply_swap(&mut d, 1, 3, 3).unwrap(), before);
        assert!(cache.apply_swap(&mut d, 3, 0, 1).is_err());
        assert!(cache.apply_swap(&mut d, 0, 0, 8).is_err());
    }
}
