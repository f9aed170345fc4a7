//! Per-factor kernels and their Kronecker-structured kernel matrix.

use serde::Serialize;

use crate::config::CriterionConfig;
use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    Qualitative,
    Quantitative,
}

/// Wrap-around kernel `3/2 - |t - z| + |t - z|^2` for one quantitative
/// coordinate pair.
pub fn wrap_kernel<T: Scalar>(t: &T, z: &T) -> T {
    let d = (t.clone() - z.clone()).abs();
    T::from_ratio(3, 2) - d.clone() + d.clone() * d
}

/// `s x s` kernel matrix of one factor evaluated on its level lattice.
///
/// Qualitative: `a` on the diagonal, `b` elsewhere. Quantitative:
/// `3/2 - |i-j|(s-|i-j|)/s^2`, the wrap kernel between midpoints of levels
/// `i` and `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactor<T> {
    pub s: usize,
    pub kind: FactorKind,
    entries: Vec<T>,
}

impl<T: Scalar> KernelFactor<T> {
    pub fn qualitative(s: usize, config: &CriterionConfig<T>) -> Self {
        let entries = (0..s * s)
            .map(|idx| {
                if idx / s == idx % s {
                    config.a.clone()
                } else {
                    config.b.clone()
                }
            })
            .collect();
        Self {
            s,
            kind: FactorKind::Qualitative,
            entries,
        }
    }

    pub fn quantitative(s: usize) -> Self {
        let entries = (0..s * s)
            .map(|idx| {
                let d = (idx / s).abs_diff(idx % s);
                T::from_ratio(3, 2) - T::from_ratio((d * (s - d)) as i64, (s * s) as i64)
            })
            .collect();
        Self {
            s,
            kind: FactorKind::Quantitative,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.s + j]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.entries[i * self.s..(i + 1) * self.s]
            .iter()
            .fold(T::zero(), |acc, x| acc + x.clone())
    }

    /// Common row sum: `a + b(s-1)` for qualitative factors, `4s/3 + 1/(6s)`
    /// for quantitative ones.
    pub fn expected_row_sum(&self, config: &CriterionConfig<T>) -> T {
        let s = self.s as i64;
        match self.kind {
            FactorKind::Qualitative => config.a.clone() + config.b.clone() * T::from_ratio(s - 1, 1),
            FactorKind::Quantitative => T::from_ratio(4 * s, 3) + T::from_ratio(1, 6 * s),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.s).all(|i| (0..self.s).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Kernel matrix of factor `factor` (0-based over all `p + q` factors).
pub fn kernel_matrix<T: Scalar>(
    factor: usize,
    spec: &DesignSpec,
    config: &CriterionConfig<T>,
) -> Result<KernelFactor<T>> {
    if factor >= spec.factors() {
        return Err(Error::Index {
            index: factor,
            len: spec.factors(),
        });
    }
    let s = spec.level(factor);
    Ok(if spec.is_qualitative(factor) {
        KernelFactor::qualitative(s, config)
    } else {
        KernelFactor::quantitative(s)
    })
}

/// `A = A_1 ⊗ ... ⊗ A_{p+q}`, kept factored.
#[derive(Debug, Clone)]
pub struct KroneckerKernel<T> {
    factors: Vec<KernelFactor<T>>,
}

impl<T: Scalar> KroneckerKernel<T> {
    pub fn new(spec: &DesignSpec, config: &CriterionConfig<T>) -> Result<Self> {
        let factors = (0..spec.factors())
            .map(|k| kernel_matrix(k, spec, config))
            .collect::<Result<_>>()?;
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[KernelFactor<T>] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.s).product()
    }

    /// `A y`, applying each factor along its own tensor mode.
    pub fn apply(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.dim(), "vector length must equal N");
        let mut current = y.to_vec();
        let mut outer = 1;
        let total = y.len();
        for f in &self.factors {
            let s = f.s;
            let inner = total / (outer * s);
            let mut next = vec![T::zero(); total];
            for o in 0..outer {
                for a in 0..s {
                    for i in 0..inner {
                        let mut acc = T::zero();
                        for b in 0..s {
                            acc = acc + f.get(a, b).clone() * current[(o * s + b) * inner + i].clone();
                        }
                        next[(o * s + a) * inner + i] = acc;
                    }
                }
            }
            current = next;
            outer *= s;
        }
        current
    }

    /// `yᵀ A y`.
    pub fn quadratic_form(&self, y: &[T]) -> T {
        let ay = self.apply(y);
        compensated_sum(y.iter().zip(ay).map(|(u, v)| u.clone() * v))
    }

    /// Dense `N x N` matrix; only sensible for small `N`.
    pub fn materialize(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut dense = vec![vec![T::one(); n]; n];
        for (r, row) in dense.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let (mut ri, mut ci) = (r, c);
                let mut value = T::one();
                for f in self.factors.iter().rev() {
                    value = value * f.get(ri % f.s, ci % f.s).clone();
                    ri /= f.s;
                    ci /= f.s;
                }
                *cell = value;
            }
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CriterionConfig<f64> {
        CriterionConfig::default()
    }

    #[test]
    fn two_level_kernels_coincide() {
        let qual = KernelFactor::qualitative(2, &cfg());
        let quant = KernelFactor::<f64>::quantitative(2);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.5 } else { 1.25 };
                assert_eq!(*qual.get(i, j), expected);
                assert_eq!(*quant.get(i, j), expected);
            }
        }
    }

    #[test]
    fn four_level_distance_two_entry() {
        let k = KernelFactor::<f64>::quantitative(4);
        assert_eq!(*k.get(0, 2), 1.25);
        assert_eq!(*k.get(1, 3), 1.25);
        assert!(k.is_symmetric());
    }

    #[test]
    fn lattice_entries_match_wrap_kernel() {
        for s in 1..9 {
            let k = KernelFactor::<f64>::quantitative(s);
            for i in 0..s {
                for j in 0..s {
                    let t = (2 * i + 1) as f64 / (2 * s) as f64;
                    let z = (2 * j + 1) as f64 / (2 * s) as f64;
                    assert!((k.get(i, j) - wrap_kernel(&t, &z)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn index_out_of_range() {
        let spec = DesignSpec::new(2, 1, 0, vec![2]).unwrap();
        assert!(kernel_matrix(1, &spec, &cfg()).is_err());
    }

    #[test]
    fn factored_apply_matches_dense() {
        let spec = DesignSpec::new(1, 1, 2, vec![2, 3, 4]).unwrap();
        let kron = KroneckerKernel::new(&spec, &cfg()).unwrap();
        let dense = kron.materialize();
        let y: Vec<f64> = (0..24).map(|i| ((i * 7) % 5) as f64).collect();
        let fast = kron.apply(&y);
        for r in 0..24 {
            let slow: f64 = (0..24).map(|c| dense[r][c] * y[c]).sum();
            assert!((slow - fast[r]).abs() < 1e-12);
        }
    }
}
