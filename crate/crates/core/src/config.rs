use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Kernel weights for qualitative factors and the tolerances used when
/// comparing criterion values.
///
/// `a` is the kernel value for two runs at the same level, `b` for two runs
/// at different levels. With the defaults `a = 3/2`, `b = 5/4` both factor
/// types have kernel range `[5/4, 3/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionConfig<T> {
    pub a: T,
    pub b: T,
    /// Agreement tolerance between algebraically equal formulations.
    pub tol_equiv: f64,
    /// Tolerance against values reported to four decimals.
    pub tol_reference: f64,
}

impl<T: Scalar> Default for CriterionConfig<T> {
    fn default() -> Self {
        Self {
            a: T::from_ratio(3, 2),
            b: T::from_ratio(5, 4),
            tol_equiv: 1e-10,
            tol_reference: 5e-5,
        }
    }
}

impl<T: Scalar> CriterionConfig<T> {
    pub fn with_weights(a: T, b: T) -> Result<Self> {
        let cfg = Self {
            a,
            b,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks `a > b > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.b > T::zero() && self.a > self.b) {
            return Err(Error::domain(format!(
                "kernel weights must satisfy a > b > 0 (a = {:?}, b = {:?})",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// Mean of the qualitative kernel over a factor with `s` levels:
    /// `(a + (s-1) b) / s`, which is `(5s+1)/(4s)` under the defaults.
    pub fn qualitative_mean(&self, s: usize) -> T {
        (self.a.clone() + self.b.clone() * T::from_count(s - 1)) / T::from_count(s)
    }

    pub fn is_default(&self) -> bool {
        self.a == T::from_ratio(3, 2) && self.b == T::from_ratio(5, 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_weights() {
        assert!(CriterionConfig::<f64>::with_weights(1.0, 2.0).is_err());
        assert!(CriterionConfig::<f64>::with_weights(2.0, 0.0).is_err());
        assert!(CriterionConfig::<f64>::with_weights(2.0, 1.0).is_ok());
    }

    #[test]
    fn default_mean_is_five_s_plus_one_over_four_s() {
        let cfg = CriterionConfig::<f64>::default();
        for s in 1..10 {
            let expected = (5.0 * s as f64 + 1.0) / (4.0 * s as f64);
            assert!((cfg.qualitative_mean(s) - expected).abs() < 1e-15);
        }
    }
}
