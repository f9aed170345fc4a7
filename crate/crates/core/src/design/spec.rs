use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Run count, factor split and per-factor level counts of a design.
///
/// Factors `0..p` are qualitative, `p..p+q` quantitative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignSpec {
    runs: usize,
    qualitative: usize,
    quantitative: usize,
    levels: Vec<usize>,
}

impl DesignSpec {
    pub fn new(runs: usize, qualitative: usize, quantitative: usize, levels: Vec<usize>) -> Result<Self> {
        if runs == 0 {
            return Err(Error::domain("run count must be positive"));
        }
        if qualitative + quantitative == 0 {
            return Err(Error::domain("a design needs at least one factor"));
        }
        if levels.len() != qualitative + quantitative {
            return Err(Error::domain(format!(
                "expected {} level counts, got {}",
                qualitative + quantitative,
                levels.len()
            )));
        }
        if let Some(k) = levels.iter().position(|&s| s == 0) {
            return Err(Error::domain(format!("factor {k} has zero levels")));
        }
        Ok(Self {
            runs,
            qualitative,
            quantitative,
            levels,
        })
    }

    /// `U(n, s1^p s2^q)`.
    pub fn symmetric(runs: usize, qualitative: usize, quantitative: usize, s1: usize, s2: usize) -> Result<Self> {
        let mut levels = vec![s1; qualitative];
        levels.extend(std::iter::repeat_n(s2, quantitative));
        Self::new(runs, qualitative, quantitative, levels)
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn qualitative(&self) -> usize {
        self.qualitative
    }

    pub fn quantitative(&self) -> usize {
        self.quantitative
    }

    pub fn factors(&self) -> usize {
        self.qualitative + self.quantitative
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, factor: usize) -> usize {
        self.levels[factor]
    }

    pub fn qualitative_levels(&self) -> &[usize] {
        &self.levels[..self.qualitative]
    }

    pub fn quantitative_levels(&self) -> &[usize] {
        &self.levels[self.qualitative..]
    }

    pub fn is_qualitative(&self, factor: usize) -> bool {
        factor < self.qualitative
    }

    /// Number of level combinations `N`, with overflow reported.
    pub fn combinations(&self) -> Result<usize> {
        self.levels
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| {
                Error::capacity(format!(
                    "level-combination count overflows for levels {:?}",
                    self.levels
                ))
            })
    }

    /// `p` plus the number of odd-level quantitative factors.
    pub fn odd_split(&self) -> usize {
        self.qualitative + self.quantitative_levels().iter().filter(|&&s| s % 2 == 1).count()
    }

    pub fn is_utype_feasible(&self) -> bool {
        self.levels.iter().all(|&s| self.runs.is_multiple_of(s))
    }

    pub fn require_utype_feasible(&self) -> Result<()> {
        match self.levels.iter().position(|&s| !self.runs.is_multiple_of(s)) {
            None => Ok(()),
            Some(k) => Err(Error::domain(format!(
                "factor {k} has {} levels, which does not divide n = {}",
                self.levels[k], self.runs
            ))),
        }
    }

    pub fn with_runs(&self, runs: usize) -> Result<Self> {
        Self::new(runs, self.qualitative, self.quantitative, self.levels.clone())
    }

    /// The single level count shared by every qualitative factor, if any.
    pub(crate) fn common_qualitative_level(&self) -> Option<usize> {
        common(self.qualitative_levels())
    }

    pub(crate) fn common_quantitative_level(&self) -> Option<usize> {
        common(self.quantitative_levels())
    }
}

fn common(levels: &[usize]) -> Option<usize> {
    let first = *levels.first()?;
    levels.iter().all(|&s| s == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_and_split() {
        let spec = DesignSpec::new(8, 1, 3, vec![2, 3, 4, 5]).unwrap();
        assert_eq!(spec.combinations().unwrap(), 120);
        assert_eq!(spec.odd_split(), 3);
        assert!(!spec.is_utype_feasible());
    }

    #[test]
    fn overflow_is_detected() {
        let spec = DesignSpec::new(4, 0, 70, vec![2; 70]).unwrap();
        assert!(matches!(spec.combinations(), Err(Error::Capacity(_))));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DesignSpec::new(0, 1, 0, vec![2]).is_err());
        assert!(DesignSpec::new(4, 0, 0, vec![]).is_err());
        assert!(DesignSpec::new(4, 1, 1, vec![2]).is_err());
        assert!(DesignSpec::new(4, 1, 0, vec![0]).is_err());
    }
}
