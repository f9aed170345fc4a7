//! U-type and marginally-coupled structure checks.

use serde::Serialize;

use super::Design;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ColumnDefect {
    /// `s` does not divide `n`, so no balanced arrangement exists.
    NotDivisible { levels: usize, runs: usize },
    /// Level counts differ from `n / s`; `counts[l]` is the count of level `l`.
    Unbalanced { counts: Vec<usize> },
    /// A quantitative entry is not a midpoint-lattice value.
    NonLattice { row: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnReport {
    pub factor: usize,
    pub defect: Option<ColumnDefect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UtypeReport {
    pub columns: Vec<ColumnReport>,
}

impl UtypeReport {
    pub fn passed(&self) -> bool {
        self.columns.iter().all(|c| c.defect.is_none())
    }

    pub fn defects(&self) -> impl Iterator<Item = &ColumnReport> {
        self.columns.iter().filter(|c| c.defect.is_some())
    }
}

/// Outcome of the slice check for one level of one qualitative factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceCheck {
    pub factor: usize,
    pub level: usize,
    /// Quantitative columns (0-based within `D2`) whose bins fail to form a
    /// permutation on this slice.
    pub failing_columns: Vec<usize>,
}

impl SliceCheck {
    pub fn passed(&self) -> bool {
        self.failing_columns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McdReport {
    /// `D2` is a Latin hypercube.
    pub lhd: bool,
    pub slices: Vec<SliceCheck>,
}

impl McdReport {
    pub fn is_mcd(&self) -> bool {
        self.lhd && self.slices.iter().all(SliceCheck::passed)
    }
}

impl<T: Scalar> Design<T> {
    /// Checks that every column takes each of its `s_k` levels `n / s_k`
    /// times. Defects are reported per column, never raised.
    pub fn validate_utype(&self) -> UtypeReport {
        let spec = self.spec();
        let n = spec.runs();
        let columns = (0..spec.factors())
            .map(|k| {
                let s = spec.level(k);
                let defect = column_defect(self, k, s, n);
                ColumnReport { factor: k, defect }
            })
            .collect();
        UtypeReport { columns }
    }

    /// Marginally-coupled-design check: `D2` is an LHD and, for every
    /// qualitative factor and level, the quantitative rows of that slice bin
    /// to a smaller LHD. With `m = n / s` slice rows, a quantitative level `x`
    /// falls into bin `floor(x m / n)`.
    pub fn is_mcd(&self) -> Result<McdReport> {
        let spec = self.spec();
        let n = spec.runs();
        if spec.quantitative() == 0 {
            return Err(Error::structure("MCD check needs at least one quantitative factor"));
        }
        if let Some(k) = spec.quantitative_levels().iter().position(|&s| s != n) {
            return Err(Error::structure(format!(
                "quantitative factor {k} has {} levels; LHD columns need s = n = {n}",
                spec.quantitative_levels()[k]
            )));
        }
        if let Some(k) = spec.qualitative_levels().iter().position(|&s| !n.is_multiple_of(s)) {
            return Err(Error::structure(format!(
                "qualitative factor {k} has {} levels, which does not divide n = {n}",
                spec.qualitative_levels()[k]
            )));
        }

        let report = self.validate_utype();
        let lhd = report.columns[spec.qualitative()..].iter().all(|c| c.defect.is_none());
        let qual_ok = report.columns[..spec.qualitative()].iter().all(|c| c.defect.is_none());

        let mut slices = Vec::new();
        for factor in 0..spec.qualitative() {
            let s = spec.level(factor);
            let m = n / s;
            for level in 0..s {
                let rows: Vec<usize> = (0..n).filter(|&i| self.qual(i, factor) == level).collect();
                let failing_columns = (0..spec.quantitative())
                    .filter(|&col| {
                        if !qual_ok || rows.len() != m {
                            return true;
                        }
                        let mut seen = vec![false; m];
                        for &i in &rows {
                            let Some(x) = self.quant_level(i, col) else {
                                return true;
                            };
                            let bin = x * m / n;
                            if seen[bin] {
                                return true;
                            }
                            seen[bin] = true;
                        }
                        false
                    })
                    .collect();
                slices.push(SliceCheck {
                    factor,
                    level,
                    failing_columns,
                });
            }
        }
        Ok(McdReport { lhd, slices })
    }
}

fn column_defect<T: Scalar>(design: &Design<T>, k: usize, s: usize, n: usize) -> Option<ColumnDefect> {
    let mut counts = vec![0usize; s];
    for i in 0..n {
        match design.level(i, k) {
            Some(level) => counts[level] += 1,
            None => return Some(ColumnDefect::NonLattice { row: i }),
        }
    }
    if !n.is_multiple_of(s) {
        return Some(ColumnDefect::NotDivisible { levels: s, runs: n });
    }
    let target = n / s;
    counts
        .iter()
        .any(|&c| c != target)
        .then_some(ColumnDefect::Unbalanced { counts })
}
