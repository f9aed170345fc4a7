//! Designs with qualitative and quantitative factors.

mod frequency;
pub mod io;
mod spec;
mod structure;

pub use frequency::{full_factorial, FrequencyVector};
pub use spec::DesignSpec;
pub use structure::{ColumnDefect, ColumnReport, McdReport, SliceCheck, UtypeReport};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distance from a midpoint-lattice value within which a stored
/// quantitative entry is read back as that level.
pub const LATTICE_TOL: f64 = 1e-9;

/// Midpoint transform of a level: `(2 level + 1) / (2 s)`.
pub fn level_to_unit<T: Scalar>(level: usize, s: usize) -> Result<T> {
    if s == 0 || level >= s {
        return Err(Error::domain(format!("level {level} out of range for {s} levels")));
    }
    Ok(T::from_ratio(2 * level as i64 + 1, 2 * s as i64))
}

/// Recovers the level whose midpoint lies within [`LATTICE_TOL`] of `x`.
pub fn unit_to_level(x: f64, s: usize) -> Option<usize> {
    if s == 0 || !x.is_finite() {
        return None;
    }
    let level = (x * s as f64 - 0.5).round();
    if level < 0.0 || level >= s as f64 {
        return None;
    }
    let level = level as usize;
    let image = (2 * level + 1) as f64 / (2 * s) as f64;
    ((x - image).abs() <= LATTICE_TOL).then_some(level)
}

/// An `n x (p+q)` design. Qualitative entries are integer levels;
/// quantitative entries are unit-interval values stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T = f64> {
    spec: DesignSpec,
    qualitative: Vec<usize>,
    quantitative: Vec<T>,
}

impl<T: Scalar> Design<T> {
    /// Builds a design from integer levels, mapping quantitative levels
    /// through [`level_to_unit`].
    pub fn from_levels(spec: DesignSpec, qualitative: &[Vec<usize>], quantitative: &[Vec<usize>]) -> Result<Self> {
        let quant = map_rows(&spec, quantitative, spec.quantitative(), |row, col, &level| {
            let s = spec.level(spec.qualitative() + col);
            level_to_unit(level, s).map_err(|_| Error::Entry {
                row,
                column: spec.qualitative() + col,
                message: format!("level {level} outside 0..{s}"),
            })
        })?;
        let qual = check_qualitative(&spec, qualitative)?;
        Ok(Self {
            spec,
            qualitative: qual,
            quantitative: quant,
        })
    }

    /// Builds a design from full integer rows (`p` qualitative levels then
    /// `q` quantitative levels).
    pub fn from_level_rows(spec: DesignSpec, rows: &[Vec<usize>]) -> Result<Self> {
        let p = spec.qualitative();
        if let Some(row) = rows.iter().position(|r| r.len() != spec.factors()) {
            return Err(Error::Entry {
                row,
                column: rows[row].len(),
                message: format!("expected {} entries", spec.factors()),
            });
        }
        let qual: Vec<Vec<usize>> = rows.iter().map(|r| r[..p].to_vec()).collect();
        let quant: Vec<Vec<usize>> = rows.iter().map(|r| r[p..].to_vec()).collect();
        Self::from_levels(spec, &qual, &quant)
    }

    /// Builds a design from raw quantitative values in `[0, 1]`; no lattice
    /// or balance requirement.
    pub fn from_raw(spec: DesignSpec, qualitative: &[Vec<usize>], quantitative: &[Vec<T>]) -> Result<Self> {
        let quant = map_rows(&spec, quantitative, spec.quantitative(), |row, col, value: &T| {
            if *value < T::zero() || *value > T::one() {
                Err(Error::Entry {
                    row,
                    column: spec.qualitative() + col,
                    message: format!("value {value:?} outside [0, 1]"),
                })
            } else {
                Ok(value.clone())
            }
        })?;
        let qual = check_qualitative(&spec, qualitative)?;
        Ok(Self {
            spec,
            qualitative: qual,
            quantitative: quant,
        })
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    pub fn runs(&self) -> usize {
        self.spec.runs()
    }

    pub fn qual(&self, row: usize, factor: usize) -> usize {
        self.qualitative[row * self.spec.qualitative() + factor]
    }

    pub fn quant(&self, row: usize, factor: usize) -> &T {
        &self.quantitative[row * self.spec.quantitative() + factor]
    }

    pub fn qual_row(&self, row: usize) -> &[usize] {
        let p = self.spec.qualitative();
        &self.qualitative[row * p..(row + 1) * p]
    }

    pub fn quant_row(&self, row: usize) -> &[T] {
        let q = self.spec.quantitative();
        &self.quantitative[row * q..(row + 1) * q]
    }

    /// Integer level of quantitative entry `(row, factor)` if it sits on the
    /// midpoint lattice.
    pub fn quant_level(&self, row: usize, factor: usize) -> Option<usize> {
        let s = self.spec.level(self.spec.qualitative() + factor);
        unit_to_level(self.quant(row, factor).as_f64(), s)
    }

    /// Level of any factor (`0..p+q`) in `row`, `None` for a non-lattice
    /// quantitative entry.
    pub fn level(&self, row: usize, factor: usize) -> Option<usize> {
        let p = self.spec.qualitative();
        if factor < p {
            Some(self.qual(row, factor))
        } else {
            self.quant_level(row, factor - p)
        }
    }

    /// All rows as integer levels; fails on the first non-lattice entry.
    pub fn lattice_rows(&self) -> Result<Vec<Vec<usize>>> {
        (0..self.runs())
            .map(|i| {
                (0..self.spec.factors())
                    .map(|k| {
                        self.level(i, k).ok_or_else(|| Error::Entry {
                            row: i,
                            column: k,
                            message: format!(
                                "{:?} is not a lattice value",
                                self.quant(i, k - self.spec.qualitative())
                            ),
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice_rows().is_ok()
    }

    /// Swaps the entries of `factor` (index over all `p+q` factors) in two
    /// rows. Keeps every column's level multiset intact.
    pub fn swap_entries(&mut self, factor: usize, row_i: usize, row_j: usize) {
        let p = self.spec.qualitative();
        if factor < p {
            self.qualitative.swap(row_i * p + factor, row_j * p + factor);
        } else {
            let q = self.spec.quantitative();
            let col = factor - p;
            self.quantitative.swap(row_i * q + col, row_j * q + col);
        }
    }

    /// New design whose row `i` is row `order[i]` of `self`. `order` may
    /// repeat or drop rows; the run count follows its length.
    pub fn select_rows(&self, order: &[usize]) -> Result<Self> {
        let n = self.runs();
        if let Some(&bad) = order.iter().find(|&&r| r >= n) {
            return Err(Error::Index { index: bad, len: n });
        }
        let spec = self.spec.with_runs(order.len())?;
        let qualitative = order.iter().flat_map(|&r| self.qual_row(r).iter().copied()).collect();
        let quantitative = order.iter().flat_map(|&r| self.quant_row(r).iter().cloned()).collect();
        Ok(Self {
            spec,
            qualitative,
            quantitative,
        })
    }

    /// The `D1` block as a `q = 0` design.
    pub fn qualitative_part(&self) -> Result<Self> {
        let spec = DesignSpec::new(
            self.runs(),
            self.spec.qualitative(),
            0,
            self.spec.qualitative_levels().to_vec(),
        )?;
        Ok(Self {
            spec,
            qualitative: self.qualitative.clone(),
            quantitative: Vec::new(),
        })
    }

    /// The `D2` block as a `p = 0` design.
    pub fn quantitative_part(&self) -> Result<Self> {
        let spec = DesignSpec::new(
            self.runs(),
            0,
            self.spec.quantitative(),
            self.spec.quantitative_levels().to_vec(),
        )?;
        Ok(Self {
            spec,
            qualitative: Vec::new(),
            quantitative: self.quantitative.clone(),
        })
    }

    /// Re-evaluates the design in another scalar type. Lattice entries are
    /// rebuilt exactly from their level; others go through `f64`.
    pub fn convert<U: Scalar>(&self) -> Result<Design<U>> {
        let q = self.spec.quantitative();
        let mut quantitative = Vec::with_capacity(self.quantitative.len());
        for i in 0..self.runs() {
            for k in 0..q {
                let value = match self.quant_level(i, k) {
                    Some(level) => level_to_unit(level, self.spec.level(self.spec.qualitative() + k))?,
                    None => U::try_from_f64(self.quant(i, k).as_f64())
                        .ok_or_else(|| Error::domain("non-finite quantitative value"))?,
                };
                quantitative.push(value);
            }
        }
        Ok(Design {
            spec: self.spec.clone(),
            qualitative: self.qualitative.clone(),
            quantitative,
        })
    }
}

fn check_qualitative(spec: &DesignSpec, rows: &[Vec<usize>]) -> Result<Vec<usize>> {
    map_rows(spec, rows, spec.qualitative(), |row, col, &level| {
        let s = spec.level(col);
        if level < s {
            Ok(level)
        } else {
            Err(Error::Entry {
                row,
                column: col,
                message: format!("level {level} outside 0..{s}"),
            })
        }
    })
}

/// Flattens an `n x width` matrix, applying `f(row, col, entry)`. A
/// zero-width block may be given as an empty slice.
fn map_rows<S, U>(
    spec: &DesignSpec,
    rows: &[Vec<S>],
    width: usize,
    mut f: impl FnMut(usize, usize, &S) -> Result<U>,
) -> Result<Vec<U>> {
    let n = spec.runs();
    if width == 0 && rows.is_empty() {
        return Ok(Vec::new());
    }
    if rows.len() != n {
        return Err(Error::domain(format!("expected {n} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n * width);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Entry {
                row: i,
                column: row.len(),
                message: format!("expected {width} entries"),
            });
        }
        for (k, entry) in row.iter().enumerate() {
            out.push(f(i, k, entry)?);
        }
    }
    Ok(out)
}
