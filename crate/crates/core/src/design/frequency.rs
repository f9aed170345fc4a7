use serde::Serialize;

use super::{Design, DesignSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Upper bound on the number of rows [`full_factorial`] will enumerate.
pub const FULL_FACTORIAL_MAX_ROWS: usize = 1 << 22;

/// Level-combination counts `y(D)`, indexed lexicographically with the
/// first factor varying slowest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyVector {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl FrequencyVector {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Mixed-radix index of a level combination.
pub(crate) fn combination_index(levels: &[usize], radices: &[usize]) -> usize {
    levels.iter().zip(radices).fold(0, |acc, (&x, &s)| acc * s + x)
}

impl<T: Scalar> Design<T> {
    /// Frequency vector of a lattice design.
    pub fn frequency_vector(&self) -> Result<FrequencyVector> {
        let spec = self.spec();
        let size = spec.combinations()?;
        let mut counts = vec![0u64; size];
        for row in self.lattice_rows()? {
            counts[combination_index(&row, spec.levels())] += 1;
        }
        Ok(FrequencyVector {
            counts,
            total: spec.runs() as u64,
        })
    }
}

/// `repetitions` copies of the full factorial on `spec`'s factors, in
/// lexicographic order. The run count of `spec` is replaced by
/// `repetitions * N`.
pub fn full_factorial<T: Scalar>(spec: &DesignSpec, repetitions: usize) -> Result<Design<T>> {
    if repetitions == 0 {
        return Err(Error::domain("repetitions must be positive"));
    }
    let size = spec.combinations()?;
    let runs = size
        .checked_mul(repetitions)
        .filter(|&r| r <= FULL_FACTORIAL_MAX_ROWS)
        .ok_or_else(|| {
            Error::capacity(format!(
                "full factorial with N = {size} and {repetitions} repetitions exceeds {FULL_FACTORIAL_MAX_ROWS} rows"
            ))
        })?;
    let spec = spec.with_runs(runs)?;
    let mut rows = Vec::with_capacity(runs);
    for _ in 0..repetitions {
        let mut combo = vec![0usize; spec.factors()];
        for _ in 0..size {
            rows.push(combo.clone());
            for k in (0..combo.len()).rev() {
                combo[k] += 1;
                if combo[k] < spec.level(k) {
                    break;
                }
                combo[k] = 0;
            }
        }
    }
    Design::from_level_rows(spec, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_factorial_counts() {
        let spec = DesignSpec::new(1, 1, 1, vec![2, 2]).unwrap();
        let d: Design = full_factorial(&spec, 1).unwrap();
        assert_eq!(d.runs(), 4);
        assert_eq!(d.frequency_vector().unwrap().counts, vec![1; 4]);
        let d: Design = full_factorial(&spec, 2).unwrap();
        assert_eq!(d.runs(), 8);
        assert_eq!(d.frequency_vector().unwrap().counts, vec![2; 4]);
        assert!(d.validate_utype().passed());

        let spec = DesignSpec::new(1, 2, 2, vec![2, 2, 4, 4]).unwrap();
        let d: Design = full_factorial(&spec, 1).unwrap();
        assert_eq!(d.runs(), 64);
    }

    #[test]
    fn lexicographic_first_factor_slowest() {
        assert_eq!(combination_index(&[1, 0, 0], &[2, 3, 4]), 12);
        assert_eq!(combination_index(&[0, 0, 1], &[2, 3, 4]), 1);
    }

    #[test]
    fn example_four_has_four_occupied_cells() {
        let spec = DesignSpec::new(4, 1, 2, vec![4, 2, 2]).unwrap();
        let d = Design::<f64>::from_level_rows(spec, &[vec![0, 0, 1], vec![1, 1, 0], vec![2, 0, 0], vec![3, 1, 1]])
            .unwrap();
        let y = d.frequency_vector().unwrap();
        assert_eq!(y.len(), 16);
        assert_eq!(y.counts.iter().filter(|&&c| c == 1).count(), 4);
        assert_eq!(y.counts.iter().filter(|&&c| c == 0).count(), 12);
    }

    #[test]
    fn non_lattice_design_has_no_frequency_vector() {
        let spec = DesignSpec::new(2, 0, 1, vec![2]).unwrap();
        let d = Design::from_raw(spec, &[], &[vec![0.1], vec![0.75]]).unwrap();
        assert!(d.frequency_vector().is_err());
    }

    #[test]
    fn oversized_factorial_is_capacity_error() {
        let spec = DesignSpec::new(1, 0, 30, vec![2; 30]).unwrap();
        assert!(matches!(full_factorial::<f64>(&spec, 1), Err(Error::Capacity(_))));
    }
}
