//! Squared QQD and its reductions.
//!
//! For a design `D = (D1, D2)` with `p` qualitative and `q` quantitative
//! factors the squared discrepancy is
//!
//! ```text
//! QQD²(D) = C + 1/n² Σ_{i,j} b^p (a/b)^{δ_ij} Π_k (3/2 - |x_ik - x_jk| + |x_ik - x_jk|²)
//! C       = -Π_{k≤p} (a + (s_k - 1) b)/s_k · (4/3)^q
//! ```
//!
//! where `δ_ij` is the number of qualitative columns on which rows `i` and
//! `j` agree. The double sum includes `i = j`.

use serde::{Deserialize, Serialize};

use crate::config::CriterionConfig;
use crate::design::{Design, DesignSpec};
use crate::error::{Error, Result};
use crate::kernel::{wrap_kernel, KroneckerKernel};
use crate::scalar::{CompensatedSum, FloatScalar, Scalar};

/// Largest `N` for which the quadratic form is evaluated.
pub const QUADRATIC_FORM_CAP: usize = 10_000;

/// Number of qualitative columns on which rows `i` and `j` agree.
pub fn coincidence_number<T: Scalar>(design: &Design<T>, i: usize, j: usize) -> Result<usize> {
    let n = design.runs();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::Index { index: idx, len: n });
        }
    }
    Ok(coincidences(design.qual_row(i), design.qual_row(j)))
}

pub(crate) fn coincidences(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// `C = -Π_{k≤p} (a + (s_k-1) b)/s_k · (4/3)^q`.
pub fn constant_term<T: Scalar>(spec: &DesignSpec, config: &CriterionConfig<T>) -> T {
    let qual = spec
        .qualitative_levels()
        .iter()
        .fold(T::one(), |acc, &s| acc * config.qualitative_mean(s));
    -(qual * T::from_ratio(4, 3).powu(spec.quantitative()))
}

/// Kernel value between rows `i` and `j`.
pub(crate) fn pair_kernel<T: Scalar>(design: &Design<T>, config: &CriterionConfig<T>, i: usize, j: usize) -> T {
    let p = design.spec().qualitative();
    let agree = coincidences(design.qual_row(i), design.qual_row(j));
    let qual = config.a.powu(agree) * config.b.powu(p - agree);
    design
        .quant_row(i)
        .iter()
        .zip(design.quant_row(j))
        .fold(qual, |acc, (x, z)| acc * wrap_kernel(x, z))
}

/// Squared QQD by the pairwise closed form.
pub fn qqd_squared<T: Scalar>(design: &Design<T>, config: &CriterionConfig<T>) -> T {
    let n = design.runs();
    let mut diagonal = CompensatedSum::new();
    let mut off = CompensatedSum::new();
    for i in 0..n {
        diagonal.add(pair_kernel(design, config, i, i));
        for j in i + 1..n {
            off.add(pair_kernel(design, config, i, j));
        }
    }
    let sum = diagonal.value() + T::from_ratio(2, 1) * off.value();
    constant_term(design.spec(), config) + sum / T::from_count(n * n)
}

/// `C + yᵀAy / n²` for an arbitrary non-negative weight vector `y` over the
/// level combinations (`n = Σ y`). Integer `y` gives an exact design; real
/// `y` the continuous relaxation.
pub fn qqd_squared_weights<T: Scalar>(spec: &DesignSpec, config: &CriterionConfig<T>, weights: &[T]) -> Result<T> {
    check_cap(spec, QUADRATIC_FORM_CAP)?;
    weighted_form(spec, config, weights)
}

fn check_cap(spec: &DesignSpec, cap: usize) -> Result<usize> {
    let size = spec.combinations()?;
    if size > cap {
        return Err(Error::capacity(format!(
            "N = {size} exceeds the quadratic-form cap {cap}; use the pairwise closed form"
        )));
    }
    Ok(size)
}

fn weighted_form<T: Scalar>(spec: &DesignSpec, config: &CriterionConfig<T>, weights: &[T]) -> Result<T> {
    let size = spec.combinations()?;
    if weights.len() != size {
        return Err(Error::domain(format!(
            "weight vector has length {}, expected N = {size}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| *w < T::zero()) {
        return Err(Error::domain("weights must be non-negative"));
    }
    let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
    if total <= T::zero() {
        return Err(Error::domain("weights must have positive total"));
    }
    let kernel = KroneckerKernel::new(spec, config)?;
    let quad = kernel.quadratic_form(weights);
    Ok(constant_term(spec, config) + quad / (total.clone() * total))
}

/// Squared QQD through the frequency vector and the Kronecker kernel
/// matrix, with the default cap on `N`.
pub fn qqd_squared_quadratic<T: Scalar>(design: &Design<T>, config: &CriterionConfig<T>) -> Result<T> {
    qqd_squared_quadratic_capped(design, config, QUADRATIC_FORM_CAP)
}

pub fn qqd_squared_quadratic_capped<T: Scalar>(
    design: &Design<T>,
    config: &CriterionConfig<T>,
    cap: usize,
) -> Result<T> {
    let spec = design.spec();
    check_cap(spec, cap)?;
    let y = design.frequency_vector()?;
    let weights: Vec<T> = y.counts.iter().map(|&c| T::from_count(c as usize)).collect();
    weighted_form(spec, config, &weights)
}

/// Squared wrap-around discrepancy of the quantitative columns.
pub fn wd_squared<T: Scalar>(design: &Design<T>) -> Result<T> {
    if design.spec().quantitative() == 0 {
        return Err(Error::domain("wrap-around discrepancy needs a quantitative factor"));
    }
    Ok(qqd_squared(&design.quantitative_part()?, &CriterionConfig::default()))
}

/// Discrete discrepancy of the qualitative columns.
pub fn dd<T: Scalar>(design: &Design<T>, config: &CriterionConfig<T>) -> Result<T> {
    if design.spec().qualitative() == 0 {
        return Err(Error::domain("discrete discrepancy needs a qualitative factor"));
    }
    Ok(qqd_squared(&design.qualitative_part()?, config))
}

/// What each slice contributes to [`swd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwdMode {
    /// Square root of the squared wrap-around discrepancy.
    Wd,
    WdSquared,
}

/// How slice values are placed in `[0, 1]` before the wrap-around
/// discrepancy is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceScale {
    /// The design's stored values.
    Stored,
    /// Lattice levels mapped to `level / (s - 1)`, so the extreme levels sit
    /// on the endpoints 0 and 1. Requires lattice columns.
    LevelEndpoints,
}

impl SwdMode {
    pub const ALL: [SwdMode; 2] = [SwdMode::Wd, SwdMode::WdSquared];
}

impl SliceScale {
    pub const ALL: [SliceScale; 2] = [SliceScale::Stored, SliceScale::LevelEndpoints];
}

/// Sum over every qualitative factor and every level of the wrap-around
/// discrepancy of the quantitative rows at that level.
pub fn swd<T: FloatScalar>(design: &Design<T>, mode: SwdMode, scale: SliceScale) -> Result<T> {
    let spec = design.spec();
    let (p, q) = (spec.qualitative(), spec.quantitative());
    if p == 0 || q == 0 {
        return Err(Error::domain(
            "SWD needs at least one qualitative and one quantitative factor",
        ));
    }
    let values: Vec<Vec<T>> = (0..design.runs())
        .map(|i| {
            (0..q)
                .map(|k| match scale {
                    SliceScale::Stored => Ok(*design.quant(i, k)),
                    SliceScale::LevelEndpoints => {
                        let s = spec.level(p + k);
                        let level = design.quant_level(i, k).ok_or_else(|| Error::Entry {
                            row: i,
                            column: p + k,
                            message: "endpoint scaling needs lattice values".into(),
                        })?;
                        Ok(if s == 1 {
                            T::from_ratio(1, 2)
                        } else {
                            T::from_ratio(level as i64, s as i64 - 1)
                        })
                    }
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;

    let mut total = CompensatedSum::new();
    for factor in 0..p {
        for level in 0..spec.level(factor) {
            let rows: Vec<Vec<T>> = (0..design.runs())
                .filter(|&i| design.qual(i, factor) == level)
                .map(|i| values[i].clone())
                .collect();
            if rows.is_empty() {
                return Err(Error::domain(format!(
                    "qualitative factor {factor} never takes level {level}"
                )));
            }
            let slice_spec = DesignSpec::new(rows.len(), 0, q, spec.quantitative_levels().to_vec())?;
            let slice = Design::from_raw(slice_spec, &[], &rows)?;
            let w2 = wd_squared(&slice)?;
            total.add(match mode {
                SwdMode::Wd => w2.max(T::zero()).sqrt(),
                SwdMode::WdSquared => w2,
            });
        }
    }
    Ok(total.value())
}

/// Kernel of a row with itself, `a^p (3/2)^q`.
pub fn diagonal_kernel<T: Scalar>(spec: &DesignSpec, config: &CriterionConfig<T>) -> T {
    config.a.powu(spec.qualitative()) * T::from_ratio(3, 2).powu(spec.quantitative())
}
