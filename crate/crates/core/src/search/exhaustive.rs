use serde::Serialize;

use crate::config::CriterionConfig;
use crate::design::{level_to_unit, Design, DesignSpec};
use crate::discrepancy::qqd_squared;
use crate::error::{Error, Result};

pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 10_000_000;
/// Values within this of the minimum count as optimal.
const OPTIMUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustiveResult {
    pub value: f64,
    #[serde(skip)]
    pub design: Design,
    /// Optimal designs among all raw U-type designs.
    pub optima: u128,
    /// Designs actually evaluated (first column held sorted).
    pub evaluated: u128,
}

fn multinomial(n: usize, s: usize) -> Option<u128> {
    // n! / ((n/s)!)^s
    let r = n / s;
    let mut acc: u128 = 1;
    let mut used = 0usize;
    for _ in 0..s {
        for k in 1..=r {
            used += 1;
            acc = acc.checked_mul(used as u128)? / k as u128;
        }
    }
    Some(acc)
}

/// Number of U-type designs of `spec` counting every row order; `None` on
/// overflow.
pub fn utype_count(spec: &DesignSpec) -> Option<u128> {
    spec.levels()
        .iter()
        .try_fold(1u128, |acc, &s| acc.checked_mul(multinomial(spec.runs(), s)?))
}

/// All distinct arrangements of the balanced multiset of `s` levels in `n`
/// cells, in lexicographic order.
fn balanced_columns(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn fill(remaining: &mut [usize], current: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for level in 0..remaining.len() {
            if remaining[level] > 0 {
                remaining[level] -= 1;
                current.push(level);
                fill(remaining, current, n, out);
                current.pop();
                remaining[level] += 1;
            }
        }
    }
    let mut out = Vec::new();
    fill(&mut vec![n / s; s], &mut Vec::with_capacity(n), n, &mut out);
    out
}

/// Exact minimum of the squared QQD (default weights) over all U-type
/// designs of `spec`. Fails when the raw design count exceeds `cap`.
pub fn exhaustive_uniform(spec: &DesignSpec, cap: u128) -> Result<ExhaustiveResult> {
    spec.require_utype_feasible()?;
    let total = utype_count(spec).filter(|&t| t <= cap).ok_or_else(|| {
        Error::capacity(format!(
            "U-type design space of {spec:?} exceeds the enumeration cap {cap}"
        ))
    })?;
    let n = spec.runs();
    let p = spec.qualitative();
    let m = spec.factors();
    let config = CriterionConfig::<f64>::default();
    if m == 0 {
        let design = Design::from_level_rows(spec.clone(), &vec![Vec::new(); n])?;
        return Ok(ExhaustiveResult {
            value: qqd_squared(&design, &config),
            design,
            optima: 1,
            evaluated: 1,
        });
    }
    let choices: Vec<Vec<Vec<usize>>> = spec
        .levels()
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut all = balanced_columns(n, s);
            if k == 0 {
                all.truncate(1);
            }
            all
        })
        .collect();
    let orbit = total / choices.iter().map(|c| c.len() as u128).product::<u128>();

    let units: Vec<Vec<f64>> = spec
        .levels()
        .iter()
        .map(|&s| (0..s).map(|l| level_to_unit(l, s)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let build = |index: &[usize]| -> Result<Design> {
        let qual: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..p).map(|k| choices[k][index[k]][i]).collect())
            .collect();
        let quant: Vec<Vec<f64>> = (0..n)
            .map(|i| (p..m).map(|k| units[k][choices[k][index[k]][i]]).collect())
            .collect();
        Design::from_raw(spec.clone(), &qual, &quant)
    };

    let mut index = vec![0usize; m];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut ties: u128 = 0;
    let mut evaluated: u128 = 0;
    loop {
        let value = qqd_squared(&build(&index)?, &config);
        evaluated += 1;
        match &best {
            Some((b, _)) if (value - b).abs() <= OPTIMUM_TOL => ties += 1,
            Some((b, _)) if value > *b => {}
            _ => {
                best = Some((value, index.clone()));
                ties = 1;
            }
        }
        // odometer, last factor fastest
        let mut k = m;
        loop {
            if k == 0 {
                let (value, idx) = best.expect("at least one design");
                return Ok(ExhaustiveResult {
                    value,
                    design: build(&idx)?,
                    optima: ties * orbit,
                    evaluated,
                });
            }
            k -= 1;
            index[k] += 1;
            if index[k] < choices[k].len() {
                break;
            }
            index[k] = 0;
        }
    }
}
