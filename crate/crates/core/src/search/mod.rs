//! Stochastic and exhaustive search for low-QQD U-type designs.
//!
//! The stochastic search is threshold accepting over column swaps. Each
//! restart draws its own ChaCha8 stream (`seed`, stream = restart index), so
//! results are bit-reproducible and independent of thread scheduling.

mod exhaustive;

pub use exhaustive::{exhaustive_uniform, utype_count, ExhaustiveResult, DEFAULT_EXHAUSTIVE_CAP};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{lb, LowerBound};
use crate::config::CriterionConfig;
use crate::design::{level_to_unit, Design, DesignSpec};
use crate::discrepancy::qqd_squared;
use crate::error::{Error, Result};
use crate::pair_cache::PairCache;

/// Moves with `|Δ|` at most this are treated as equal-value moves.
pub const EQUAL_MOVE_TOL: f64 = 1e-12;
/// Allowed gap between the tracked value and a full recompute.
pub const DRIFT_TOL: f64 = 1e-9;
const DEFAULT_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ThresholdSchedule {
    /// Geometric from `0.05 (v0 - LB)` down to `1e-3` of that over
    /// `steps - 1` steps, then a final zero step; `v0` is the restart's
    /// initial value.
    Relative { steps: usize },
    /// Fixed thresholds, non-increasing, ending at zero.
    Explicit(Vec<f64>),
}

impl Default for ThresholdSchedule {
    fn default() -> Self {
        Self::Relative { steps: DEFAULT_STEPS }
    }
}

impl ThresholdSchedule {
    fn validate(&self) -> Result<()> {
        match self {
            Self::Relative { steps } if *steps == 0 => Err(Error::domain("schedule needs at least one step")),
            Self::Relative { .. } => Ok(()),
            Self::Explicit(t) => {
                if t.last() != Some(&0.0) {
                    return Err(Error::domain("threshold schedule must end at 0"));
                }
                if t.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::domain("thresholds must be finite and non-negative"));
                }
                if t.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::domain("threshold schedule must be non-increasing"));
                }
                Ok(())
            }
        }
    }

    fn thresholds(&self, initial: f64, bound: f64) -> Vec<f64> {
        match self {
            Self::Explicit(t) => t.clone(),
            Self::Relative { steps } => geometric(*steps, 0.05 * (initial - bound).max(0.0)),
        }
    }
}

/// `steps - 1` geometric thresholds from `top` to `top / 1000`, then 0.
fn geometric(steps: usize, top: f64) -> Vec<f64> {
    let count = steps - 1;
    let mut out: Vec<f64> = (0..count)
        .map(|i| {
            let frac = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            top * 1e-3f64.powf(frac)
        })
        .collect();
    out.push(0.0);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Iterations per restart. Zero returns the initial design.
    pub budget: usize,
    pub restarts: usize,
    pub threshold_schedule: ThresholdSchedule,
    pub seed: u64,
    pub stop_at_bound: bool,
    pub bound_tol: f64,
    /// Iterations spent at each threshold; `None` splits the budget evenly.
    pub iterations_per_threshold: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            restarts: 8,
            threshold_schedule: ThresholdSchedule::default(),
            seed: 0,
            stop_at_bound: true,
            bound_tol: 1e-9,
            iterations_per_threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Budget,
    Bound,
    Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    #[serde(skip)]
    pub best_design: Design,
    pub best_value: f64,
    pub bound: LowerBound<f64>,
    pub gap: f64,
    /// Improvements of the winning restart.
    pub trace: Vec<TracePoint>,
    pub terminated_by: Termination,
    /// Index of the restart that produced `best_design`.
    pub restart: usize,
    /// Iterations run by the winning restart.
    pub iterations: usize,
}

impl SearchResult {
    pub fn attained_bound(&self, tol: f64) -> bool {
        self.best_value <= self.bound.value + tol
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_utype(spec: &DesignSpec, rng: &mut ChaCha8Rng) -> Result<Design> {
    spec.require_utype_feasible()?;
    let n = spec.runs();
    let column = |s: usize, rng: &mut ChaCha8Rng| {
        let mut c: Vec<usize> = (0..n).map(|i| i % s).collect();
        c.shuffle(rng);
        c
    };
    let qual: Vec<Vec<usize>> = spec.qualitative_levels().iter().map(|&s| column(s, rng)).collect();
    let quant: Vec<Vec<f64>> = spec
        .quantitative_levels()
        .iter()
        .map(|&s| {
            column(s, rng)
                .into_iter()
                .map(|l| level_to_unit(l, s))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    // from_raw takes rows
    let qual_rows: Vec<Vec<usize>> = (0..n).map(|i| qual.iter().map(|c| c[i]).collect()).collect();
    let quant_rows: Vec<Vec<f64>> = (0..n).map(|i| quant.iter().map(|c| c[i]).collect()).collect();
    Design::from_raw(spec.clone(), &qual_rows, &quant_rows)
}

/// Random U-type design: each column an independent uniform shuffle of its
/// balanced level multiset. Restart 0 of a search with the same seed starts
/// from this design.
pub fn random_utype(spec: &DesignSpec, seed: u64) -> Result<Design> {
    draw_utype(spec, &mut rng_for(seed, 0))
}

struct RestartOutcome {
    design: Design,
    value: f64,
    trace: Vec<TracePoint>,
    terminated_by: Termination,
    iterations: usize,
}

fn run_restart(
    spec: &DesignSpec,
    config: &SearchConfig,
    criterion: &CriterionConfig<f64>,
    bound: f64,
    restart: usize,
) -> Result<RestartOutcome> {
    let mut rng = rng_for(config.seed, restart as u64);
    let mut design = draw_utype(spec, &mut rng)?;
    let mut cache = PairCache::new(&design, criterion);
    let mut best = cache.value();
    let mut best_design = design.clone();
    let mut trace = vec![TracePoint {
        iteration: 0,
        value: best,
    }];
    let reached = |v: f64| config.stop_at_bound && v <= bound + config.bound_tol;

    let n = spec.runs();
    let movable: Vec<usize> = (0..spec.factors()).filter(|&k| spec.level(k) > 1).collect();
    // a swap of two distinct entries in one column; None when every column is constant
    let draw_move = |rng: &mut ChaCha8Rng, design: &Design| -> Option<(usize, usize, usize)> {
        if movable.is_empty() {
            return None;
        }
        let factor = movable[rng.random_range(0..movable.len())];
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        (design.level(i, factor) != design.level(j, factor)).then_some((factor, i, j))
    };
    let thresholds = config.threshold_schedule.thresholds(best, bound);
    let per_step = config
        .iterations_per_threshold
        .unwrap_or_else(|| config.budget.div_ceil(thresholds.len()).max(1));

    let mut iteration = 0;
    let mut terminated_by = Termination::Schedule;
    if reached(best) {
        terminated_by = Termination::Bound;
    } else if config.budget == 0 || movable.is_empty() {
        terminated_by = Termination::Budget;
    } else {
        'outer: for &threshold in &thresholds {
            for _ in 0..per_step {
                if iteration == config.budget {
                    terminated_by = Termination::Budget;
                    break 'outer;
                }
                iteration += 1;
                let Some((factor, i, j)) = draw_move(&mut rng, &design) else {
                    continue;
                };
                let delta = cache.swap_delta(&design, factor, i, j)?;
                if delta <= threshold || delta.abs() <= EQUAL_MOVE_TOL {
                    let current = cache.apply_swap(&mut design, factor, i, j)?;
                    if current < best {
                        best = current;
                        best_design = design.clone();
                        trace.push(TracePoint { iteration, value: best });
                        if reached(best) {
                            terminated_by = Termination::Bound;
                            break 'outer;
                        }
                    }
                }
            }
            cache.resum();
        }
        if terminated_by == Termination::Schedule && iteration == config.budget {
            terminated_by = Termination::Budget;
        }
    }

    let recomputed = qqd_squared(&best_design, criterion);
    if (recomputed - best).abs() >= DRIFT_TOL {
        return Err(Error::structure(format!(
            "incremental value {best} drifted from full recompute {recomputed}"
        )));
    }
    if let Some(last) = trace.last_mut() {
        last.value = recomputed;
    }
    Ok(RestartOutcome {
        design: best_design,
        value: recomputed,
        trace,
        terminated_by,
        iterations: iteration,
    })
}

/// Threshold-accepting search over U-type designs of `spec` under the default
/// kernel weights. Restarts run in parallel; the lowest value wins, ties going
/// to the lowest restart index.
pub fn search_uniform(spec: &DesignSpec, config: &SearchConfig) -> Result<SearchResult> {
    spec.require_utype_feasible()?;
    config.threshold_schedule.validate()?;
    if config.restarts == 0 {
        return Err(Error::domain("at least one restart is required"));
    }
    if config.bound_tol.is_nan() || config.bound_tol < 0.0 {
        return Err(Error::domain("bound_tol must be non-negative"));
    }
    let criterion = CriterionConfig::<f64>::default();
    let bound = lb::<f64>(spec)?;
    let outcomes: Vec<Result<RestartOutcome>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(spec, config, &criterion, bound.value, r))
        .collect();
    let mut winner: Option<(usize, RestartOutcome)> = None;
    for (r, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if winner.as_ref().is_none_or(|(_, w)| outcome.value < w.value) {
            winner = Some((r, outcome));
        }
    }
    let (restart, w) = winner.expect("restarts >= 1");
    Ok(SearchResult {
        gap: w.value - bound.value,
        best_design: w.design,
        best_value: w.value,
        bound,
        trace: w.trace,
        terminated_by: w.terminated_by,
        restart,
        iterations: w.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_designs_are_utype_and_seeded() {
        let spec = DesignSpec::new(8, 1, 2, vec![2, 8, 8]).unwrap();
        let a = random_utype(&spec, 7).unwrap();
        assert!(a.validate_utype().passed());
        assert_eq!(a, random_utype(&spec, 7).unwrap());
        assert!(random_utype(&DesignSpec::new(6, 1, 0, vec![4]).unwrap(), 1).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(ThresholdSchedule::Explicit(vec![0.1, 0.2, 0.0]).validate().is_err());
        assert!(ThresholdSchedule::Explicit(vec![0.1, 0.01]).validate().is_err());
        assert!(ThresholdSchedule::Explicit(vec![0.1, 0.1, 0.0]).validate().is_ok());
        let t = ThresholdSchedule::Relative { steps: 20 }.thresholds(1.0, 0.0);
        assert_eq!(t.len(), 20);
        assert!((t[0] - 0.05).abs() < 1e-15 && (t[18] - 5e-5).abs() < 1e-15 && t[19] == 0.0);
    }

    #[test]
    fn zero_budget_returns_initial_design() {
        let spec = DesignSpec::new(8, 1, 2, vec![2, 8, 8]).unwrap();
        let config = SearchConfig {
            budget: 0,
            restarts: 1,
            seed: 3,
            ..SearchConfig::default()
        };
        let r = search_uniform(&spec, &config).unwrap();
        assert_eq!(r.best_design, random_utype(&spec, 3).unwrap());
        assert_eq!(r.terminated_by, Termination::Budget);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn deterministic_across_runs() {
        let spec = DesignSpec::new(12, 1, 2, vec![3, 4, 6]).unwrap();
        let config = SearchConfig {
            budget: 2_000,
            restarts: 4,
            seed: 11,
            ..SearchConfig::default()
        };
        let a = search_uniform(&spec, &config).unwrap();
        let b = search_uniform(&spec, &config).unwrap();
        assert_eq!(a, b);
        assert!(a.trace.windows(2).all(|w| w[1].value < w[0].value));
        assert!(a.best_design.validate_utype().passed());
    }
}
