//! Runs trials in parallel and reduces them to summaries.
//!
//! Trial `i` of an experiment always draws from `RngStream::for_trial(seed, i)`
//! and results are collected in trial order, so outputs are identical for any
//! worker count.

use rayon::prelude::*;
use serde::Serialize;

use coupon_core::stats::{SuccessSummary, Z_95};
use coupon_core::{run_trial, InteractionRecord, PhasePlan, RngStream, GENERATOR};

use crate::config::{ExperimentConfig, RoundsValue};
use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// One line of the per-trial CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial_index: u64,
    pub completed: bool,
    pub missing_after_collection: u64,
    pub missing_final: u64,
    pub collectors_complete: u64,
}

/// Summary of an experiment, with exactly the keys of the summary JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub n: u64,
    pub m: u64,
    pub rc: u64,
    pub re: RoundsValue,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub seed: u64,
    pub generator: &'static str,
    pub version: &'static str,
}

impl ExperimentSummary {
    fn new(config: &ExperimentConfig, seed: u64, stats: &SuccessSummary) -> Self {
        Self {
            n: config.n,
            m: config.m,
            rc: config.plan.samples_per_collector,
            re: config.plan.interactions.into(),
            strategy: config.plan.strategy.name().to_owned(),
            trials: stats.trials,
            successes: stats.successes,
            fraction: stats.fraction,
            wilson_low: stats.wilson_low,
            wilson_high: stats.wilson_high,
            seed,
            generator: GENERATOR,
            version: VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialTrace {
    pub trial_index: u64,
    pub interactions: Vec<InteractionRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub summary: ExperimentSummary,
    pub rows: Vec<TrialRow>,
    pub traces: Option<Vec<TrialTrace>>,
}

/// Runs every trial of `config` and keeps per-trial rows. Does not write
/// anything; see [`crate::output`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let (n, m, plan, seed, trace) = (
        config.n_usize(),
        config.m_usize(),
        config.plan,
        config.seed,
        config.trace,
    );
    let outcomes = with_workers(config.workers, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| {
                run_trial(n, m, &plan, &mut RngStream::for_trial(seed, i), trace).map(|o| (i, o))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut traces = trace.then(Vec::new);
    let rows: Vec<TrialRow> = outcomes
        .into_iter()
        .map(|(i, o)| {
            if let (Some(ts), Some(t)) = (traces.as_mut(), o.trace.as_ref()) {
                ts.push(TrialTrace {
                    trial_index: i,
                    interactions: t.clone(),
                });
            }
            TrialRow {
                trial_index: i,
                completed: o.all_complete,
                missing_after_collection: o.missing_pairs_after_collection,
                missing_final: o.missing_pairs_final,
                collectors_complete: o.collectors_complete() as u64,
            }
        })
        .collect();
    let successes = rows.iter().filter(|r| r.completed).count() as u64;
    let stats = SuccessSummary::new(successes, config.trials, Z_95)?;
    Ok(ExperimentResult {
        summary: ExperimentSummary::new(config, seed, &stats),
        rows,
        traces,
    })
}

/// Success count over `trials` trials without keeping per-trial data. Uses
/// the same per-trial streams as [`run_experiment`].
pub fn count_successes(
    n: usize,
    m: usize,
    plan: &PhasePlan,
    seed: u64,
    trials: u64,
    workers: Option<usize>,
) -> Result<u64> {
    let count = with_workers(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                run_trial(n, m, plan, &mut RngStream::for_trial(seed, i), false)
                    .map(|o| u64::from(o.all_complete))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(count)
}
