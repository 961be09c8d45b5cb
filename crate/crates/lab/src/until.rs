//! Run-until-complete experiments: the classic collector's tail behaviour and
//! the `m`-full-sets expectation, plus the growing-`m` explorer.

use rayon::prelude::*;
use serde::Serialize;

use coupon_core::bounds::{er_limit_lower, er_limit_upper, newman_shepp_expectation};
use coupon_core::classic::{
    empirical_cdf, lower_tail_threshold, samples_until_m_sets, upper_tail_fraction,
    UntilCompleteResult,
};
use coupon_core::stats::{summarize, SummaryStats};
use coupon_core::{derive_seed, Error, RngStream, GENERATOR};

use crate::error::Result;
use crate::runner::{with_workers, VERSION};
use crate::sweep::MRule;

/// Trial `i` draws from `RngStream::for_trial(seed, i)`.
pub fn run_until_complete(
    n: u32,
    m: u32,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<UntilCompleteResult>> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required").into());
    }
    let results = with_workers(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|i| samples_until_m_sets(n, m, &mut RngStream::for_trial(seed, i)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(results)
}

/// Empirical tails at `n (ln n -/+ c)` next to their limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub c: f64,
    /// `floor(n (ln n - c))`
    pub lower_threshold: u64,
    pub empirical_lower: f64,
    pub limit_lower: f64,
    pub empirical_upper: f64,
    pub limit_upper: f64,
}

pub fn tail_checks(n: u64, results: &[UntilCompleteResult], cs: &[f64]) -> Result<Vec<TailCheck>> {
    cs.iter()
        .map(|&c| {
            let lower_threshold = lower_tail_threshold(n, c);
            Ok(TailCheck {
                c,
                lower_threshold,
                empirical_lower: empirical_cdf(results, &[lower_threshold])?[0],
                limit_lower: er_limit_lower(c),
                empirical_upper: upper_tail_fraction(results, n, c)?,
                limit_upper: er_limit_upper(c),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UntilCompleteReport {
    pub n: u64,
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub generator: &'static str,
    pub version: &'static str,
    pub stats: SummaryStats,
    pub mean_over_n: f64,
    /// `n (ln n + (m - 1) ln ln n)`, when `n >= 3`.
    pub newman_shepp: Option<f64>,
    pub tails: Vec<TailCheck>,
}

pub fn until_complete_report(
    n: u32,
    m: u32,
    trials: u64,
    seed: u64,
    cs: &[f64],
    workers: Option<usize>,
) -> Result<(UntilCompleteReport, Vec<UntilCompleteResult>)> {
    let results = run_until_complete(n, m, trials, seed, workers)?;
    let values: Vec<f64> = results.iter().map(|r| r.samples_used as f64).collect();
    let stats = summarize(&values)?;
    let report = UntilCompleteReport {
        n: n.into(),
        m: m.into(),
        trials,
        seed,
        generator: GENERATOR,
        version: VERSION,
        mean_over_n: stats.mean / f64::from(n),
        stats,
        newman_shepp: newman_shepp_expectation(n.into(), m.into()).ok(),
        tails: if m == 1 {
            tail_checks(n.into(), &results, cs)?
        } else {
            Vec::new()
        },
    };
    Ok((report, results))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreRow {
    pub n: u64,
    pub m_rule: String,
    pub m: u64,
    pub trials: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub mean_over_n: f64,
    pub newman_shepp_over_n: Option<f64>,
    pub seed: u64,
}

pub const EXPLORE_CSV_HEADER: &str =
    "n,m_rule,m,trials,mean,std_dev,mean_over_n,newman_shepp_over_n,seed";

impl ExploreRow {
    pub fn csv_line(&self) -> String {
        let ns = self
            .newman_shepp_over_n
            .map(|v| v.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m_rule,
            self.m,
            self.trials,
            self.mean,
            self.std_dev,
            self.mean_over_n,
            ns,
            self.seed
        )
    }
}

/// `v_m(n) / n` as `m` grows with `n` by each rule. Purely observational:
/// no limit law is known for growing `m`.
pub fn explore(
    ns: &[u64],
    rules: &[MRule],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ExploreRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let n32 = u32::try_from(n).map_err(|_| Error::Domain("n too large"))?;
        for &rule in rules {
            let m = rule.resolve(n);
            let m32 = u32::try_from(m).map_err(|_| Error::Domain("m too large"))?;
            let cell_seed = derive_seed(seed, &[n, m]);
            let results = run_until_complete(n32, m32, trials, cell_seed, workers)?;
            let values: Vec<f64> = results.iter().map(|r| r.samples_used as f64).collect();
            let s = summarize(&values)?;
            rows.push(ExploreRow {
                n,
                m_rule: rule.to_string(),
                m,
                trials,
                mean: s.mean,
                std_dev: s.std_dev,
                mean_over_n: s.mean / n as f64,
                newman_shepp_over_n: newman_shepp_expectation(n, m).ok().map(|v| v / n as f64),
                seed: cell_seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_small_instance() {
        let (r, results) = until_complete_report(5, 1, 200, 3, &[0.0], Some(2)).unwrap();
        assert_eq!(results.len(), 200);
        assert!(results.iter().all(|x| x.samples_used >= 5));
        assert_eq!(r.tails.len(), 1);
        assert!(r.stats.min >= 5.0);
        assert!((r.mean_over_n - r.stats.mean / 5.0).abs() < 1e-12);
    }

    #[test]
    fn explorer_rows() {
        let rows = explore(
            &[20, 40],
            &[MRule::Const(2), MRule::LogN, MRule::SqrtN, MRule::LinearN],
            20,
            1,
            None,
        )
        .unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[5].m, 4);
        assert!(rows.iter().all(|r| r.mean >= (r.n * r.m) as f64));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_until_complete(3, 1, 0, 1, None).is_err());
    }
}
