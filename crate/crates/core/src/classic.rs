//! Run-until-complete variants: one collector drawing until it has every type
//! (`m = 1`), or until it has every type `m` times (the siblings variant).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UntilCompleteResult {
    pub samples_used: u64,
}

/// Draws until every one of `n` types has been seen.
pub fn samples_until_complete(n: u32, rng: &mut RngStream) -> Result<UntilCompleteResult> {
    samples_until_m_sets(n, 1, rng)
}

/// Draws until every one of `n` types has been seen at least `m` times.
///
/// Both variants consume the stream identically, one draw per sample, so on a
/// shared stream the result is non-decreasing in `m`.
pub fn samples_until_m_sets(n: u32, m: u32, rng: &mut RngStream) -> Result<UntilCompleteResult> {
    if n == 0 {
        return Err(Error::Domain("number of coupon types must be at least 1"));
    }
    if m == 0 {
        return Err(Error::Domain("number of full sets must be at least 1"));
    }
    let mut counts = vec![0u32; n as usize];
    let mut short = n;
    let mut used = 0u64;
    while short > 0 {
        let c = &mut counts[rng.below(n) as usize];
        *c += 1;
        if *c == m {
            short -= 1;
        }
        used += 1;
    }
    Ok(UntilCompleteResult { samples_used: used })
}

/// Fraction of results with `samples_used <= t`, for each threshold `t`.
pub fn empirical_cdf(results: &[UntilCompleteResult], thresholds: &[u64]) -> Result<Vec<f64>> {
    if results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted: Vec<u64> = results.iter().map(|r| r.samples_used).collect();
    sorted.sort_unstable();
    let total = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| sorted.partition_point(|&x| x <= t) as f64 / total)
        .collect())
}

/// Integer threshold `floor(n (ln n - c))`, clamped at 0.
pub fn lower_tail_threshold(n: u64, c: f64) -> u64 {
    let n = n as f64;
    libm::floor(n * (libm::log(n) - c)).max(0.0) as u64
}

/// Fraction of results with `samples_used >= n (ln n + c)`, the real-valued
/// threshold compared directly.
pub fn upper_tail_fraction(results: &[UntilCompleteResult], n: u64, c: f64) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let nf = n as f64;
    let threshold = nf * (libm::log(nf) + c);
    let hits = results
        .iter()
        .filter(|r| r.samples_used as f64 >= threshold)
        .count();
    Ok(hits as f64 / results.len() as f64)
}
