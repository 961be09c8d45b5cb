//! Success fractions with Wilson intervals and order-statistic summaries.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Two-sided 99.9% normal quantile.
pub const Z_999: f64 = 3.290_526_731_491_926;

/// Wilson score interval for `successes` out of `trials`, clipped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Domain("Wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::Domain("more successes than trials"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain("z must be positive and finite"));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // At the edges the closed form reaches 0 or 1 exactly; avoid rounding past p.
    let low = if successes == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let high = if successes == trials {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    Ok((low, high))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuccessSummary {
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub z: f64,
}

impl SuccessSummary {
    pub fn new(successes: u64, trials: u64, z: f64) -> Result<Self> {
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, z)?;
        Ok(Self {
            trials,
            successes,
            fraction: successes as f64 / trials as f64,
            wilson_low,
            wilson_high,
            z,
        })
    }

    /// Pools two summaries computed at the same `z`.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.z.to_bits() != other.z.to_bits() {
            return Err(Error::Domain("cannot merge summaries with different z"));
        }
        Self::new(
            self.successes + other.successes,
            self.trials + other.trials,
            self.z,
        )
    }

    pub fn failure_fraction(&self) -> f64 {
        (self.trials - self.successes) as f64 / self.trials as f64
    }

    /// True if `p` lies in the closed Wilson interval.
    pub fn covers(&self, p: f64) -> bool {
        self.wilson_low <= p && p <= self.wilson_high
    }
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    pub count: u64,
    pub mean: f64,
    /// Sample standard deviation (`count - 1` denominator); 0 for one value.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    /// Nearest-rank quantiles at [`QUANTILE_LEVELS`].
    pub quantiles: [f64; 5],
}

/// Summary statistics with nearest-rank quantiles (`ceil(q * count)`-th
/// smallest value). Values are sorted before summing, so the result does not
/// depend on input order.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    let mut sorted = values.to_vec();
    summarize_in_place(&mut sorted)
}

fn summarize_in_place(sorted: &mut [f64]) -> Result<SummaryStats> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if sorted.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in summary input"));
    }
    sorted.sort_unstable_by(f64::total_cmp);
    let count = sorted.len();
    let nf = count as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let std_dev = if count > 1 {
        libm::sqrt(sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0))
    } else {
        0.0
    };
    let quantiles = QUANTILE_LEVELS.map(|q| {
        let rank = (libm::ceil(q * nf) as usize).clamp(1, count);
        sorted[rank - 1]
    });
    Ok(SummaryStats {
        count: count as u64,
        mean,
        std_dev,
        min: sorted[0],
        max: sorted[count - 1],
        quantiles,
    })
}

/// A mergeable multiset of observations. Quantiles need every value, so the
/// partials keep them all.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueSample {
    values: Vec<f64>,
}

impl ValueSample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.values.push(value);
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.values.extend(other.values);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn summarize(&self) -> Result<SummaryStats> {
        summarize(&self.values)
    }
}

impl FromIterator<f64> for ValueSample {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}
