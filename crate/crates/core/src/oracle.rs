//! Exact success probabilities for small instances, in rational arithmetic.
//!
//! These are ground truth for the Monte Carlo engine, so nothing in here goes
//! through floating point except the final rendering.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::strategy::{plan_transfers, Pair, StrategyId};
use crate::{Error, Result};

/// Default cap on elementary enumeration steps.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// A probability held as a reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProbability(BigRational);

impl ExactProbability {
    fn from_counts(favourable: BigUint, total: BigUint) -> Self {
        debug_assert!(favourable <= total);
        Self(BigRational::new(favourable.into(), total.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// `num / den` in lowest terms. Panics unless `0 <= num <= den` and `den > 0`.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den, "not a probability: {num}/{den}");
        Self::from_counts(num.into(), den.into())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn pow(&self, exponent: u32) -> Self {
        Self(Pow::pow(&self.0, exponent))
    }

    /// Decimal expansion with `digits` significant digits, truncated toward
    /// zero. `0` and `1` render as themselves.
    pub fn to_decimal(&self, digits: usize) -> String {
        use core::fmt::Write;
        let num = self.0.numer().magnitude();
        let den = self.0.denom().magnitude();
        if num.is_zero() {
            return "0".into();
        }
        if num == den {
            return "1".into();
        }
        let ten = BigUint::from(10u32);
        // Smallest k with num * 10^k >= den: the first significant digit sits at 10^-k.
        let mut k = 0usize;
        let mut scaled = num.clone();
        while &scaled < den {
            scaled *= &ten;
            k += 1;
        }
        let shift = Pow::pow(&ten, digits.saturating_sub(1) as u32);
        let body = (scaled * shift) / den;
        let mut out = String::from("0.");
        for _ in 1..k {
            out.push('0');
        }
        write!(out, "{body}").expect("writing to a String");
        out
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("number of coupon types must be at least 1"));
    }
    Ok(())
}

/// Probability that `samples` uniform draws over `n` types include every type,
/// by inclusion-exclusion over the set of types never drawn.
pub fn single_collector_success(n: u64, samples: u64) -> Result<ExactProbability> {
    check_n(n)?;
    let mut favourable = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=n {
        let term = &binom * BigInt::from(Pow::pow(BigUint::from(n - k), samples));
        if k % 2 == 0 {
            favourable += term;
        } else {
            favourable -= term;
        }
        binom = binom * (n - k) / (k + 1);
    }
    let total = Pow::pow(BigUint::from(n), samples);
    let favourable = favourable
        .to_biguint()
        .expect("inclusion-exclusion count is non-negative");
    Ok(ExactProbability::from_counts(favourable, total))
}

/// Probability that all `m` collectors complete on their own: independent
/// collectors, so the single-collector probability to the `m`-th power.
pub fn no_exchange_success(n: u64, m: u64, samples: u64) -> Result<ExactProbability> {
    check_n(n)?;
    if m == 0 {
        return Err(Error::Domain("number of collectors must be at least 1"));
    }
    let m = u32::try_from(m).map_err(|_| Error::Domain("too many collectors"))?;
    Ok(single_collector_success(n, samples)?.pow(m))
}

/// Probability that `draws` uniform draws over `n` types hit every type at
/// least `copies` times.
///
/// Counts sequences with the recurrence
/// `N(c, t) = sum_{j >= copies} C(t, j) N(c - 1, t - j)`, `N(0, t) = [t = 0]`.
pub fn all_coupons_at_least(
    n: u64,
    copies: u64,
    draws: u64,
    budget: u128,
) -> Result<ExactProbability> {
    check_n(n)?;
    let total = Pow::pow(BigUint::from(n), draws);
    if copies.saturating_mul(n) > draws {
        return Ok(ExactProbability::from_counts(BigUint::zero(), total));
    }
    let t_max = draws as u128;
    let required = (n as u128).saturating_mul((t_max + 1).saturating_mul(t_max + 2) / 2);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let draws = usize::try_from(draws).map_err(|_| Error::Domain("too many draws"))?;
    let copies = copies as usize;
    let mut prev = vec![BigUint::zero(); draws + 1];
    prev[0] = BigUint::one();
    for _ in 0..n {
        let mut cur = vec![BigUint::zero(); draws + 1];
        // Row t of Pascal's triangle, advanced in place as t grows.
        let mut row: Vec<BigUint> = Vec::with_capacity(draws + 1);
        for t in 0..=draws {
            row.push(BigUint::one());
            for j in (1..t).rev() {
                let left = row[j - 1].clone();
                row[j] += left;
            }
            let mut acc = BigUint::zero();
            for j in copies..=t {
                if !prev[t - j].is_zero() {
                    acc += &row[j] * &prev[t - j];
                }
            }
            cur[t] = acc;
        }
        prev = cur;
    }
    Ok(ExactProbability::from_counts(prev[draws].clone(), total))
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Size of the full two-phase enumeration: joint collection outcomes times
/// pair sequences.
pub fn two_phase_enumeration_size(n: u64, m: u64, samples: u64, interactions: u64) -> u128 {
    let compositions = binomial_u128(samples as u128 + n as u128 - 1, n as u128 - 1);
    let pairs = (m as u128) * (m as u128).saturating_sub(1) / 2;
    let mut size = 1u128;
    for _ in 0..m {
        size = size.saturating_mul(compositions);
    }
    for _ in 0..interactions {
        size = size.saturating_mul(pairs);
    }
    size
}

/// Every composition of `total` into `parts` non-negative parts, with its
/// multinomial coefficient `total! / prod(k_i!)`.
fn weighted_compositions(total: u32, parts: usize) -> Vec<(Vec<u32>, BigUint)> {
    fn rec(
        remaining: u32,
        parts: usize,
        prefix: &mut Vec<u32>,
        weight: BigUint,
        out: &mut Vec<(Vec<u32>, BigUint)>,
    ) {
        if prefix.len() + 1 == parts {
            prefix.push(remaining);
            out.push((prefix.clone(), weight));
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            // C(remaining, k) ways to place this part's draws among those left.
            let ways = binomial_big(remaining, k);
            prefix.push(k);
            rec(remaining - k, parts, prefix, &weight * ways, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        total,
        parts,
        &mut Vec::with_capacity(parts),
        BigUint::one(),
        &mut out,
    );
    out
}

fn binomial_big(n: u32, k: u32) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Sorts collectors so that states equal up to relabelling merge. Pairs are
/// drawn uniformly, so the process is exchangeable in the collector labels.
fn canonical(mut state: Vec<u32>, n: usize) -> Vec<u32> {
    let mut rows: Vec<&[u32]> = state.chunks(n).collect();
    rows.sort_unstable();
    let sorted: Vec<u32> = rows.concat();
    state.copy_from_slice(&sorted);
    state
}

/// Exact probability that the full two-phase process leaves every collector
/// complete.
///
/// Sums, over every joint outcome of the collection phase, its multinomial
/// probability times the fraction of pair sequences after which the strategy
/// has completed everyone. Equal intermediate states are merged, so the work
/// done is usually far below [`two_phase_enumeration_size`], but the budget is
/// checked against that full size.
pub fn two_phase_success(
    n: u64,
    m: u64,
    samples: u64,
    interactions: u64,
    strategy: StrategyId,
    budget: u128,
) -> Result<ExactProbability> {
    check_n(n)?;
    if m == 0 {
        return Err(Error::Domain("number of collectors must be at least 1"));
    }
    if interactions > 0 && m < 2 {
        return Err(Error::Domain(
            "an exchange phase needs at least 2 collectors",
        ));
    }
    let required = two_phase_enumeration_size(n, m, samples, interactions);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let n_us = n as usize;
    let m_us = m as usize;
    let samples32 = u32::try_from(samples).map_err(|_| Error::Domain("too many samples"))?;

    // Joint collection outcomes, built one collector at a time.
    let per_collector = weighted_compositions(samples32, n_us);
    let mut states: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    states.insert(Vec::new(), BigUint::one());
    for _ in 0..m_us {
        let mut next = BTreeMap::new();
        for (prefix, w) in &states {
            for (counts, cw) in &per_collector {
                let mut s = prefix.clone();
                s.extend_from_slice(counts);
                *next.entry(s).or_insert_with(BigUint::zero) += w * cw;
            }
        }
        states = next;
    }
    let mut states: BTreeMap<Vec<u32>, BigUint> =
        states.into_iter().fold(BTreeMap::new(), |mut acc, (s, w)| {
            *acc.entry(canonical(s, n_us)).or_insert_with(BigUint::zero) += w;
            acc
        });

    let pairs: Vec<Pair> = (0..m as u32)
        .flat_map(|i| {
            (i + 1..m as u32).map(move |j| Pair {
                first: i,
                second: j,
            })
        })
        .collect();
    let mut buf = Vec::new();
    for _ in 0..interactions {
        let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (state, w) in &states {
            for &pair in &pairs {
                let (fi, si) = (pair.first as usize * n_us, pair.second as usize * n_us);
                buf.clear();
                plan_transfers(
                    strategy,
                    pair,
                    &state[fi..fi + n_us],
                    &state[si..si + n_us],
                    &mut buf,
                );
                let mut s = state.clone();
                for t in &buf {
                    s[t.from as usize * n_us + t.coupon as usize] -= 1;
                    s[t.to as usize * n_us + t.coupon as usize] += 1;
                }
                *next.entry(canonical(s, n_us)).or_insert_with(BigUint::zero) += w;
            }
        }
        states = next;
    }

    let favourable: BigUint = states
        .iter()
        .filter(|(s, _)| s.iter().all(|&k| k > 0))
        .map(|(_, w)| w)
        .sum();
    let total = Pow::pow(BigUint::from(n), samples * m)
        * Pow::pow(BigUint::from(pairs.len()), interactions);
    Ok(ExactProbability::from_counts(favourable, total))
}
