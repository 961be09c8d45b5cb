//! Collector state: how many copies of each coupon type every collector holds.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Copy counts of one collector, indexed by coupon type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct CouponCounts(Vec<u32>);

impl CouponCounts {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, coupon: usize) -> u32 {
        self.0[coupon]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Number of coupon types this collector holds no copy of.
    pub fn missing(&self) -> usize {
        self.0.iter().filter(|&&c| c == 0).count()
    }

    pub fn is_full(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    #[inline]
    pub(crate) fn add_one(&mut self, coupon: usize) {
        self.0[coupon] += 1;
    }

    #[inline]
    pub(crate) fn remove_one(&mut self, coupon: usize) {
        self.0[coupon] -= 1;
    }
}

impl From<Vec<u32>> for CouponCounts {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl AsRef<[u32]> for CouponCounts {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

/// State of all `m` collectors over `n` coupon types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Population {
    n: usize,
    collectors: Vec<CouponCounts>,
}

impl Population {
    /// `m` collectors holding nothing.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("number of coupon types must be at least 1"));
        }
        if m == 0 {
            return Err(Error::Domain("number of collectors must be at least 1"));
        }
        Ok(Self {
            n,
            collectors: vec![CouponCounts::zeros(n); m],
        })
    }

    /// Builds a population from explicit count vectors, one per collector.
    pub fn from_counts<I, C>(collectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: Into<CouponCounts>,
    {
        let collectors: Vec<CouponCounts> = collectors.into_iter().map(Into::into).collect();
        let n = collectors.first().map_or(0, CouponCounts::len);
        if collectors.is_empty() {
            return Err(Error::Domain("number of collectors must be at least 1"));
        }
        if n == 0 {
            return Err(Error::Domain("number of coupon types must be at least 1"));
        }
        if collectors.iter().any(|c| c.len() != n) {
            return Err(Error::Domain(
                "all collectors must track the same coupon types",
            ));
        }
        Ok(Self { n, collectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.collectors.len()
    }

    pub fn collectors(&self) -> &[CouponCounts] {
        &self.collectors
    }

    pub fn collector(&self, index: usize) -> &CouponCounts {
        &self.collectors[index]
    }

    /// Number of `(coupon, collector)` pairs where the collector holds no copy.
    pub fn missing_pairs(&self) -> u64 {
        self.collectors.iter().map(|c| c.missing() as u64).sum()
    }

    /// True iff every collector holds every coupon type.
    pub fn is_complete(&self) -> bool {
        self.collectors.iter().all(CouponCounts::is_full)
    }

    /// Copies of each coupon type summed over all collectors.
    pub fn coupon_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n];
        for c in &self.collectors {
            for (t, &k) in totals.iter_mut().zip(c.as_slice()) {
                *t += u64::from(k);
            }
        }
        totals
    }

    /// Number of collectors holding at least `threshold` copies of `coupon`.
    pub fn holders_with_at_least(&self, coupon: usize, threshold: u32) -> usize {
        self.collectors
            .iter()
            .filter(|c| c.get(coupon) >= threshold)
            .count()
    }

    pub(crate) fn collector_mut(&mut self, index: usize) -> &mut CouponCounts {
        &mut self.collectors[index]
    }

    /// Mutable access to two distinct collectors.
    pub(crate) fn pair_mut(
        &mut self,
        a: usize,
        b: usize,
    ) -> (&mut CouponCounts, &mut CouponCounts) {
        assert_ne!(a, b);
        if a < b {
            let (lo, hi) = self.collectors.split_at_mut(b);
            (&mut lo[a], &mut hi[0])
        } else {
            let (lo, hi) = self.collectors.split_at_mut(a);
            (&mut hi[0], &mut lo[b])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_population_misses_everything() {
        let pop = Population::new(4, 3).unwrap();
        assert_eq!(pop.missing_pairs(), 12);
        assert!(!pop.is_complete());
        let single = Population::new(1, 1).unwrap();
        assert_eq!(single.missing_pairs(), 1);
    }

    #[test]
    fn zero_sizes_are_rejected() {
        assert!(matches!(Population::new(0, 2), Err(Error::Domain(_))));
        assert!(matches!(Population::new(2, 0), Err(Error::Domain(_))));
        assert!(Population::from_counts(Vec::<Vec<u32>>::new()).is_err());
        assert!(Population::from_counts([vec![1, 2], vec![1]]).is_err());
    }

    #[test]
    fn counts_missing_pairs_directly() {
        let pop = Population::from_counts([vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(pop.missing_pairs(), 2);
        assert!(!pop.is_complete());
        assert_eq!(pop.coupon_totals(), vec![1, 2]);
    }

    #[test]
    fn completeness() {
        assert!(Population::from_counts([vec![1, 1], vec![1, 1]])
            .unwrap()
            .is_complete());
        assert!(!Population::from_counts([vec![1, 1], vec![1, 0]])
            .unwrap()
            .is_complete());
        let one = Population::from_counts([vec![5]]).unwrap();
        assert!(one.is_complete());
        assert_eq!(one.missing_pairs(), 0);
    }

    #[test]
    fn pair_mut_returns_requested_order() {
        let mut pop = Population::from_counts([vec![1], vec![2], vec![3]]).unwrap();
        let (a, b) = pop.pair_mut(2, 0);
        assert_eq!((a.get(0), b.get(0)), (3, 1));
        let (a, b) = pop.pair_mut(0, 1);
        assert_eq!((a.get(0), b.get(0)), (1, 2));
    }
}
