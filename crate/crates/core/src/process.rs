//! The two-phase process: a collection phase followed by an exchange phase.

use alloc::vec;
use alloc::vec::Vec;

use crate::population::Population;
use crate::strategy::{plan_transfers, Pair, StrategyId, Transfer};
use crate::{Error, Result, RngStream};

/// How many pairwise interactions the exchange phase runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExchangeRounds {
    Finite(u64),
    /// Interact until no pair could ever transfer again. Only defined for
    /// strategies whose quiescence can be tracked: `SurplusToNeedy` and `Null`.
    Unlimited,
}

impl ExchangeRounds {
    pub fn is_zero(self) -> bool {
        self == Self::Finite(0)
    }
}

impl From<u64> for ExchangeRounds {
    fn from(rounds: u64) -> Self {
        Self::Finite(rounds)
    }
}

/// `(r_c, r_e, strategy)` for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePlan {
    /// Samples drawn by every collector in the collection phase (`r_c`).
    pub samples_per_collector: u64,
    /// Pairwise interactions in the exchange phase (`r_e`).
    pub interactions: ExchangeRounds,
    pub strategy: StrategyId,
}

impl PhasePlan {
    pub fn new(
        samples_per_collector: u64,
        interactions: impl Into<ExchangeRounds>,
        strategy: StrategyId,
    ) -> Self {
        Self {
            samples_per_collector,
            interactions: interactions.into(),
            strategy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteractionRecord {
    pub round: u64,
    pub pair: Pair,
    pub transfers: Vec<Transfer>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeReport {
    /// Interactions actually executed.
    pub interactions: u64,
    pub trace: Option<Vec<InteractionRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrialOutcome {
    pub all_complete: bool,
    pub per_collector_complete: Vec<bool>,
    pub missing_pairs_after_collection: u64,
    pub missing_pairs_final: u64,
    pub interactions: u64,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub trace: Option<Vec<InteractionRecord>>,
}

impl TrialOutcome {
    pub fn collectors_complete(&self) -> usize {
        self.per_collector_complete.iter().filter(|&&c| c).count()
    }
}

/// Every collector draws `samples` coupons uniformly with replacement. Counts
/// are added to whatever the population already holds. Collectors draw in
/// index order from the shared stream.
pub fn run_collection_phase(pop: &mut Population, samples: u64, rng: &mut RngStream) {
    let n = u32::try_from(pop.n()).expect("coupon types fit in u32");
    for v in 0..pop.m() {
        let counts = pop.collector_mut(v);
        for _ in 0..samples {
            counts.add_one(rng.below(n) as usize);
        }
    }
}

/// Uniformly random unordered pair of distinct collectors out of `m`.
pub fn sample_pair(m: usize, rng: &mut RngStream) -> Result<Pair> {
    if m < 2 {
        return Err(Error::Domain("an interaction needs at least 2 collectors"));
    }
    let m = u32::try_from(m).map_err(|_| Error::Domain("too many collectors"))?;
    let i = rng.below(m);
    let mut j = rng.below(m - 1);
    if j >= i {
        j += 1;
    }
    Ok(Pair::new(i, j).expect("distinct by construction"))
}

/// Per-coupon counts of collectors with zero copies and with two or more,
/// for detecting when `SurplusToNeedy` can no longer fire anywhere.
struct SurplusTracker {
    zeros: Vec<u32>,
    surplus: Vec<u32>,
    live: usize,
}

impl SurplusTracker {
    fn new(pop: &Population) -> Self {
        let n = pop.n();
        let mut zeros = vec![0u32; n];
        let mut surplus = vec![0u32; n];
        for c in pop.collectors() {
            for (i, &k) in c.as_slice().iter().enumerate() {
                match k {
                    0 => zeros[i] += 1,
                    1 => {}
                    _ => surplus[i] += 1,
                }
            }
        }
        let live = (0..n).filter(|&i| zeros[i] > 0 && surplus[i] > 0).count();
        Self {
            zeros,
            surplus,
            live,
        }
    }

    /// Records one transfer; `giver_before` and `receiver_before` are the
    /// counts prior to it.
    fn record(&mut self, coupon: usize, giver_before: u32, receiver_before: u32) {
        let was_live = self.zeros[coupon] > 0 && self.surplus[coupon] > 0;
        match giver_before {
            2 => self.surplus[coupon] -= 1,
            1 => self.zeros[coupon] += 1,
            _ => {}
        }
        match receiver_before {
            0 => self.zeros[coupon] -= 1,
            1 => self.surplus[coupon] += 1,
            _ => {}
        }
        let is_live = self.zeros[coupon] > 0 && self.surplus[coupon] > 0;
        match (was_live, is_live) {
            (true, false) => self.live -= 1,
            (false, true) => self.live += 1,
            _ => {}
        }
    }

    fn quiescent(&self) -> bool {
        self.live == 0
    }
}

/// Runs the exchange phase in place.
///
/// Each interaction samples a pair with [`sample_pair`], plans transfers with
/// the strategy on the pair's current counts and commits them before the next
/// interaction.
pub fn run_exchange_phase(
    pop: &mut Population,
    rounds: ExchangeRounds,
    strategy: StrategyId,
    rng: &mut RngStream,
    record_trace: bool,
) -> Result<ExchangeReport> {
    validate_exchange(pop.m(), rounds, strategy)?;
    let mut trace = record_trace.then(Vec::new);
    let mut buf = Vec::new();

    let (limit, mut tracker) = match rounds {
        ExchangeRounds::Finite(r) => (r, None),
        // Null is quiescent from the start.
        ExchangeRounds::Unlimited if strategy == StrategyId::Null => (0, None),
        ExchangeRounds::Unlimited => (u64::MAX, Some(SurplusTracker::new(pop))),
    };

    let mut executed = 0u64;
    while executed < limit {
        if tracker.as_ref().is_some_and(SurplusTracker::quiescent) {
            break;
        }
        let pair = sample_pair(pop.m(), rng)?;
        let (a, b) = pop.pair_mut(pair.first as usize, pair.second as usize);
        buf.clear();
        plan_transfers(strategy, pair, a.as_slice(), b.as_slice(), &mut buf);
        for t in &buf {
            let coupon = t.coupon as usize;
            let (giver, receiver) = if t.from == pair.first {
                (&mut *a, &mut *b)
            } else {
                (&mut *b, &mut *a)
            };
            if let Some(tr) = tracker.as_mut() {
                tr.record(coupon, giver.get(coupon), receiver.get(coupon));
            }
            giver.remove_one(coupon);
            receiver.add_one(coupon);
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(InteractionRecord {
                round: executed,
                pair,
                transfers: buf.clone(),
            });
        }
        executed += 1;
    }

    Ok(ExchangeReport {
        interactions: executed,
        trace,
    })
}

fn validate_exchange(m: usize, rounds: ExchangeRounds, strategy: StrategyId) -> Result<()> {
    if !rounds.is_zero() && m < 2 {
        return Err(Error::Domain(
            "an exchange phase needs at least 2 collectors",
        ));
    }
    if rounds == ExchangeRounds::Unlimited && strategy == StrategyId::MutualBarter {
        return Err(Error::Domain(
            "unlimited exchanges are not supported for MutualBarter",
        ));
    }
    Ok(())
}

/// Fresh population, collection phase, exchange phase.
pub fn run_trial(
    n: usize,
    m: usize,
    plan: &PhasePlan,
    rng: &mut RngStream,
    record_trace: bool,
) -> Result<TrialOutcome> {
    let mut pop = Population::new(n, m)?;
    validate_exchange(m, plan.interactions, plan.strategy)?;
    run_collection_phase(&mut pop, plan.samples_per_collector, rng);
    let missing_pairs_after_collection = pop.missing_pairs();

    let report = run_exchange_phase(
        &mut pop,
        plan.interactions,
        plan.strategy,
        rng,
        record_trace,
    )?;

    let per_collector_complete: Vec<bool> = pop.collectors().iter().map(|c| c.is_full()).collect();
    let missing_pairs_final = pop.missing_pairs();
    Ok(TrialOutcome {
        all_complete: missing_pairs_final == 0,
        per_collector_complete,
        missing_pairs_after_collection,
        missing_pairs_final,
        interactions: report.interactions,
        trace: report.trace,
    })
}
