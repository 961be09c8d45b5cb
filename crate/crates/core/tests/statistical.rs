//! Monte Carlo checks with analytically known answers.

use coupon_core::classic::{samples_until_complete, samples_until_m_sets};
use coupon_core::stats::{wilson_interval, SuccessSummary, Z_95, Z_999};
use coupon_core::{run_trial, sample_pair, Pair, PhasePlan, RngStream, StrategyId};

#[test]
fn two_by_two_success_rate_is_a_quarter() {
    let plan = PhasePlan::new(2, 0, StrategyId::SurplusToNeedy);
    let trials = 100_000u64;
    let successes = (0..trials)
        .filter(|&t| {
            run_trial(2, 2, &plan, &mut RngStream::for_trial(17, t), false)
                .unwrap()
                .all_complete
        })
        .count() as u64;
    let s = SuccessSummary::new(successes, trials, Z_999).unwrap();
    assert!(s.covers(0.25), "{s:?}");
}

#[test]
fn three_collectors_pair_uniformly() {
    let mut rng = RngStream::new(99);
    let draws = 300_000u64;
    let mut seen = [0u64; 3];
    for _ in 0..draws {
        match sample_pair(3, &mut rng).unwrap() {
            Pair {
                first: 0,
                second: 1,
            } => seen[0] += 1,
            Pair {
                first: 0,
                second: 2,
            } => seen[1] += 1,
            Pair {
                first: 1,
                second: 2,
            } => seen[2] += 1,
            other => panic!("impossible pair {other:?}"),
        }
    }
    for k in seen {
        let (lo, hi) = wilson_interval(k, draws, Z_999).unwrap();
        assert!(lo <= 1.0 / 3.0 && 1.0 / 3.0 <= hi, "{seen:?}");
    }
}

#[test]
fn two_coupon_classic_mean_is_three() {
    // n H_n = 2 (1 + 1/2) = 3; the standard deviation is sqrt(2), so the
    // mean of 10^5 draws has standard error 0.0045.
    let trials = 100_000u64;
    let mean = |m: u32| {
        (0..trials)
            .map(|t| {
                samples_until_m_sets(2, m, &mut RngStream::for_trial(5, t))
                    .unwrap()
                    .samples_used
            })
            .sum::<u64>() as f64
            / trials as f64
    };
    let classic = (0..trials)
        .map(|t| {
            samples_until_complete(2, &mut RngStream::for_trial(6, t))
                .unwrap()
                .samples_used
        })
        .sum::<u64>() as f64
        / trials as f64;
    assert!((classic - 3.0).abs() < 0.05, "{classic}");
    assert!((mean(1) - 3.0).abs() < 0.05);
}

#[test]
fn wilson_interval_covers_half_often_enough() {
    let mut rng = RngStream::new(2024);
    let mut covered = 0;
    for _ in 0..1000 {
        let heads = (0..1000).filter(|_| rng.below(2) == 1).count() as u64;
        let (lo, hi) = wilson_interval(heads, 1000, Z_95).unwrap();
        if lo <= 0.5 && 0.5 <= hi {
            covered += 1;
        }
    }
    assert!(covered >= 930, "coverage {covered}/1000");
}
