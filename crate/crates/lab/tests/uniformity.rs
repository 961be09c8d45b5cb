//! Chi-square checks that the random choices are uniform.

use coupon_core::{run_collection_phase, sample_pair, Population, RngStream};
use coupon_lab::gof::chi_square_uniform;

const DRAWS: u64 = 1_000_000;
const ALPHA: f64 = 0.001;

#[test]
fn pairs_are_uniform_over_unordered_pairs() {
    let m = 10;
    let mut counts = vec![0u64; m * (m - 1) / 2];
    let mut rng = RngStream::new(20_240_517);
    for _ in 0..DRAWS {
        let p = sample_pair(m, &mut rng).unwrap();
        let (a, b) = (p.first as usize, p.second as usize);
        assert!(a < b && b < m);
        // index of {a, b} in row-major upper-triangle order
        counts[a * (2 * m - a - 1) / 2 + (b - a - 1)] += 1;
    }
    assert!(counts.iter().all(|&c| c > 0));
    let t = chi_square_uniform(&counts).unwrap();
    assert_eq!(t.degrees_of_freedom, 44);
    assert!(t.p_value > ALPHA, "{t:?}");
}

fn coupon_draws_are_uniform(n: usize, seed: u64) {
    let mut pop = Population::new(n, 1).unwrap();
    run_collection_phase(&mut pop, DRAWS, &mut RngStream::new(seed));
    let counts: Vec<u64> = pop
        .collector(0)
        .as_slice()
        .iter()
        .map(|&c| u64::from(c))
        .collect();
    assert_eq!(counts.iter().sum::<u64>(), DRAWS);
    let t = chi_square_uniform(&counts).unwrap();
    assert!(t.p_value > ALPHA, "n={n}: {t:?}");
}

#[test]
fn coupon_draws_are_uniform_two_types() {
    coupon_draws_are_uniform(2, 11);
}

#[test]
fn coupon_draws_are_uniform_ten_types() {
    coupon_draws_are_uniform(10, 12);
}

#[test]
fn per_trial_streams_look_independent() {
    // first draw of many consecutive trial streams, n = 6
    let mut counts = [0u64; 6];
    for trial in 0..60_000 {
        let mut pop = Population::new(6, 1).unwrap();
        run_collection_phase(&mut pop, 1, &mut RngStream::for_trial(99, trial));
        let hit = pop
            .collector(0)
            .as_slice()
            .iter()
            .position(|&c| c == 1)
            .unwrap();
        counts[hit] += 1;
    }
    let t = chi_square_uniform(&counts).unwrap();
    assert!(t.p_value > ALPHA, "{t:?}");
}
