//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use coupon_core::bounds::{
    er_limit_lower, er_limit_upper, newman_shepp_expectation, rc_main_ub, rc_no_exchange_ub,
    rc_unlimited_ub, re_main_ub,
};
use coupon_core::classic::{empirical_cdf, lower_tail_threshold, upper_tail_fraction};
use coupon_core::oracle::{no_exchange_success, two_phase_success, DEFAULT_BUDGET};
use coupon_core::stats::{wilson_interval, Z_999};
use coupon_core::{
    derive_seed, run_collection_phase, run_exchange_phase, sample_pair, ExchangeRounds, PhasePlan,
    Population, RngStream, StrategyId,
};
use coupon_lab::config::RoundSpec;
use coupon_lab::gof::chi_square_uniform;
use coupon_lab::runner::{count_successes, run_experiment};
use coupon_lab::until::run_until_complete;
use coupon_lab::ExperimentConfig;

const SEED: u64 = 0x00c0_ffee;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Monte Carlo success count for one cell, seeded by criterion and cell.
fn successes(criterion: u64, n: u64, m: u64, plan: PhasePlan, trials: u64) -> u64 {
    let re = match plan.interactions {
        ExchangeRounds::Finite(r) => r,
        ExchangeRounds::Unlimited => u64::MAX,
    };
    let seed = derive_seed(SEED, &[criterion, n, m, plan.samples_per_collector, re]);
    count_successes(n as usize, m as usize, &plan, seed, trials, None).expect("valid plan")
}

fn no_exchange_coverage() -> Outcome {
    let trials = 100_000;
    let mut misses = Vec::new();
    let mut cells = 0;
    for n in 1..=4u64 {
        for m in 1..=3u64 {
            for rc in 0..=6u64 {
                cells += 1;
                let plan = PhasePlan::new(rc, 0, StrategyId::SurplusToNeedy);
                let k = successes(1, n, m, plan, trials);
                let exact = no_exchange_success(n, m, rc).unwrap().to_f64();
                let (lo, hi) = wilson_interval(k, trials, Z_999).unwrap();
                if !(lo <= exact && exact <= hi) {
                    misses.push(format!(
                        "(n={n}, m={m}, rc={rc}): exact {exact:.6} not in [{lo:.6}, {hi:.6}]"
                    ));
                }
            }
        }
    }
    let detail = if misses.is_empty() {
        format!("all {cells} cells covered by the 99.9% Wilson interval ({trials} trials each)")
    } else {
        format!(
            "{} of {cells} cells missed: {}",
            misses.len(),
            misses.join("; ")
        )
    };
    Outcome::new(misses.is_empty(), detail)
}

fn two_phase_coverage() -> Outcome {
    let trials = 100_000;
    let mut misses = Vec::new();
    for rc in 1..=3u64 {
        for re in 0..=3u64 {
            let plan = PhasePlan::new(rc, re, StrategyId::SurplusToNeedy);
            let k = successes(2, 2, 2, plan, trials);
            let exact = two_phase_success(2, 2, rc, re, StrategyId::SurplusToNeedy, DEFAULT_BUDGET)
                .unwrap()
                .to_f64();
            let (lo, hi) = wilson_interval(k, trials, Z_999).unwrap();
            if !(lo <= exact && exact <= hi) {
                misses.push(format!(
                    "(rc={rc}, re={re}): exact {exact:.6} not in [{lo:.6}, {hi:.6}]"
                ));
            }
        }
    }
    let detail = if misses.is_empty() {
        format!("n=2 m=2 SurplusToNeedy: all 12 cells covered ({trials} trials each)")
    } else {
        misses.join("; ")
    };
    Outcome::new(misses.is_empty(), detail)
}

fn failure_at_most(
    criterion: u64,
    n: u64,
    m: u64,
    rc: u64,
    re: u64,
    trials: u64,
    limit: f64,
) -> Outcome {
    let k = successes(
        criterion,
        n,
        m,
        PhasePlan::new(rc, re, StrategyId::SurplusToNeedy),
        trials,
    );
    let failure = (trials - k) as f64 / trials as f64;
    Outcome::new(
        failure <= limit,
        format!(
            "n={n} m={m} rc={rc} re={re}: failure {failure:.5} <= {limit} over {trials} trials"
        ),
    )
}

fn lower_regime_fails() -> Outcome {
    let (n, m, rc, trials) = (50, 50, 70, 5_000);
    let k = successes(
        5,
        n,
        m,
        PhasePlan::new(rc, 0, StrategyId::SurplusToNeedy),
        trials,
    );
    let fraction = k as f64 / trials as f64;
    Outcome::new(
        fraction <= 0.01,
        format!("n={n} m={m} rc={rc} re=0: success {fraction:.5} <= 0.01 over {trials} trials"),
    )
}

fn classic_tails() -> Outcome {
    let (n, trials) = (2000u32, 20_000);
    let results = run_until_complete(n, 1, trials, derive_seed(SEED, &[6]), None).unwrap();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for c in [-1.0, 0.0, 1.0] {
        let lower = empirical_cdf(&results, &[lower_tail_threshold(n.into(), c)]).unwrap()[0];
        let upper = upper_tail_fraction(&results, n.into(), c).unwrap();
        let dl = (lower - er_limit_lower(c)).abs();
        let du = (upper - er_limit_upper(c)).abs();
        worst = worst.max(dl).max(du);
        parts.push(format!("c={c}: |dlower|={dl:.4} |dupper|={du:.4}"));
    }
    Outcome::new(
        worst <= 0.03,
        format!("n={n}, {trials} trials, {}", parts.join(", ")),
    )
}

fn m_sets_mean() -> Outcome {
    let (n, trials) = (1000u32, 2000);
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [2u32, 3] {
        let results =
            run_until_complete(n, m, trials, derive_seed(SEED, &[7, m.into()]), None).unwrap();
        let mean = results.iter().map(|r| r.samples_used as f64).sum::<f64>() / trials as f64;
        let target = newman_shepp_expectation(n.into(), m.into()).unwrap();
        let ok = (mean - target).abs() <= 3.0 * f64::from(n);
        pass &= ok;
        parts.push(format!(
            "m={m}: mean {mean:.1} vs {target:.1} +/- {}",
            3 * n
        ));
    }
    Outcome::new(
        pass,
        format!("n={n}, {trials} trials, {}", parts.join(", ")),
    )
}

fn counts_of(pop: &Population) -> Vec<Vec<u32>> {
    pop.collectors()
        .iter()
        .map(|c| c.as_slice().to_vec())
        .collect()
}

fn missing(counts: &[Vec<u32>]) -> u64 {
    counts.iter().flatten().filter(|&&c| c == 0).count() as u64
}

/// Conservation, trace replay, monotone missing pairs and the surplus-holder
/// floor over randomized small instances.
fn randomized_invariants() -> Result<String, String> {
    let trials = 10_000u64;
    let mut picker = RngStream::new(derive_seed(SEED, &[8, 0]));
    let mut stn = 0;
    for t in 0..trials {
        let n = 1 + picker.below(8) as usize;
        let m = 1 + picker.below(8) as usize;
        let rc = u64::from(picker.below(25));
        let strategy = StrategyId::ALL[picker.below(3) as usize];
        let rounds = match (m, picker.below(10)) {
            (1, _) => ExchangeRounds::Finite(0),
            (_, 0) if strategy != StrategyId::MutualBarter => ExchangeRounds::Unlimited,
            _ => ExchangeRounds::Finite(picker.below(40).into()),
        };
        let ctx = || format!("trial {t}: n={n} m={m} rc={rc} {rounds:?} {strategy}");

        let mut rng = RngStream::for_trial(derive_seed(SEED, &[8, 1]), t);
        let mut pop = Population::new(n, m).unwrap();
        run_collection_phase(&mut pop, rc, &mut rng);
        let totals = pop.coupon_totals();
        let floors: Vec<i64> = (0..n)
            .map(|c| {
                pop.holders_with_at_least(c, 2) as i64
                    - (m - pop.holders_with_at_least(c, 1)) as i64
            })
            .collect();
        let mut counts = counts_of(&pop);
        let report = run_exchange_phase(&mut pop, rounds, strategy, &mut rng, true)
            .map_err(|e| format!("{}: {e}", ctx()))?;

        if pop.coupon_totals() != totals {
            return Err(format!("{}: coupon totals changed", ctx()));
        }
        if strategy == StrategyId::SurplusToNeedy {
            stn += 1;
        }
        for rec in report.trace.unwrap() {
            let before = missing(&counts);
            for tr in &rec.transfers {
                let (from, to, c) = (tr.from as usize, tr.to as usize, tr.coupon as usize);
                if counts[from][c] == 0 {
                    return Err(format!(
                        "{}: round {} gives a coupon it does not hold",
                        ctx(),
                        rec.round
                    ));
                }
                counts[from][c] -= 1;
                counts[to][c] += 1;
            }
            if strategy == StrategyId::SurplusToNeedy {
                if missing(&counts) > before {
                    return Err(format!(
                        "{}: missing pairs rose in round {}",
                        ctx(),
                        rec.round
                    ));
                }
                for (c, &floor) in floors.iter().enumerate() {
                    let surplus = counts.iter().filter(|v| v[c] >= 2).count() as i64;
                    if surplus < floor {
                        return Err(format!(
                            "{}: coupon {c} surplus holders {surplus} < floor {floor}",
                            ctx()
                        ));
                    }
                }
            }
        }
        if counts != counts_of(&pop) {
            return Err(format!(
                "{}: replaying the trace does not reproduce the final state",
                ctx()
            ));
        }
    }
    Ok(format!(
        "{trials} randomized trials ({stn} SurplusToNeedy traces checked)"
    ))
}

fn worker_invariance() -> Result<String, String> {
    let cases = [
        (
            6,
            4,
            RoundSpec::Count(9),
            RoundSpec::Count(15),
            StrategyId::SurplusToNeedy,
        ),
        (
            5,
            3,
            RoundSpec::Count(7),
            RoundSpec::Count(10),
            StrategyId::MutualBarter,
        ),
        (
            8,
            5,
            RoundSpec::Count(12),
            RoundSpec::Unlimited,
            StrategyId::SurplusToNeedy,
        ),
        (
            4,
            2,
            RoundSpec::Count(4),
            RoundSpec::Count(3),
            StrategyId::Null,
        ),
    ];
    for (n, m, rc, re, s) in cases {
        let render = |workers: usize| {
            let mut cfg =
                ExperimentConfig::new(n, m, rc, re, s, 2_000, derive_seed(SEED, &[8, 2])).unwrap();
            cfg.workers = Some(workers);
            cfg.trace = true;
            cfg.out = Some("unused".into());
            let r = run_experiment(&cfg).unwrap();
            serde_json::to_string(&(&r.summary, &r.rows, &r.traces)).unwrap()
        };
        let single = render(1);
        for workers in [2, 8] {
            if render(workers) != single {
                return Err(format!(
                    "n={n} m={m} {s}: {workers} workers differ from 1 worker"
                ));
            }
        }
    }
    Ok("1, 2 and 8 workers give identical rows and traces".into())
}

fn pair_uniformity() -> Result<String, String> {
    let (m, draws) = (10usize, 1_000_000);
    let mut counts = vec![0u64; m * m];
    let mut rng = RngStream::new(derive_seed(SEED, &[8, 3]));
    for _ in 0..draws {
        let p = sample_pair(m, &mut rng).unwrap();
        counts[p.first as usize * m + p.second as usize] += 1;
    }
    let cells: Vec<u64> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .map(|(a, b)| counts[a * m + b])
        .collect();
    if cells.iter().sum::<u64>() != draws {
        return Err("sampled pairs outside first < second".into());
    }
    let t = chi_square_uniform(&cells).unwrap();
    if t.p_value > 0.001 {
        Ok(format!(
            "pair chi-square p={:.4} over {draws} draws",
            t.p_value
        ))
    } else {
        Err(format!("pair chi-square p={:.2e} <= 0.001", t.p_value))
    }
}

fn invariants() -> Outcome {
    let parts = [
        randomized_invariants(),
        worker_invariance(),
        pair_uniformity(),
    ];
    let pass = parts.iter().all(Result::is_ok);
    let detail = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("FAILED {e}")))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, detail)
}

fn spot_values() -> Outcome {
    let got = [
        (
            "rc_no_exchange_ub(50,20)",
            rc_no_exchange_ub(50, 20).unwrap(),
            691,
        ),
        ("rc_main_ub(50,20)", rc_main_ub(50, 20).unwrap(), 2153),
        ("re_main_ub(50,20)", re_main_ub(50, 20).unwrap(), 829),
        (
            "rc_unlimited_ub(50,20)",
            rc_unlimited_ub(50, 20).unwrap(),
            957,
        ),
    ];
    let limit = er_limit_lower(0.0);
    let mut pass = (limit - 0.367_879).abs() <= 1e-6;
    let mut parts: Vec<String> = got
        .iter()
        .map(|&(name, v, want)| {
            pass &= v == want;
            format!("{name}={v}")
        })
        .collect();
    parts.push(format!("er_limit_lower(0)={limit:.6}"));
    Outcome::new(pass, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            1,
            "no-exchange MC matches exact probability",
            no_exchange_coverage,
        ),
        (
            2,
            "two-phase MC matches exact probability",
            two_phase_coverage,
        ),
        (3, "no-exchange upper regime rarely fails", || {
            failure_at_most(3, 50, 20, 691, 0, 20_000, 0.002)
        }),
        (4, "main upper regime rarely fails", || {
            failure_at_most(4, 50, 20, 2153, 829, 10_000, 0.002)
        }),
        (
            5,
            "no-exchange lower regime rarely succeeds",
            lower_regime_fails,
        ),
        (
            6,
            "classic collector tails near their limits",
            classic_tails,
        ),
        (7, "m full sets mean near its expansion", m_sets_mean),
        (8, "process invariants", invariants),
        (9, "closed-form spot values", spot_values),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id}: {name} ({secs:.1}s): {}", out.detail);
        failed += usize::from(!out.pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
