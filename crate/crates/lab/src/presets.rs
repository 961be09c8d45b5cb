//! Named regimes: each binds `(r_c, r_e, strategy)` to one of the known upper
//! or lower bounds and records what outcome the bound predicts.

use serde::Serialize;

use coupon_core::bounds;
use coupon_core::{ExchangeRounds, PhasePlan, StrategyId};

use crate::config::{quarter_n_ln_n, RoundsValue};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    /// All collectors complete except with probability at most `failure_at_most`.
    Succeeds { failure_at_most: f64 },
    /// Success probability stays below `success_below` (when a value is known)
    /// or bounded away from 1.
    Fails { success_below: Option<f64> },
    /// No proven prediction; gathered for comparison.
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimePreset {
    pub name: &'static str,
    pub description: &'static str,
    pub n: u64,
    pub m: u64,
    pub rc: u64,
    pub re: RoundsValue,
    pub strategy: StrategyId,
    pub expectation: Expectation,
    #[serde(skip)]
    pub plan: PhasePlan,
}

impl RegimePreset {
    fn new(
        name: &'static str,
        description: &'static str,
        (n, m): (u64, u64),
        rc: u64,
        re: ExchangeRounds,
        expectation: Expectation,
    ) -> Self {
        let strategy = StrategyId::SurplusToNeedy;
        Self {
            name,
            description,
            n,
            m,
            rc,
            re: re.into(),
            strategy,
            expectation,
            plan: PhasePlan::new(rc, re, strategy),
        }
    }
}

fn ceil_rounds(x: f64) -> u64 {
    x.ceil().max(0.0) as u64
}

/// Every named regime resolved at `(n, m)`.
///
/// Regimes whose exchange phase needs a partner are dropped when `m < 2`.
pub fn preset_regimes(n: u64, m: u64) -> Result<Vec<RegimePreset>> {
    let size = (n, m);
    let (nf, mf) = (n as f64, m as f64);
    let one_over_mn = 1.0 / (nf * mf);
    let quarter_nlogn = quarter_n_ln_n(n);
    let re_log_n = (mf * nf.log2() / 8.0).floor() as u64;
    let re_log_m = (mf * mf.log2() / 16.0).floor() as u64;
    let rc_main = bounds::rc_main_ub(n, m)?;
    use ExchangeRounds::{Finite, Unlimited};

    let mut out = vec![
        RegimePreset::new(
            "no-exchange-ub",
            "no exchanges; r_c = ceil(2 n ln(mn)) samples each suffice",
            size,
            bounds::rc_no_exchange_ub(n, m)?,
            Finite(0),
            Expectation::Succeeds {
                failure_at_most: one_over_mn,
            },
        ),
        RegimePreset::new(
            "no-exchange-lb",
            "no exchanges; r_c = floor(n log2(m) / 4) leaves some coupon missing somewhere",
            size,
            crate::config::quarter_n_log2_m(n, m),
            Finite(0),
            Expectation::Fails {
                success_below: Some((-mf.sqrt()).exp()),
            },
        ),
    ];
    if m >= 2 {
        out.extend([
            RegimePreset::new(
                "unlimited-ub",
                "unlimited exchanges; r_c = ceil(16 (n + n ln(n) / m)) gives every coupon m copies overall",
                size,
                bounds::rc_unlimited_ub(n, m)?,
                Unlimited,
                Expectation::Succeeds { failure_at_most: 1.0 / nf },
            ),
            RegimePreset::new(
                "unlimited-lb",
                "unlimited exchanges; r_c = floor((n + n ln(n) / m) / 4) is too few samples in total",
                size,
                ((nf + nf * nf.ln() / mf) / 4.0).floor() as u64,
                Unlimited,
                Expectation::Fails { success_below: None },
            ),
            RegimePreset::new(
                "thm1-ub",
                "surplus-to-needy with r_c = ceil(36 (n + n ln(n) / m)) and r_e = ceil(6 m ln(mn))",
                size,
                rc_main,
                Finite(bounds::re_main_ub(n, m)?),
                Expectation::Succeeds { failure_at_most: one_over_mn },
            ),
            RegimePreset::new(
                "exchange-lb-log-n",
                "r_c = floor(n ln(n) / 4), r_e = floor(m log2(n) / 8): some collector likely never interacts",
                size,
                quarter_nlogn,
                Finite(re_log_n),
                Expectation::Fails { success_below: Some(1.0 - 1.0 / nf) },
            ),
            RegimePreset::new(
                "exchange-lb-log-m",
                "r_c = floor(n ln(n) / 4), r_e = floor(m log2(m) / 16): an incomplete collector likely never interacts",
                size,
                quarter_nlogn,
                Finite(re_log_m),
                Expectation::Fails { success_below: None },
            ),
            RegimePreset::new(
                "thm2-lb",
                "r_c = floor(n ln(n) / 4), r_e = max of the two exchange lower-bound thresholds",
                size,
                quarter_nlogn,
                Finite(re_log_n.max(re_log_m)),
                Expectation::Fails { success_below: Some(1.0 - 1.0 / nf) },
            ),
        ]);
        let probes: [(&'static str, &'static str, f64); 4] = [
            (
                "conjecture-probe-m",
                "r_c = ceil(36 (n + n ln(n) / m)), r_e = m",
                mf,
            ),
            (
                "conjecture-probe-m-ln-m",
                "r_c = ceil(36 (n + n ln(n) / m)), r_e = ceil(m ln m)",
                mf * mf.ln(),
            ),
            (
                "conjecture-probe-m-ln-n",
                "r_c = ceil(36 (n + n ln(n) / m)), r_e = ceil(m ln n)",
                mf * nf.ln(),
            ),
            (
                "conjecture-probe-m-ln-mn",
                "r_c = ceil(36 (n + n ln(n) / m)), r_e = ceil(m ln(mn))",
                mf * (mf * nf).ln(),
            ),
        ];
        out.extend(probes.into_iter().map(|(name, description, re)| {
            RegimePreset::new(
                name,
                description,
                size,
                rc_main,
                Finite(ceil_rounds(re)),
                Expectation::Exploratory,
            )
        }));
    }
    Ok(out)
}

/// Looks up one regime by name.
pub fn find_regime(name: &str, n: u64, m: u64) -> Result<Option<RegimePreset>> {
    Ok(preset_regimes(n, m)?.into_iter().find(|p| p.name == name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(name: &str) -> RegimePreset {
        find_regime(name, 50, 20).unwrap().unwrap()
    }

    #[test]
    fn main_upper_bound_regime() {
        let p = get("thm1-ub");
        assert_eq!(
            (p.rc, p.re, p.strategy),
            (2153, RoundsValue::Count(829), StrategyId::SurplusToNeedy)
        );
        assert_eq!(
            p.expectation,
            Expectation::Succeeds {
                failure_at_most: 0.001
            }
        );
    }

    #[test]
    fn no_exchange_upper_bound_regime() {
        let p = get("no-exchange-ub");
        assert_eq!((p.rc, p.re), (691, RoundsValue::Count(0)));
    }

    #[test]
    fn conjecture_probes_sweep_exchange_counts() {
        let res: Vec<RoundsValue> = [
            "conjecture-probe-m",
            "conjecture-probe-m-ln-m",
            "conjecture-probe-m-ln-n",
            "conjecture-probe-m-ln-mn",
        ]
        .into_iter()
        .map(|name| {
            let p = get(name);
            assert_eq!(p.rc, 2153);
            p.re
        })
        .collect();
        // 20, ceil(20 ln 20) = 60, ceil(20 ln 50) = 79, ceil(20 ln 1000) = 139
        assert_eq!(res, [20, 60, 79, 139].map(RoundsValue::Count));
    }

    #[test]
    fn lower_bound_regimes() {
        assert_eq!(
            find_regime("no-exchange-lb", 50, 50).unwrap().unwrap().rc,
            70
        );
        let p = get("thm2-lb");
        // floor(50 ln 50 / 4) = 48; floor(20 log2 50 / 8) = 14; floor(20 log2 20 / 16) = 5
        assert_eq!(p.rc, 48);
        assert_eq!(p.re, RoundsValue::Count(14));
        assert_eq!(get("exchange-lb-log-m").re, RoundsValue::Count(5));
    }

    #[test]
    fn single_collector_has_no_exchange_regimes() {
        let names: Vec<_> = preset_regimes(10, 1)
            .unwrap()
            .into_iter()
            .map(|p| p.name)
            .collect();
        assert_eq!(names, ["no-exchange-ub", "no-exchange-lb"]);
    }
}
