//! Grids of experiments over `n`, `m`, `r_c` and `r_e`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use coupon_core::stats::{SuccessSummary, Z_95};
use coupon_core::{derive_seed, ExchangeRounds, StrategyId};

use crate::config::{ExperimentConfig, RoundSpec, RoundsValue};
use crate::error::{LabError, Result};
use crate::runner::count_successes;

/// How `m` is chosen for a given `n`. Every rule is clamped to at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MRule {
    Const(u64),
    /// `ceil(ln n)`
    LogN,
    /// `ceil(sqrt n)`
    SqrtN,
    /// `n`
    LinearN,
}

impl MRule {
    pub fn resolve(self, n: u64) -> u64 {
        let nf = n as f64;
        let m = match self {
            Self::Const(m) => m,
            Self::LogN => nf.ln().ceil() as u64,
            Self::SqrtN => nf.sqrt().ceil() as u64,
            Self::LinearN => n,
        };
        m.max(1)
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(m) => write!(f, "const:{m}"),
            Self::LogN => f.write_str("log_n"),
            Self::SqrtN => f.write_str("sqrt_n"),
            Self::LinearN => f.write_str("linear_n"),
        }
    }
}

impl FromStr for MRule {
    type Err = ();

    /// `log_n`, `sqrt_n`, `linear_n`, `const:K` or a bare integer `K`.
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "log_n" => Ok(Self::LogN),
            "sqrt_n" => Ok(Self::SqrtN),
            "linear_n" => Ok(Self::LinearN),
            _ => s
                .strip_prefix("const:")
                .unwrap_or(s)
                .parse()
                .map(Self::Const)
                .map_err(|_| ()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ns: Vec<u64>,
    pub ms: Vec<MRule>,
    pub rcs: Vec<RoundSpec>,
    pub res: Vec<RoundSpec>,
    pub strategy: StrategyId,
    pub trials: u64,
    pub seed: u64,
}

/// One resolved grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub m_rule: MRule,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub m: u64,
    pub m_rule: String,
    pub rc: u64,
    pub rc_spec: String,
    pub re: RoundsValue,
    pub re_spec: String,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub cell_seed: u64,
}

pub const SWEEP_CSV_HEADER: &str =
    "n,m,m_rule,rc,rc_spec,re,re_spec,strategy,trials,successes,fraction,wilson_low,wilson_high,cell_seed";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.m_rule,
            self.rc,
            self.rc_spec,
            self.re,
            self.re_spec,
            self.strategy,
            self.trials,
            self.successes,
            self.fraction,
            self.wilson_low,
            self.wilson_high,
            self.cell_seed
        )
    }
}

fn list<'a>(obj: &'a serde_json::Map<String, Value>, field: &str) -> Result<&'a Vec<Value>> {
    let v = obj
        .get(field)
        .ok_or_else(|| LabError::config(field, "missing"))?;
    let items = v
        .as_array()
        .ok_or_else(|| LabError::config(field, "expected a list"))?;
    if items.is_empty() {
        return Err(LabError::config(field, "must not be empty"));
    }
    Ok(items)
}

/// Parses a sweep document:
///
/// ```json
/// {"n": [10, 20], "m": [2, "log_n"], "rc": ["main_ub"], "re": [{"preset": "main_re_ub", "multiplier": 0.5}],
///  "strategy": "SurplusToNeedy", "trials": 200, "seed": 7}
/// ```
pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| LabError::config("<root>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !["n", "m", "rc", "re", "strategy", "trials", "seed"].contains(&key.as_str()) {
            return Err(LabError::config(key, "unknown field"));
        }
    }
    let ns = list(obj, "n")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| LabError::config(format!("n[{i}]"), "expected a positive integer"))
        })
        .collect::<Result<Vec<_>>>()?;
    let ms = list(obj, "m")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let rule = match v {
                Value::Number(_) => v.as_u64().map(MRule::Const),
                Value::String(s) => s.parse().ok(),
                _ => None,
            };
            rule.ok_or_else(|| {
                LabError::config(
                    format!("m[{i}]"),
                    "expected an integer, const:K, log_n, sqrt_n or linear_n",
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rcs = list(obj, "rc")?
        .iter()
        .enumerate()
        .map(|(i, v)| RoundSpec::from_json(&format!("rc[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;
    let res = list(obj, "re")?
        .iter()
        .enumerate()
        .map(|(i, v)| RoundSpec::from_json(&format!("re[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;
    let strategy = match obj.get("strategy") {
        None => StrategyId::SurplusToNeedy,
        Some(v) => {
            let s = v.as_str().unwrap_or_default();
            s.parse()
                .map_err(|_| LabError::config("strategy", format!("unknown strategy `{s}`")))?
        }
    };
    let int = |field: &str| {
        obj.get(field)
            .ok_or_else(|| LabError::config(field, "missing"))?
            .as_u64()
            .ok_or_else(|| LabError::config(field, "expected a non-negative integer"))
    };
    Ok(SweepSpec {
        ns,
        ms,
        rcs,
        res,
        strategy,
        trials: int("trials")?,
        seed: int("seed")?,
    })
}

fn rounds_code(r: ExchangeRounds) -> u64 {
    match r {
        ExchangeRounds::Finite(c) => c,
        ExchangeRounds::Unlimited => u64::MAX,
    }
}

impl SweepSpec {
    pub fn cell_count(&self) -> usize {
        self.ns.len() * self.ms.len() * self.rcs.len() * self.res.len()
    }

    /// Resolves every cell, in `n`, `m`, `r_c`, `r_e` order. A cell's seed is
    /// derived from the master seed and the cell's resolved `(n, m, r_c, r_e)`.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &n in &self.ns {
            for &m_rule in &self.ms {
                let m = m_rule.resolve(n);
                for &rc in &self.rcs {
                    for &re in &self.res {
                        let mut config =
                            ExperimentConfig::new(n, m, rc, re, self.strategy, self.trials, 0)
                                .map_err(|e| match e {
                                    LabError::Config { field, message } => LabError::config(
                                        format!("cell(n={n}, m={m}).{field}"),
                                        message,
                                    ),
                                    other => other,
                                })?;
                        config.seed = derive_seed(
                            self.seed,
                            &[
                                n,
                                m,
                                config.plan.samples_per_collector,
                                rounds_code(config.plan.interactions),
                            ],
                        );
                        out.push(SweepCell { m_rule, config });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Runs every cell and returns one summary row per cell, in cell order.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    spec.cells()?
        .into_iter()
        .map(|cell| {
            let c = &cell.config;
            let successes =
                count_successes(c.n_usize(), c.m_usize(), &c.plan, c.seed, c.trials, workers)?;
            let s = SuccessSummary::new(successes, c.trials, Z_95)?;
            Ok(SweepRow {
                n: c.n,
                m: c.m,
                m_rule: cell.m_rule.to_string(),
                rc: c.plan.samples_per_collector,
                rc_spec: c.rc_spec.to_string(),
                re: c.plan.interactions.into(),
                re_spec: c.re_spec.to_string(),
                strategy: c.plan.strategy.name().to_owned(),
                trials: s.trials,
                successes: s.successes,
                fraction: s.fraction,
                wilson_low: s.wilson_low,
                wilson_high: s.wilson_high,
                cell_seed: c.seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_rules() {
        assert_eq!(MRule::LogN.resolve(100), 5);
        assert_eq!(MRule::LogN.resolve(1000), 7);
        assert_eq!(MRule::LogN.resolve(1), 1);
        assert_eq!(MRule::SqrtN.resolve(50), 8);
        assert_eq!(MRule::LinearN.resolve(12), 12);
        assert_eq!("const:3".parse::<MRule>(), Ok(MRule::Const(3)));
        assert_eq!("4".parse::<MRule>(), Ok(MRule::Const(4)));
        assert!("cube_n".parse::<MRule>().is_err());
    }

    #[test]
    fn grid_has_one_cell_per_combination() {
        let spec = parse_sweep(r#"{"n": [10, 20], "m": [2, 4], "rc": ["main_ub"], "re": ["main_re_ub"], "trials": 5, "seed": 1}"#)
            .unwrap();
        assert_eq!(spec.cell_count(), 4);
        let rows = run_sweep(&spec, None).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[3].n, rows[3].m), (20, 4));
    }

    #[test]
    fn log_rule_resolution_is_recorded() {
        let spec = parse_sweep(
            r#"{"n": [100, 1000], "m": ["log_n"], "rc": [0], "re": [0], "trials": 1, "seed": 1}"#,
        )
        .unwrap();
        let cells = spec.cells().unwrap();
        assert_eq!(cells.iter().map(|c| c.config.m).collect::<Vec<_>>(), [5, 7]);
        let rows = run_sweep(&spec, None).unwrap();
        assert_eq!(rows[0].m_rule, "log_n");
    }

    #[test]
    fn invalid_documents() {
        let field = |doc: &str| match parse_sweep(doc).unwrap_err() {
            LabError::Config { field, .. } => field,
            e => panic!("{e:?}"),
        };
        assert_eq!(
            field(r#"{"n": [], "m": [2], "rc": [1], "re": [0], "trials": 1, "seed": 1}"#),
            "n"
        );
        assert_eq!(
            field(r#"{"n": [3], "m": ["cube"], "rc": [1], "re": [0], "trials": 1, "seed": 1}"#),
            "m[0]"
        );
        assert_eq!(
            field(r#"{"n": [3], "m": [2], "rc": [1], "re": ["x"], "trials": 1, "seed": 1}"#),
            "re[0]"
        );
        assert_eq!(
            field(r#"{"n": [3], "m": [2], "rc": [1], "re": [0], "seed": 1}"#),
            "trials"
        );
        let spec =
            parse_sweep(r#"{"n": [3], "m": [1], "rc": [1], "re": [2], "trials": 1, "seed": 1}"#)
                .unwrap();
        assert!(matches!(spec.cells(), Err(LabError::Config { .. })));
    }
}
