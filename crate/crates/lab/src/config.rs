//! Experiment configuration: a single JSON document, validated field by field
//! so that errors name the offending field.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use coupon_core::bounds;
use coupon_core::{ExchangeRounds, PhasePlan, StrategyId};

use crate::error::{LabError, Result};

/// Named round counts computed from `(n, m)` before any trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundPreset {
    /// `ceil(2 n ln(mn))`
    NoExchangeUb,
    /// `ceil(16 (n + n ln n / m))`
    UnlimitedUb,
    /// `ceil(36 (n + n ln n / m))`
    MainUb,
    /// `ceil(6 m ln(mn))`
    MainReUb,
    /// `floor(n ln n / 4)`
    QuarterNLogN,
    /// `floor(n log2 m / 4)`
    QuarterNLog2M,
}

impl RoundPreset {
    pub const ALL: [RoundPreset; 6] = [
        Self::NoExchangeUb,
        Self::UnlimitedUb,
        Self::MainUb,
        Self::MainReUb,
        Self::QuarterNLogN,
        Self::QuarterNLog2M,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NoExchangeUb => "no_exchange_ub",
            Self::UnlimitedUb => "unlimited_ub",
            Self::MainUb => "main_ub",
            Self::MainReUb => "main_re_ub",
            Self::QuarterNLogN => "quarter_nlogn",
            Self::QuarterNLog2M => "quarter_nlog2m",
        }
    }

    pub fn resolve(self, n: u64, m: u64) -> Result<u64> {
        Ok(match self {
            Self::NoExchangeUb => bounds::rc_no_exchange_ub(n, m)?,
            Self::UnlimitedUb => bounds::rc_unlimited_ub(n, m)?,
            Self::MainUb => bounds::rc_main_ub(n, m)?,
            Self::MainReUb => bounds::re_main_ub(n, m)?,
            Self::QuarterNLogN => quarter_n_ln_n(n),
            Self::QuarterNLog2M => quarter_n_log2_m(n, m),
        })
    }
}

impl FromStr for RoundPreset {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or(())
    }
}

/// `floor(n ln n / 4)`: few enough samples that a single collector most
/// likely misses some coupon.
pub fn quarter_n_ln_n(n: u64) -> u64 {
    let n = n as f64;
    (n * n.ln() / 4.0).floor() as u64
}

/// `floor(n log2 m / 4)`: few enough samples that, without exchanges, some
/// coupon is missed by some collector with high probability in `m`.
pub fn quarter_n_log2_m(n: u64, m: u64) -> u64 {
    (n as f64 * (m as f64).log2() / 4.0).floor() as u64
}

/// A round count as written in a config: a number, a preset name, or
/// (for exchanges only) `"unlimited"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundSpec {
    Count(u64),
    Preset {
        preset: RoundPreset,
        multiplier: f64,
    },
    Unlimited,
}

impl RoundSpec {
    pub fn preset(preset: RoundPreset) -> Self {
        Self::Preset {
            preset,
            multiplier: 1.0,
        }
    }

    /// Resolves to a concrete number of rounds. Scaled presets round up.
    pub fn resolve(&self, n: u64, m: u64) -> Result<ExchangeRounds> {
        Ok(match *self {
            Self::Count(c) => ExchangeRounds::Finite(c),
            Self::Preset { preset, multiplier } => {
                let base = preset.resolve(n, m)?;
                if multiplier == 1.0 {
                    ExchangeRounds::Finite(base)
                } else {
                    ExchangeRounds::Finite((base as f64 * multiplier).ceil() as u64)
                }
            }
            Self::Unlimited => ExchangeRounds::Unlimited,
        })
    }

    /// Parses a JSON value: integer, preset name, `"unlimited"`, or
    /// `{"preset": name, "multiplier": x}`.
    pub fn from_json(field: &str, value: &Value) -> Result<Self> {
        match value {
            Value::Number(_) => Ok(Self::Count(as_u64(field, value)?)),
            Value::String(s) => s.parse().map_err(|()| {
                LabError::config(
                    field,
                    format!(
                        "unknown preset `{s}`; expected an integer, `unlimited` or one of {}",
                        preset_names()
                    ),
                )
            }),
            Value::Object(obj) => {
                let mut preset = None;
                let mut multiplier = 1.0;
                for (k, v) in obj {
                    let sub = format!("{field}.{k}");
                    match k.as_str() {
                        "preset" => {
                            let name = v
                                .as_str()
                                .ok_or_else(|| LabError::config(&sub, "expected a preset name"))?;
                            preset = Some(name.parse::<RoundPreset>().map_err(|()| {
                                LabError::config(
                                    &sub,
                                    format!(
                                        "unknown preset `{name}`; expected one of {}",
                                        preset_names()
                                    ),
                                )
                            })?);
                        }
                        "multiplier" => {
                            multiplier = v
                                .as_f64()
                                .filter(|x| x.is_finite() && *x >= 0.0)
                                .ok_or_else(|| {
                                    LabError::config(&sub, "expected a non-negative number")
                                })?;
                        }
                        _ => return Err(LabError::config(&sub, "unknown field")),
                    }
                }
                let preset =
                    preset.ok_or_else(|| LabError::config(format!("{field}.preset"), "missing"))?;
                Ok(Self::Preset { preset, multiplier })
            }
            _ => Err(LabError::config(
                field,
                "expected an integer or a preset name",
            )),
        }
    }
}

impl FromStr for RoundSpec {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "unlimited" {
            return Ok(Self::Unlimited);
        }
        if let Ok(c) = s.parse::<u64>() {
            return Ok(Self::Count(c));
        }
        s.parse().map(Self::preset)
    }
}

impl fmt::Display for RoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Count(c) => write!(f, "{c}"),
            Self::Preset { preset, multiplier } if *multiplier == 1.0 => f.write_str(preset.name()),
            Self::Preset { preset, multiplier } => write!(f, "{multiplier}*{}", preset.name()),
            Self::Unlimited => f.write_str("unlimited"),
        }
    }
}

fn preset_names() -> String {
    RoundPreset::ALL.map(RoundPreset::name).join(", ")
}

/// Resolved exchange rounds as they appear in outputs: a number or `"unlimited"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum RoundsValue {
    Count(u64),
    Unlimited(&'static str),
}

impl From<ExchangeRounds> for RoundsValue {
    fn from(r: ExchangeRounds) -> Self {
        match r {
            ExchangeRounds::Finite(c) => Self::Count(c),
            ExchangeRounds::Unlimited => Self::Unlimited("unlimited"),
        }
    }
}

impl fmt::Display for RoundsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Count(c) => write!(f, "{c}"),
            Self::Unlimited(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(()),
        }
    }
}

/// A validated experiment: sizes, resolved plan, trial count and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: u64,
    pub m: u64,
    /// `r_c` as written (number or preset).
    pub rc_spec: RoundSpec,
    /// `r_e` as written.
    pub re_spec: RoundSpec,
    /// Resolved `(r_c, r_e, strategy)`.
    pub plan: PhasePlan,
    pub trials: u64,
    pub seed: u64,
    pub trace: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Thread count hint; results never depend on it.
    pub workers: Option<usize>,
    /// Failure probability the regime under test promises, kept as metadata.
    pub target_failure: Option<f64>,
}

impl ExperimentConfig {
    /// Builds and validates a config without going through JSON.
    pub fn new(
        n: u64,
        m: u64,
        rc: RoundSpec,
        re: RoundSpec,
        strategy: StrategyId,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        let mut cfg = Self {
            n,
            m,
            rc_spec: rc,
            re_spec: re,
            plan: PhasePlan::new(0, 0, strategy),
            trials,
            seed,
            trace: false,
            out: None,
            format: OutputFormat::default(),
            workers: None,
            target_failure: None,
        };
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn n_usize(&self) -> usize {
        self.n as usize
    }

    pub fn m_usize(&self) -> usize {
        self.m as usize
    }

    fn from_object(obj: &Map<String, Value>) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        let mut rc = None;
        let mut re = None;
        let mut strategy = StrategyId::SurplusToNeedy;
        let mut trials = None;
        let mut seed = None;
        let mut trace = false;
        let mut out = None;
        let mut format = OutputFormat::default();
        let mut workers = None;
        let mut target_failure = None;

        for (key, value) in obj {
            let field = key.as_str();
            match field {
                "n" => n = Some(as_u64(field, value)?),
                "m" => m = Some(as_u64(field, value)?),
                "rc" | "r_c" => rc = Some(RoundSpec::from_json(field, value)?),
                "re" | "r_e" => re = Some(RoundSpec::from_json(field, value)?),
                "strategy" => {
                    let s = value
                        .as_str()
                        .ok_or_else(|| LabError::config(field, "expected a string"))?;
                    strategy = s.parse().map_err(|_| {
                        LabError::config(field, format!("unknown strategy `{s}`; expected SurplusToNeedy, MutualBarter or Null"))
                    })?;
                }
                "trials" => trials = Some(as_u64(field, value)?),
                "seed" | "master_seed" => seed = Some(as_u64(field, value)?),
                "trace" => {
                    trace = value
                        .as_bool()
                        .ok_or_else(|| LabError::config(field, "expected true or false"))?
                }
                "out" => {
                    let s = value
                        .as_str()
                        .ok_or_else(|| LabError::config(field, "expected a path string"))?;
                    out = Some(PathBuf::from(s));
                }
                "format" => {
                    let s = value.as_str().unwrap_or_default();
                    format = s
                        .parse()
                        .map_err(|()| LabError::config(field, "expected \"csv\" or \"json\""))?;
                }
                "workers" => {
                    let w = as_u64(field, value)?;
                    if w == 0 {
                        return Err(LabError::config(field, "must be at least 1"));
                    }
                    workers = Some(w as usize);
                }
                "target_failure" => {
                    let p = value
                        .as_f64()
                        .filter(|p| (0.0..=1.0).contains(p))
                        .ok_or_else(|| {
                            LabError::config(field, "expected a probability in [0, 1]")
                        })?;
                    target_failure = Some(p);
                }
                _ => return Err(LabError::config(field, "unknown field")),
            }
        }

        let n = n.ok_or_else(|| LabError::config("n", "missing"))?;
        let m = m.ok_or_else(|| LabError::config("m", "missing"))?;
        let rc_spec = rc.ok_or_else(|| LabError::config("rc", "missing"))?;
        let re_spec = re.ok_or_else(|| LabError::config("re", "missing"))?;
        let trials = trials.ok_or_else(|| LabError::config("trials", "missing"))?;
        let seed = seed.ok_or_else(|| LabError::config("seed", "missing"))?;

        let mut cfg = Self {
            n,
            m,
            rc_spec,
            re_spec,
            plan: PhasePlan::new(0, 0, strategy),
            trials,
            seed,
            trace,
            out,
            format,
            workers,
            target_failure,
        };
        cfg.resolve()?;
        Ok(cfg)
    }

    /// Validates sizes and resolves presets into `plan`. Call again after
    /// editing fields.
    pub fn resolve(&mut self) -> Result<()> {
        if self.n == 0 || self.n > u64::from(u32::MAX) {
            return Err(LabError::config("n", "must be between 1 and 2^32 - 1"));
        }
        if self.m == 0 || self.m > u64::from(u32::MAX) {
            return Err(LabError::config("m", "must be between 1 and 2^32 - 1"));
        }
        if self.trials == 0 {
            return Err(LabError::config("trials", "must be at least 1"));
        }
        let rc = match self.rc_spec.resolve(self.n, self.m)? {
            ExchangeRounds::Finite(c) => c,
            ExchangeRounds::Unlimited => {
                return Err(LabError::config(
                    "rc",
                    "collection rounds cannot be unlimited",
                ))
            }
        };
        let re = self.re_spec.resolve(self.n, self.m)?;
        if self.m < 2 && !re.is_zero() {
            return Err(LabError::config(
                "re",
                "exchanges need at least 2 collectors (m >= 2)",
            ));
        }
        if re == ExchangeRounds::Unlimited && self.plan.strategy == StrategyId::MutualBarter {
            return Err(LabError::config(
                "re",
                "unlimited exchanges are only supported for SurplusToNeedy and Null",
            ));
        }
        if self.trace && self.out.is_none() {
            return Err(LabError::config(
                "trace",
                "recording traces requires an output path (`out`)",
            ));
        }
        self.plan = PhasePlan::new(rc, re, self.plan.strategy);
        Ok(())
    }
}

fn as_u64(field: &str, value: &Value) -> Result<u64> {
    value.as_u64().ok_or_else(|| {
        LabError::config(
            field,
            format!("expected a non-negative integer, got {value}"),
        )
    })
}

/// Parses and validates an experiment config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| LabError::config("<root>", "expected a JSON object"))?;
    ExperimentConfig::from_object(obj)
}

/// Parses a config document given as a JSON object map (used by the CLI to
/// merge flags into a document).
pub fn config_from_object(obj: &Map<String, Value>) -> Result<ExperimentConfig> {
    ExperimentConfig::from_object(obj)
}
