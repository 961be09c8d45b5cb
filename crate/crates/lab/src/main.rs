use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use coupon_core::bounds::{er_limit_lower, er_limit_upper, BoundReport};
use coupon_core::oracle::{self, ExactProbability};
use coupon_core::StrategyId;
use coupon_lab::config::{config_from_object, OutputFormat};
use coupon_lab::error::{LabError, Result};
use coupon_lab::output::{to_json_pretty, trace_path, trials_csv, write_atomic};
use coupon_lab::presets::{find_regime, preset_regimes, Expectation, RegimePreset};
use coupon_lab::runner::{run_experiment, VERSION};
use coupon_lab::sweep::{parse_sweep, run_sweep, MRule, SWEEP_CSV_HEADER};
use coupon_lab::until::{explore, until_complete_report, EXPLORE_CSV_HEADER};

#[derive(Parser)]
#[command(
    name = "coupon-lab",
    version,
    about = "Coupon collecting with pairwise exchanges between collectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo trials of one configuration.
    Simulate(SimulateArgs),
    /// Run a grid of configurations described by a JSON spec.
    Sweep(SweepArgs),
    /// Print the closed-form round counts for (n, m).
    Bounds(BoundsArgs),
    /// Exact success probabilities for small instances.
    Oracle(OracleArgs),
    /// Draw until every coupon has been seen m times.
    UntilComplete(UntilArgs),
    /// List the named regimes at (n, m).
    Presets(PresetsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named regime supplying rc, re and strategy (see `presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    /// Samples per collector: an integer or a preset name.
    #[arg(long)]
    rc: Option<String>,
    /// Interactions: an integer, a preset name or `unlimited`.
    #[arg(long)]
    re: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write per-trial rows.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write every interaction to `<out>.trace.json`.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    workers: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    /// Offsets at which to evaluate the classic tail limits.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-1.0, 0.0, 1.0])]
    c: Vec<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// One collector holds every type after rc draws.
    Single,
    /// All m collectors complete after rc draws each, no exchanges.
    NoExchange,
    /// t draws hit every type at least m times.
    AtLeastM,
    /// Collection followed by re exchanges.
    TwoPhase,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    kind: OracleKind,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    #[arg(long, default_value_t = 0)]
    rc: u64,
    #[arg(long, default_value_t = 0)]
    re: u64,
    /// Total draws for `at-least-m`; defaults to m * rc.
    #[arg(long)]
    t: Option<u64>,
    #[arg(long, default_value = "SurplusToNeedy")]
    strategy: String,
    /// Largest enumeration the oracle may attempt.
    #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = 12)]
    digits: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct UntilArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Number of full sets to collect.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Offsets for the tail comparison (m = 1 only).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-1.0, 0.0, 1.0])]
    c: Vec<f64>,
    /// Explore growing m: comma-separated values of n.
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    explore: Vec<u64>,
    /// Rules for m in explore mode: const:K, log_n, sqrt_n, linear_n.
    #[arg(long, value_delimiter = ',', default_values_t = ["const:2".to_owned(), "log_n".to_owned(), "sqrt_n".to_owned(), "linear_n".to_owned()])]
    m_rule: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PresetsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => bounds(a),
        Command::Oracle(a) => exact(a),
        Command::UntilComplete(a) => until(a),
        Command::Presets(a) => presets(a),
    };
    match result {
        Ok(text) => {
            // a closed pipe (`| head`) is not a failure
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: writing to stdout: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

fn strategy(s: &str) -> Result<StrategyId> {
    s.parse().map_err(|_| {
        LabError::config(
            "strategy",
            format!("unknown strategy `{s}`; expected SurplusToNeedy, MutualBarter or Null"),
        )
    })
}

fn simulate(a: SimulateArgs) -> Result<String> {
    let mut doc = match &a.config {
        Some(path) => match serde_json::from_str(&read(path)?)? {
            Value::Object(obj) => obj,
            _ => return Err(LabError::config("<root>", "expected a JSON object")),
        },
        None => Map::new(),
    };
    // flags win over the file, including over its alias spellings
    let mut set = |keys: &[&str], v: Option<Value>| {
        if let Some(v) = v {
            for k in &keys[1..] {
                doc.remove(*k);
            }
            doc.insert(keys[0].to_owned(), v);
        }
    };
    set(&["n"], a.n.map(Value::from));
    set(&["m"], a.m.map(Value::from));
    set(&["rc", "r_c"], a.rc.map(Value::from));
    set(&["re", "r_e"], a.re.map(Value::from));
    set(&["strategy"], a.strategy.map(Value::from));
    set(&["trials"], a.trials.map(Value::from));
    set(&["seed", "master_seed"], a.seed.map(Value::from));
    set(
        &["out"],
        a.out.map(|p| Value::from(p.to_string_lossy().into_owned())),
    );
    set(
        &["format"],
        a.format.map(|f| {
            Value::from(if matches!(f, Format::Csv) {
                "csv"
            } else {
                "json"
            })
        }),
    );
    set(&["workers"], a.workers.map(Value::from));
    if a.trace {
        doc.insert("trace".into(), Value::Bool(true));
    }
    if let Some(name) = &a.preset {
        let dim = |k: &str| {
            doc.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| LabError::config(k, "required by --preset"))
        };
        let regime = find_regime(name, dim("n")?, dim("m")?)?.ok_or_else(|| {
            LabError::config(
                "preset",
                format!("unknown regime `{name}`; see `coupon-lab presets`"),
            )
        })?;
        for k in ["rc", "r_c", "re", "r_e"] {
            if doc.contains_key(k) {
                return Err(LabError::config(k, "cannot be combined with --preset"));
            }
        }
        doc.insert("rc".into(), regime.rc.into());
        doc.insert("re".into(), serde_json::to_value(regime.re)?);
        doc.entry("strategy")
            .or_insert_with(|| regime.strategy.name().into());
        if let Expectation::Succeeds { failure_at_most } = regime.expectation {
            doc.entry("target_failure")
                .or_insert_with(|| failure_at_most.into());
        }
    }

    let config = config_from_object(&doc)?;
    let result = run_experiment(&config)?;
    if let Some(out) = &config.out {
        let body = match config.format {
            OutputFormat::Csv => trials_csv(&config, &result),
            OutputFormat::Json => to_json_pretty(&json!({
                "summary": result.summary,
                "rc_spec": config.rc_spec.to_string(),
                "re_spec": config.re_spec.to_string(),
                "target_failure": config.target_failure,
                "trials": result.rows,
            })),
        };
        write_atomic(out, body.as_bytes())?;
        if let Some(traces) = &result.traces {
            write_atomic(&trace_path(out), to_json_pretty(traces).as_bytes())?;
        }
    }
    Ok(to_json_pretty(&result.summary))
}

fn sweep(a: SweepArgs) -> Result<String> {
    let spec = parse_sweep(&read(&a.spec)?)?;
    let cells = spec.cells()?;
    eprintln!("sweep: {} cells, {} trials each", cells.len(), spec.trials);
    let rows = run_sweep(&spec, a.workers)?;
    let body = match a.format {
        Format::Csv => {
            let mut s = format!(
                "# seed={}\n# generator={}\n# version={VERSION}\n{SWEEP_CSV_HEADER}\n",
                spec.seed,
                coupon_core::GENERATOR
            );
            for r in &rows {
                s.push_str(&r.csv_line());
                s.push('\n');
            }
            s
        }
        Format::Json => to_json_pretty(&json!({
            "seed": spec.seed,
            "generator": coupon_core::GENERATOR,
            "version": VERSION,
            "cells": rows,
        })),
    };
    match &a.out {
        Some(out) => write_atomic(out, body.as_bytes()).map(|()| String::new()),
        None => Ok(body),
    }
}

fn bounds(a: BoundsArgs) -> Result<String> {
    let report = BoundReport::new(a.n, a.m)?;
    let limits: Vec<(f64, f64, f64)> =
        a.c.iter()
            .map(|&c| (c, er_limit_lower(c), er_limit_upper(c)))
            .collect();
    if a.json {
        let mut obj = Map::new();
        obj.insert("n".into(), a.n.into());
        obj.insert("m".into(), a.m.into());
        for (name, _, value) in report.rows() {
            obj.insert(name.into(), value.into());
        }
        let limits: Vec<Value> = limits
            .iter()
            .map(|&(c, lower, upper)| json!({"c": c, "lower": lower, "upper": upper}))
            .collect();
        obj.insert("er_limits".into(), limits.into());
        return Ok(to_json_pretty(&obj));
    }
    let mut s = format!("n={} m={}\n", a.n, a.m);
    for (name, formula, value) in report.rows() {
        writeln!(s, "{name:<18} {value:>12}  {formula}").unwrap();
    }
    for (c, lower, upper) in limits {
        writeln!(
            s,
            "c={c:<6} exp(-exp(c))={lower:.6}  1-exp(-exp(-c))={upper:.6}"
        )
        .unwrap();
    }
    Ok(s)
}

fn exact(a: OracleArgs) -> Result<String> {
    let p: ExactProbability = match a.kind {
        OracleKind::Single => oracle::single_collector_success(a.n, a.rc)?,
        OracleKind::NoExchange => oracle::no_exchange_success(a.n, a.m, a.rc)?,
        OracleKind::AtLeastM => {
            let t = a.t.unwrap_or(a.m.saturating_mul(a.rc));
            oracle::all_coupons_at_least(a.n, a.m, t, a.budget)?
        }
        OracleKind::TwoPhase => {
            oracle::two_phase_success(a.n, a.m, a.rc, a.re, strategy(&a.strategy)?, a.budget)?
        }
    };
    if a.json {
        let kind = match a.kind {
            OracleKind::Single => "single",
            OracleKind::NoExchange => "no-exchange",
            OracleKind::AtLeastM => "at-least-m",
            OracleKind::TwoPhase => "two-phase",
        };
        Ok(to_json_pretty(&json!({
            "kind": kind,
            "n": a.n,
            "m": a.m,
            "rc": a.rc,
            "re": a.re,
            "probability": p.to_string(),
            "decimal": p.to_decimal(a.digits),
            "value": p.to_f64(),
        })))
    } else {
        Ok(format!("{p}\n{}\n", p.to_decimal(a.digits)))
    }
}

fn until(a: UntilArgs) -> Result<String> {
    if !a.explore.is_empty() {
        let rules = a
            .m_rule
            .iter()
            .map(|s| {
                s.parse::<MRule>()
                    .map_err(|()| LabError::config("m-rule", format!("unknown rule `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = explore(&a.explore, &rules, a.trials, a.seed, a.workers)?;
        let body = match a.format {
            Format::Csv => {
                let mut s = format!("{EXPLORE_CSV_HEADER}\n");
                for r in &rows {
                    s.push_str(&r.csv_line());
                    s.push('\n');
                }
                s
            }
            Format::Json => to_json_pretty(&rows),
        };
        return match &a.out {
            Some(out) => write_atomic(out, body.as_bytes()).map(|()| String::new()),
            None => Ok(body),
        };
    }

    let n = a.n.ok_or_else(|| LabError::config("n", "missing"))?;
    let (report, results) = until_complete_report(n, a.m, a.trials, a.seed, &a.c, a.workers)?;
    if let Some(out) = &a.out {
        let body = match a.format {
            Format::Csv => {
                let mut s = format!(
                    "# n={n}\n# m={}\n# seed={}\n# generator={}\n# version={VERSION}\ntrial_index,samples_used\n",
                    a.m, a.seed, report.generator
                );
                for (i, r) in results.iter().enumerate() {
                    s.push_str(&format!("{i},{}\n", r.samples_used));
                }
                s
            }
            Format::Json => to_json_pretty(&json!({
                "report": report,
                "samples_used": results.iter().map(|r| r.samples_used).collect::<Vec<_>>(),
            })),
        };
        write_atomic(out, body.as_bytes())?;
    }
    Ok(to_json_pretty(&report))
}

fn presets(a: PresetsArgs) -> Result<String> {
    let regimes: Vec<RegimePreset> = preset_regimes(a.n, a.m)?;
    if a.json {
        return Ok(to_json_pretty(&regimes));
    }
    let mut s = String::new();
    for r in &regimes {
        let expect = match r.expectation {
            Expectation::Succeeds { failure_at_most } => {
                format!("fails w.p. <= {failure_at_most:.3e}")
            }
            Expectation::Fails {
                success_below: Some(p),
            } => format!("succeeds w.p. < {p:.3e}"),
            Expectation::Fails {
                success_below: None,
            } => "usually fails".to_owned(),
            Expectation::Exploratory => "exploratory".to_owned(),
        };
        writeln!(
            s,
            "{:<26} rc={:<8} re={:<10} {:<16} {expect}",
            r.name,
            r.rc,
            r.re.to_string(),
            r.strategy.name()
        )
        .unwrap();
        writeln!(s, "{:<26} {}", "", r.description).unwrap();
    }
    Ok(s)
}
