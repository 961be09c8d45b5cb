//! Experiment harness for coupon collecting with pairwise exchanges: JSON
//! configs, named regimes, parallel trial execution, and CSV/JSON outputs.

pub mod config;
pub mod error;
pub mod gof;
pub mod output;
pub mod presets;
pub mod runner;
pub mod sweep;
pub mod until;

pub use config::{parse_config, ExperimentConfig, OutputFormat, RoundPreset, RoundSpec};
pub use error::{LabError, Result};
pub use runner::{count_successes, run_experiment, ExperimentResult, ExperimentSummary, TrialRow};
pub use sweep::{parse_sweep, run_sweep, SweepSpec};
