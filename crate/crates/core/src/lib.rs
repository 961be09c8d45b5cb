//! Coupon collecting with friends.
//!
//! `m` collectors each want all `n` coupon types. Every collector first draws
//! `r_c` coupons uniformly with replacement (the collection phase), then `r_e`
//! interactions happen between uniformly random pairs of collectors, during
//! which an exchange strategy moves copies between the two partners (the
//! exchange phase).
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation:
//!
//! - [`population`], [`strategy`] and [`process`]: the stochastic simulation.
//! - [`bounds`]: closed-form round counts and limit laws.
//! - [`oracle`]: exact rational success probabilities for small instances.
//! - [`classic`]: the run-until-complete single collector and the `m`-full-sets
//!   variant.
//! - [`stats`]: Wilson intervals and summary statistics.
//!
//! All randomness flows through [`RngStream`], a ChaCha8 stream keyed by a
//! master seed and a trial index, so results do not depend on how trials are
//! scheduled.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod classic;
mod error;
pub mod oracle;
pub mod population;
pub mod process;
mod rng;
pub mod stats;
pub mod strategy;

pub use error::{Error, Result};
pub use population::{CouponCounts, Population};
pub use process::{
    run_collection_phase, run_exchange_phase, run_trial, sample_pair, ExchangeReport,
    ExchangeRounds, InteractionRecord, PhasePlan, TrialOutcome,
};
pub use rng::{derive_seed, RngStream, GENERATOR};
pub use strategy::{apply_strategy, Pair, StrategyId, Transfer};
