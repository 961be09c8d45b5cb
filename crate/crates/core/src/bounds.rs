//! Closed-form round counts and limit laws.
//!
//! Every logarithm here is natural. Real-valued formulas are turned into round
//! counts by taking the ceiling and clamping to at least 1.

use libm::{ceil, exp, log};

use crate::{Error, Result};

fn check_sizes(n: u64, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("number of coupon types must be at least 1"));
    }
    if m == 0 {
        return Err(Error::Domain("number of collectors must be at least 1"));
    }
    Ok(())
}

fn rounds(x: f64) -> u64 {
    (ceil(x) as u64).max(1)
}

/// `n + n ln n / m`, the common factor of the exchange-assisted sample bounds.
fn pooled_factor(n: f64, m: f64) -> f64 {
    n + n * log(n) / m
}

/// Samples per collector sufficient without exchanges: `ceil(2 n ln(mn))`.
pub fn rc_no_exchange_ub(n: u64, m: u64) -> Result<u64> {
    check_sizes(n, m)?;
    let (n, m) = (n as f64, m as f64);
    Ok(rounds(2.0 * n * log(m * n)))
}

/// Samples per collector sufficient with unlimited exchanges:
/// `ceil(16 (n + n ln n / m))`.
pub fn rc_unlimited_ub(n: u64, m: u64) -> Result<u64> {
    check_sizes(n, m)?;
    Ok(rounds(16.0 * pooled_factor(n as f64, m as f64)))
}

/// Samples per collector required by the main exchange guarantee:
/// `ceil(36 (n + n ln n / m))`.
pub fn rc_main_ub(n: u64, m: u64) -> Result<u64> {
    check_sizes(n, m)?;
    Ok(rounds(36.0 * pooled_factor(n as f64, m as f64)))
}

/// Interactions sufficient under the surplus-to-needy rule once
/// [`rc_main_ub`] samples were drawn: `ceil(6 m ln(mn))`.
pub fn re_main_ub(n: u64, m: u64) -> Result<u64> {
    check_sizes(n, m)?;
    let (n, m) = (n as f64, m as f64);
    Ok(rounds(6.0 * m * log(m * n)))
}

/// Limit of `P(X <= n (ln n - c))` for the single-collector sample count `X`:
/// `exp(-exp(c))`.
pub fn er_limit_lower(c: f64) -> f64 {
    exp(-exp(c))
}

/// Limit of `P(X >= n (ln n + c))`: `1 - exp(-exp(-c))`.
pub fn er_limit_upper(c: f64) -> f64 {
    -libm::expm1(-exp(-c))
}

/// Leading terms of the expected number of draws to see every coupon type
/// `m` times: `n (ln n + (m - 1) ln ln n)`. The bounded additive `O(n)` term is
/// not included.
pub fn newman_shepp_expectation(n: u64, m: u64) -> Result<f64> {
    check_sizes(n, m)?;
    if n < 3 {
        return Err(Error::Domain("n must be at least 3 so that ln ln n > 0"));
    }
    let (n, m) = (n as f64, m as f64);
    Ok(n * (log(n) + (m - 1.0) * log(log(n))))
}

/// All upper-bound round counts for one `(n, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub n: u64,
    pub m: u64,
    pub rc_no_exchange_ub: u64,
    pub rc_unlimited_ub: u64,
    pub rc_main_ub: u64,
    pub re_main_ub: u64,
}

impl BoundReport {
    pub const FORMULAS: [(&'static str, &'static str); 4] = [
        ("rc_no_exchange_ub", "ceil(2 n ln(m n))"),
        ("rc_unlimited_ub", "ceil(16 (n + n ln(n) / m))"),
        ("rc_main_ub", "ceil(36 (n + n ln(n) / m))"),
        ("re_main_ub", "ceil(6 m ln(m n))"),
    ];

    pub fn new(n: u64, m: u64) -> Result<Self> {
        Ok(Self {
            n,
            m,
            rc_no_exchange_ub: rc_no_exchange_ub(n, m)?,
            rc_unlimited_ub: rc_unlimited_ub(n, m)?,
            rc_main_ub: rc_main_ub(n, m)?,
            re_main_ub: re_main_ub(n, m)?,
        })
    }

    /// `(name, formula, value)` rows in a fixed order.
    pub fn rows(&self) -> [(&'static str, &'static str, u64); 4] {
        let values = [
            self.rc_no_exchange_ub,
            self.rc_unlimited_ub,
            self.rc_main_ub,
            self.re_main_ub,
        ];
        let mut out = [("", "", 0); 4];
        for (slot, ((name, formula), value)) in
            out.iter_mut().zip(Self::FORMULAS.iter().zip(values))
        {
            *slot = (name, formula, value);
        }
        out
    }
}
