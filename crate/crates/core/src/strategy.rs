//! What two collectors do with their coupons when they meet.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::population::CouponCounts;
use crate::Error;

/// Exchange rule applied by every interacting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StrategyId {
    /// A partner with at least two copies of a coupon gives one to a partner
    /// with none. Applied to every coupon type, in both directions.
    SurplusToNeedy,
    /// One-for-one swaps: a spare copy of `i` for a spare copy of `j`, only when
    /// each side lacks what it receives.
    MutualBarter,
    /// Nobody gives anything.
    Null,
}

impl StrategyId {
    pub const ALL: [StrategyId; 3] = [Self::SurplusToNeedy, Self::MutualBarter, Self::Null];

    pub fn name(self) -> &'static str {
        match self {
            Self::SurplusToNeedy => "SurplusToNeedy",
            Self::MutualBarter => "MutualBarter",
            Self::Null => "Null",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = Error;

    /// Accepts `SurplusToNeedy`, `surplus_to_needy` and `surplus-to-needy`
    /// spellings (likewise for the other strategies).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut key = [0u8; 32];
        let mut len = 0;
        for b in s.bytes().filter(|b| *b != b'_' && *b != b'-') {
            if len == key.len() {
                return Err(Error::Domain("unknown strategy"));
            }
            key[len] = b.to_ascii_lowercase();
            len += 1;
        }
        match &key[..len] {
            b"surplustoneedy" => Ok(Self::SurplusToNeedy),
            b"mutualbarter" => Ok(Self::MutualBarter),
            b"null" => Ok(Self::Null),
            _ => Err(Error::Domain("unknown strategy")),
        }
    }
}

/// Unordered pair of distinct collectors, stored with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pair {
    pub first: u32,
    pub second: u32,
}

impl Pair {
    /// `None` when `a == b`.
    pub fn new(a: u32, b: u32) -> Option<Self> {
        match a.cmp(&b) {
            core::cmp::Ordering::Less => Some(Self {
                first: a,
                second: b,
            }),
            core::cmp::Ordering::Greater => Some(Self {
                first: b,
                second: a,
            }),
            core::cmp::Ordering::Equal => None,
        }
    }

    pub fn contains(&self, collector: u32) -> bool {
        self.first == collector || self.second == collector
    }
}

/// One copy of `coupon` moving from collector `from` to collector `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transfer {
    pub coupon: u32,
    pub from: u32,
    pub to: u32,
}

/// Transfers produced when `pair.first` (holding `a`) meets `pair.second`
/// (holding `b`). Pure function of the two count vectors; nothing is applied.
pub fn apply_strategy(
    strategy: StrategyId,
    pair: Pair,
    a: &CouponCounts,
    b: &CouponCounts,
) -> Vec<Transfer> {
    let mut out = Vec::new();
    plan_transfers(strategy, pair, a.as_slice(), b.as_slice(), &mut out);
    out
}

/// Appends the transfers for one interaction to `out`, in ascending coupon order.
pub(crate) fn plan_transfers(
    strategy: StrategyId,
    pair: Pair,
    a: &[u32],
    b: &[u32],
    out: &mut Vec<Transfer>,
) {
    assert_eq!(
        a.len(),
        b.len(),
        "collectors must track the same coupon types"
    );
    match strategy {
        StrategyId::SurplusToNeedy => {
            // Each coupon is decided independently, so one pass suffices.
            for (coupon, (&ka, &kb)) in a.iter().zip(b).enumerate() {
                let coupon = coupon as u32;
                if ka >= 2 && kb == 0 {
                    out.push(Transfer {
                        coupon,
                        from: pair.first,
                        to: pair.second,
                    });
                } else if kb >= 2 && ka == 0 {
                    out.push(Transfer {
                        coupon,
                        from: pair.second,
                        to: pair.first,
                    });
                }
            }
        }
        StrategyId::MutualBarter => {
            // a offers i (spare, b lacks it); b offers j (spare, a lacks it).
            // After a swap both coupons sit at count 1 on the receiving side
            // and can no longer qualify, so the scan never revisits them.
            let mut used_j = 0usize;
            for (i, (&ka, &kb)) in a.iter().zip(b).enumerate() {
                if !(ka >= 2 && kb == 0) {
                    continue;
                }
                let partner = (used_j..a.len()).find(|&j| b[j] >= 2 && a[j] == 0);
                let Some(j) = partner else { break };
                out.push(Transfer {
                    coupon: i as u32,
                    from: pair.first,
                    to: pair.second,
                });
                out.push(Transfer {
                    coupon: j as u32,
                    from: pair.second,
                    to: pair.first,
                });
                used_j = j + 1;
            }
        }
        StrategyId::Null => {}
    }
}
