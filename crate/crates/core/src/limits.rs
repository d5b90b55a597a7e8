use crate::error::{Error, Result};

/// Hard ceiling on the number of group elements any bitset may address (8 MiB per set).
pub const MAX_GROUP_CAP: u64 = 1 << 26;

/// Default ceiling on the number of admissible pairs a single enumeration may visit.
pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;

/// Resource limits consulted wherever a group is materialized or pairs are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cap: u64,
    pub pair_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cap: MAX_GROUP_CAP,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl Limits {
    pub fn new(cap: u64, pair_budget: u64) -> Result<Self> {
        if cap == 0 || cap > MAX_GROUP_CAP {
            return Err(Error::invalid(format!(
                "cap must lie in 1..={MAX_GROUP_CAP}, got {cap}"
            )));
        }
        Ok(Limits { cap, pair_budget })
    }

    pub fn check_size(&self, size: u64) -> Result<()> {
        if size > self.cap {
            Err(Error::CapExceeded {
                size: size.to_string(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}
