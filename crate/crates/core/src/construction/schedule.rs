use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::is_prime;
use crate::rational::{self, Rational};

/// Target density `ε` and the intermediate levels `0 < ε_1 < ... < ε_h < ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleJson", into = "ScheduleJson")]
pub struct EpsilonSchedule {
    epsilon: Rational,
    levels: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    #[serde(with = "rational")]
    epsilon: Rational,
    #[serde(with = "rational::vec")]
    levels: Vec<Rational>,
}

impl TryFrom<ScheduleJson> for EpsilonSchedule {
    type Error = Error;

    fn try_from(raw: ScheduleJson) -> Result<Self> {
        EpsilonSchedule::new(raw.epsilon, raw.levels)
    }
}

impl From<EpsilonSchedule> for ScheduleJson {
    fn from(s: EpsilonSchedule) -> Self {
        ScheduleJson {
            epsilon: s.epsilon,
            levels: s.levels,
        }
    }
}

impl EpsilonSchedule {
    pub fn new(epsilon: Rational, levels: Vec<Rational>) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                rational::format(&epsilon)
            )));
        }
        if levels.is_empty() {
            return Err(Error::invalid("schedule needs at least one level"));
        }
        if !levels[0].is_positive() {
            return Err(Error::invalid("epsilon_1 must be positive"));
        }
        for w in levels.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::invalid(format!(
                    "levels must increase strictly: {} >= {}",
                    rational::format(&w[0]),
                    rational::format(&w[1])
                )));
            }
        }
        if levels[levels.len() - 1] >= epsilon {
            return Err(Error::invalid("epsilon_h must be strictly below epsilon"));
        }
        Ok(EpsilonSchedule { epsilon, levels })
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn h(&self) -> u32 {
        self.levels.len() as u32
    }

    /// `ε_k` for `1 <= k <= h`.
    pub fn level(&self, k: u32) -> Result<&Rational> {
        (k as usize)
            .checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .ok_or_else(|| Error::invalid(format!("level {k} outside 1..={}", self.levels.len())))
    }
}

/// The uniform grid `ε_k = k·ε/(h+1)`.
pub fn default_schedule(h: u32, epsilon: &Rational) -> Result<EpsilonSchedule> {
    if h == 0 {
        return Err(Error::invalid("h must be at least 1"));
    }
    if !epsilon.is_positive() || *epsilon > rational::one() {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1], got {}",
            rational::format(epsilon)
        )));
    }
    let step = epsilon / rational::from_int(h + 1);
    let levels = (1..=h).map(|k| &step * rational::from_int(k)).collect();
    EpsilonSchedule::new(epsilon.clone(), levels)
}

/// Smallest prime `p` with `p > h` and `p > lower_bound`.
pub fn choose_module_size(lower_bound: &Rational, h: u32) -> Result<u64> {
    // p > bound  <=>  p >= floor(bound) + 1
    let floor = lower_bound.numer().div_floor(lower_bound.denom());
    let start = std::cmp::max(floor + BigInt::from(1), BigInt::from(u64::from(h) + 1));
    let mut p = start
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("module bound {start} exceeds 64 bits")))?;
    while !is_prime(p) {
        p = p
            .checked_add(1)
            .ok_or_else(|| Error::Overflow("no 64-bit prime above bound".into()))?;
    }
    Ok(p)
}

/// `(h + 1) / ε_1`, the size every initial module must exceed.
pub fn initial_module_bound(h: u32, schedule: &EpsilonSchedule) -> Rational {
    rational::from_int(h + 1) / &schedule.levels[0]
}

/// `n / (ε_{k+1} − ε_k)`, the size every stage-`k+1` module must exceed.
pub fn required_module_bound(
    n: &num_bigint::BigUint,
    schedule: &EpsilonSchedule,
    k: u32,
) -> Result<Rational> {
    if k < 1 || k >= schedule.h() {
        return Err(Error::invalid(format!(
            "stage {k} has no successor (need 1 <= k < {})",
            schedule.h()
        )));
    }
    let gap = schedule.level(k + 1)? - schedule.level(k)?;
    debug_assert!(!gap.is_zero());
    Ok(rational::from_int(BigInt::from(n.clone())) / gap)
}
