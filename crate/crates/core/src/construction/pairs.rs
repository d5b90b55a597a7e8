//! Admissible pairs: functions `α, β: W → {0..h}` with `Σ (α + β) = h`, stored
//! sparsely over their support.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairEntry {
    pub element: u64,
    pub alpha: u32,
    pub beta: u32,
}

impl PairEntry {
    pub fn new(element: u64, alpha: u32, beta: u32) -> Self {
        PairEntry {
            element,
            alpha,
            beta,
        }
    }

    pub fn weight(&self) -> u32 {
        self.alpha + self.beta
    }
}

/// An admissible pair, as its support sorted by element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct AdmissiblePair {
    support: Vec<PairEntry>,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    level: usize,
    support: Vec<PairEntry>,
}

impl TryFrom<PairJson> for AdmissiblePair {
    type Error = Error;

    fn try_from(raw: PairJson) -> Result<Self> {
        let pair = AdmissiblePair::new(raw.support)?;
        if pair.level() != raw.level {
            return Err(Error::Parse(format!(
                "pair declares level {} but has {} support points",
                raw.level,
                pair.level()
            )));
        }
        Ok(pair)
    }
}

impl From<AdmissiblePair> for PairJson {
    fn from(p: AdmissiblePair) -> Self {
        PairJson {
            level: p.level(),
            support: p.support,
        }
    }
}

impl AdmissiblePair {
    /// Sorts the entries; rejects repeated elements and zero-weight entries.
    pub fn new(mut support: Vec<PairEntry>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("an admissible pair has nonempty support"));
        }
        support.sort_unstable();
        for w in support.windows(2) {
            if w[0].element == w[1].element {
                return Err(Error::invalid(format!(
                    "element {} appears twice in the support",
                    w[0].element
                )));
            }
        }
        if let Some(e) = support.iter().find(|e| e.weight() == 0) {
            return Err(Error::invalid(format!(
                "support entry {} has alpha + beta = 0",
                e.element
            )));
        }
        Ok(AdmissiblePair { support })
    }

    /// Single-point pair `(α, β)` at `element`.
    pub fn single(element: u64, alpha: u32, beta: u32) -> Result<Self> {
        Self::new(vec![PairEntry::new(element, alpha, beta)])
    }

    pub fn support(&self) -> &[PairEntry] {
        &self.support
    }

    /// Number of support points.
    pub fn level(&self) -> usize {
        self.support.len()
    }

    /// `Σ (α + β)`; equals `h` for a pair admissible at `h`.
    pub fn total(&self) -> u32 {
        self.support.iter().map(PairEntry::weight).sum()
    }

    pub fn get(&self, element: u64) -> Option<(u32, u32)> {
        self.support
            .binary_search_by_key(&element, |e| e.element)
            .ok()
            .map(|i| (self.support[i].alpha, self.support[i].beta))
    }

    pub fn validate(&self, h: u32, group_size: u64) -> Result<()> {
        if self.total() != h {
            return Err(Error::invalid(format!(
                "pair has total weight {}, expected h = {h}",
                self.total()
            )));
        }
        if let Some(e) = self.support.iter().find(|e| e.element >= group_size) {
            return Err(Error::IndexOutOfRange {
                index: e.element,
                size: group_size,
            });
        }
        Ok(())
    }
}

/// All `level`-tuples of `(α_i, β_i)` with `α_i + β_i >= 1` and total `h`,
/// in lexicographic order of `(α_1, β_1, α_2, β_2, ...)`.
pub fn value_patterns(h: u32, level: usize) -> Vec<Vec<(u32, u32)>> {
    fn go(rem: u32, slots: usize, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if slots == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let later = slots as u32 - 1;
        for a in 0..=rem {
            for b in 0..=(rem - a) {
                let w = a + b;
                if w == 0 || rem - w < later || (slots == 1 && w != rem) {
                    continue;
                }
                cur.push((a, b));
                go(rem - w, slots - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if level >= 1 && level as u32 <= h {
        go(h, level, &mut Vec::with_capacity(level), &mut out);
    }
    out
}

/// Number of value patterns for a fixed support of size `level`:
/// compositions `s_1 + ... + s_level = h` into positive parts, each part
/// weighted by its `s_i + 1` splits into `(α_i, β_i)`.
pub fn pattern_count(h: u32, level: usize) -> BigUint {
    if level == 0 || level as u32 > h {
        return BigUint::zero();
    }
    let h = h as usize;
    let mut dp = vec![BigUint::zero(); h + 1];
    dp[0] = BigUint::one();
    for _ in 0..level {
        let mut next = vec![BigUint::zero(); h + 1];
        for (s, ways) in dp.iter().enumerate() {
            if ways.is_zero() {
                continue;
            }
            for t in 1..=(h - s) {
                next[s + t] += ways * BigUint::from(t as u64 + 1);
            }
        }
        dp = next;
    }
    dp[h].clone()
}

pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Number of admissible pairs on a group of order `group_size`, either of one
/// exact level or (with `level = None`) in total, which is `C(2N + h − 1, h)`.
pub fn count_admissible_pairs(group_size: u64, h: u32, level: Option<usize>) -> BigUint {
    let n = BigUint::from(group_size);
    match level {
        Some(l) => binomial(&n, l as u64) * pattern_count(h, l),
        None => (1..=h as usize)
            .map(|l| binomial(&n, l as u64) * pattern_count(h, l))
            .sum(),
    }
}

/// Pairs of one exact level, in lexicographic (support, values) order.
#[derive(Debug, Clone)]
pub struct PairEnumerator {
    group_size: u64,
    patterns: Vec<Vec<(u32, u32)>>,
    support: Vec<u64>,
    next_pattern: usize,
    done: bool,
}

impl Iterator for PairEnumerator {
    type Item = AdmissiblePair;

    fn next(&mut self) -> Option<AdmissiblePair> {
        if self.done {
            return None;
        }
        if self.next_pattern == self.patterns.len() {
            self.next_pattern = 0;
            if !advance_combination(&mut self.support, self.group_size) {
                self.done = true;
                return None;
            }
        }
        let pattern = &self.patterns[self.next_pattern];
        self.next_pattern += 1;
        let support = self
            .support
            .iter()
            .zip(pattern)
            .map(|(&element, &(alpha, beta))| PairEntry {
                element,
                alpha,
                beta,
            })
            .collect();
        Some(AdmissiblePair { support })
    }
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn advance_combination(c: &mut [u64], n: u64) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Every admissible pair of exact level `level` on a group of order
/// `group_size`. Refuses (reporting the exact count) when the count exceeds
/// the pair budget.
pub fn enumerate_admissible_pairs(
    group_size: u64,
    h: u32,
    level: usize,
    limits: &Limits,
) -> Result<PairEnumerator> {
    if level < 1 {
        return Err(Error::invalid("pair level must be at least 1"));
    }
    check_budget(
        "admissible pairs",
        &count_admissible_pairs(group_size, h, Some(level)),
        limits,
    )?;
    let patterns = value_patterns(h, level);
    let empty = patterns.is_empty() || (level as u64) > group_size;
    Ok(PairEnumerator {
        group_size,
        patterns,
        support: (0..level as u64).collect(),
        next_pattern: 0,
        done: empty,
    })
}

pub(crate) fn check_budget(what: &'static str, count: &BigUint, limits: &Limits) -> Result<()> {
    if *count > BigUint::from(limits.pair_budget) {
        Err(Error::BudgetExceeded {
            what,
            count: count.clone(),
            budget: limits.pair_budget,
        })
    } else {
        Ok(())
    }
}

/// A random admissible pair of the given level: uniform support, a random
/// composition of `h` into `level` parts, and a uniform `α` within each part.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    group_size: u64,
    h: u32,
    level: usize,
) -> Result<AdmissiblePair> {
    if level < 1 || level as u32 > h || level as u64 > group_size {
        return Err(Error::invalid(format!(
            "no pairs of level {level} with h = {h} on a group of order {group_size}"
        )));
    }
    let n = usize::try_from(group_size).map_err(|_| Error::Overflow("group order".into()))?;
    let mut support: Vec<u64> = sample(rng, n, level)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    support.sort_unstable();
    let mut cuts: Vec<u32> = if level > 1 {
        sample(rng, h as usize - 1, level - 1)
            .into_iter()
            .map(|c| c as u32 + 1)
            .collect()
    } else {
        Vec::new()
    };
    cuts.sort_unstable();
    cuts.push(h);
    let mut prev = 0;
    let entries = support
        .into_iter()
        .zip(cuts)
        .map(|(element, cut)| {
            let part = cut - prev;
            prev = cut;
            let alpha = rng.gen_range(0..=part);
            PairEntry::new(element, alpha, part - alpha)
        })
        .collect();
    AdmissiblePair::new(entries)
}

/// Up to `count` distinct pairs of exact level `level`. When the level has
/// at most `count` pairs in total, all of them are returned in enumeration
/// order; otherwise a seeded random sample, sorted.
pub fn sample_level_pairs<R: Rng + ?Sized>(
    rng: &mut R,
    group_size: u64,
    h: u32,
    level: usize,
    count: usize,
    limits: &Limits,
) -> Result<Vec<AdmissiblePair>> {
    let total = count_admissible_pairs(group_size, h, Some(level));
    if total.is_zero() {
        return Err(Error::invalid(format!(
            "no admissible pairs of level {level} on a group of order {group_size}"
        )));
    }
    if total <= BigUint::from(count as u64) {
        return Ok(enumerate_admissible_pairs(group_size, h, level, limits)?.collect());
    }
    let mut chosen = BTreeSet::new();
    while chosen.len() < count {
        chosen.insert(random_pair(rng, group_size, h, level)?);
    }
    Ok(chosen.into_iter().collect())
}

/// Splits of one hat entry `(a, b)` over `m` distinct fiber points: sequences
/// `(γ_j, δ_j)` with `γ_j + δ_j >= 1`, `Σ γ_j = a`, `Σ δ_j = b`.
fn split_patterns(a: u32, b: u32, m: usize) -> Vec<Vec<(u32, u32)>> {
    fn go(a: u32, b: u32, slots: usize, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if slots == 0 {
            if a == 0 && b == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for g in 0..=a {
            for d in 0..=b {
                if g + d == 0 || (a - g) + (b - d) < slots as u32 - 1 {
                    continue;
                }
                cur.push((g, d));
                go(a - g, b - d, slots - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(a, b, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Visits every pair on the larger group whose fiber sums equal `hat` and
/// whose level is at most `max_level`. The larger group's elements over base
/// element `w` are the contiguous block `w·fiber .. (w+1)·fiber`.
///
/// Returns the number of pairs visited; refuses up front, with the exact
/// count, when that number exceeds the pair budget.
pub fn for_each_lift(
    hat: &AdmissiblePair,
    fiber: u64,
    max_level: usize,
    limits: &Limits,
    mut visit: impl FnMut(&[PairEntry]) -> Result<()>,
) -> Result<u64> {
    let total = count_lifts(hat, fiber, max_level);
    check_budget("lifted pairs", &total, limits)?;

    type Split = Vec<(u32, u32)>;
    struct Choice {
        base: u64,
        // (number of fiber points, ways to spread the entry over them)
        splits: Vec<(usize, Vec<Split>)>,
    }
    let choices: Vec<Choice> = hat
        .support()
        .iter()
        .map(|e| Choice {
            base: e.element * fiber,
            splits: (1..=e.weight() as usize)
                .filter(|&m| m as u64 <= fiber)
                .map(|m| (m, split_patterns(e.alpha, e.beta, m)))
                .collect(),
        })
        .collect();

    fn rec(
        choices: &[Choice],
        at: usize,
        budget: usize,
        fiber: u64,
        cur: &mut Vec<PairEntry>,
        visited: &mut u64,
        visit: &mut dyn FnMut(&[PairEntry]) -> Result<()>,
    ) -> Result<()> {
        if at == choices.len() {
            *visited += 1;
            return visit(cur);
        }
        let remaining_after = choices.len() - at - 1;
        let c = &choices[at];
        for (m, patterns) in &c.splits {
            if *m + remaining_after > budget {
                continue;
            }
            let mut points: Vec<u64> = (0..*m as u64).collect();
            loop {
                for pat in patterns {
                    let mark = cur.len();
                    cur.extend(
                        points
                            .iter()
                            .zip(pat)
                            .map(|(&off, &(g, d))| PairEntry::new(c.base + off, g, d)),
                    );
                    rec(choices, at + 1, budget - m, fiber, cur, visited, visit)?;
                    cur.truncate(mark);
                }
                if !advance_combination(&mut points, fiber) {
                    break;
                }
            }
        }
        Ok(())
    }

    let mut visited = 0u64;
    rec(
        &choices,
        0,
        max_level,
        fiber,
        &mut Vec::with_capacity(max_level),
        &mut visited,
        &mut visit,
    )?;
    debug_assert_eq!(BigUint::from(visited), total);
    Ok(visited)
}

/// Exact number of pairs [`for_each_lift`] would visit.
pub fn count_lifts(hat: &AdmissiblePair, fiber: u64, max_level: usize) -> BigUint {
    // knapsack over total level
    let mut dp = vec![BigUint::zero(); max_level + 1];
    dp[0] = BigUint::one();
    let f = BigUint::from(fiber);
    for e in hat.support() {
        let mut next = vec![BigUint::zero(); max_level + 1];
        for (used, ways) in dp.iter().enumerate() {
            if ways.is_zero() {
                continue;
            }
            for m in 1..=e.weight() as usize {
                if used + m > max_level {
                    break;
                }
                let splits = split_patterns(e.alpha, e.beta, m).len() as u64;
                next[used + m] += ways * binomial(&f, m as u64) * BigUint::from(splits);
            }
        }
        dp = next;
    }
    dp.into_iter().sum()
}
