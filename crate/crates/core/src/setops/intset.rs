//! Finite sets of integers, kept apart from the group machinery so the
//! classical MSTD examples stay exact.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing list of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntSet(Vec<i64>);

impl IntSet {
    pub fn new(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        values.dedup();
        IntSet(values)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// `[lo, hi]` minus the listed exceptions.
    pub fn interval_without(lo: i64, hi: i64, missing: &[i64]) -> Self {
        IntSet::new((lo..=hi).filter(|x| !missing.contains(x)).collect())
    }
}

impl From<Vec<i64>> for IntSet {
    fn from(v: Vec<i64>) -> Self {
        IntSet::new(v)
    }
}

impl From<IntSet> for Vec<i64> {
    fn from(s: IntSet) -> Self {
        s.0
    }
}

fn pairwise(a: &IntSet, op: impl Fn(i64, i64) -> i64, what: &'static str) -> Result<IntSet> {
    if a.is_empty() {
        return Err(Error::EmptySet(what));
    }
    let out: BTreeSet<i64> =
        a.0.iter()
            .flat_map(|&x| a.0.iter().map(move |&y| (x, y)))
            .map(|(x, y)| op(x, y))
            .collect();
    Ok(IntSet(out.into_iter().collect()))
}

/// `A + A`
pub fn int_sumset(a: &IntSet) -> Result<IntSet> {
    pairwise(a, |x, y| x + y, "integer sumset")
}

/// `A - A`
pub fn int_difference(a: &IntSet) -> Result<IntSet> {
    pairwise(a, |x, y| x - y, "integer difference set")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MstdClass {
    /// More sums than differences.
    Mstd,
    Balanced,
    /// More differences than sums.
    Mdts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MstdReport {
    pub set: IntSet,
    pub sumset_size: usize,
    pub difference_size: usize,
    pub class: MstdClass,
    pub sumset: IntSet,
    pub difference_set: IntSet,
}

pub fn mstd_classify(a: &IntSet) -> Result<MstdReport> {
    let sums = int_sumset(a)?;
    let diffs = int_difference(a)?;
    let class = match sums.len().cmp(&diffs.len()) {
        std::cmp::Ordering::Greater => MstdClass::Mstd,
        std::cmp::Ordering::Equal => MstdClass::Balanced,
        std::cmp::Ordering::Less => MstdClass::Mdts,
    };
    Ok(MstdReport {
        set: a.clone(),
        sumset_size: sums.len(),
        difference_size: diffs.len(),
        class,
        sumset: sums,
        difference_set: diffs,
    })
}
