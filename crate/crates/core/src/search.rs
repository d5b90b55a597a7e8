//! Searches for subtractive bases of `Z/pZ` with small `h`-fold sumsets.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modarith::{is_prime, GroupSpec};
use crate::rational::{self, Rational};
use crate::setops::{difference_set, h_fold_sumset, GroupSet};

pub const MAX_EXHAUSTIVE_P: u64 = 24;
pub const MAX_RANDOM_P: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: u64,
    pub h: u32,
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub best_set: Vec<u64>,
    pub best_sumset_size: u64,
    #[serde(with = "rational")]
    pub best_density: Rational,
    pub sets_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meets_epsilon: Option<bool>,
    #[serde(skip)]
    pub wall_time: Duration,
}

fn check_modulus(p: u64, h: u32, max: u64) -> Result<()> {
    if h == 0 {
        return Err(Error::invalid("h must be at least 1"));
    }
    if !is_prime(p) || p > max {
        return Err(Error::invalid(format!(
            "p = {p} must be a prime at most {max}"
        )));
    }
    if p <= u64::from(h) {
        return Err(Error::invalid(format!("p = {p} must exceed h = {h}")));
    }
    Ok(())
}

fn rot(mask: u32, by: u32, p: u32, full: u32) -> u32 {
    if by == 0 {
        mask
    } else {
        ((mask << by) | (mask >> (p - by))) & full
    }
}

fn bits(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).filter(move |b| mask >> b & 1 == 1)
}

/// Lexicographic order of the sorted residue lists of two masks.
fn lex_less(x: u32, y: u32) -> bool {
    let diff = x ^ y;
    if diff == 0 {
        return false;
    }
    let b = diff.trailing_zeros();
    if x >> b & 1 == 1 {
        // y lacks b: x wins unless y stops before b
        y >> b != 0
    } else {
        x >> b == 0
    }
}

/// True when no translate of `mask` has a lexicographically smaller residue list.
fn is_canonical(mask: u32, p: u32, full: u32) -> bool {
    mask & 1 == 1 && bits(mask).all(|a| !lex_less(rot(mask, (p - a) % p, p, full), mask))
}

fn difference_mask(mask: u32, p: u32, full: u32) -> u32 {
    bits(mask).fold(0, |d, a| d | rot(mask, (p - a) % p, p, full))
}

fn sumset_mask(mask: u32, h: u32, p: u32, full: u32) -> u32 {
    let mut s = mask;
    for _ in 1..h {
        s = bits(mask).fold(0, |acc, a| acc | rot(s, a, p, full));
    }
    s
}

fn verify_witness(p: u64, h: u32, set: &[u64], sumset_size: u64) -> Result<()> {
    let spec = Arc::new(GroupSpec::cyclic(h, &[p])?);
    let limits = Limits::default();
    let a = GroupSet::from_indices(&spec, set.iter().copied(), &limits)?;
    if !difference_set(&a)?.is_full() || h_fold_sumset(&a, h)?.len() != sumset_size {
        return Err(Error::invalid("search witness failed re-verification"));
    }
    Ok(())
}

/// Minimum of `|hA|` over all subtractive bases `A ⊆ Z/pZ`, one
/// representative per translation class. Ties go to the lexicographically
/// smallest residue list.
pub fn exhaustive_search(p: u64, h: u32) -> Result<SearchReport> {
    check_modulus(p, h, MAX_EXHAUSTIVE_P)?;
    let start = Instant::now();
    let pu = p as u32;
    let full = ((1u64 << p) - 1) as u32;

    let chunk = 1u32 << 12;
    let upper = 1u32 << (pu - 1);
    let (best, examined) = (0..upper.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut best: Option<(u32, u32)> = None;
            let mut examined = 0u64;
            for half in c * chunk..((c + 1) * chunk).min(upper) {
                let mask = (half << 1) | 1;
                let n = mask.count_ones();
                if n * n - n + 1 < pu || !is_canonical(mask, pu, full) {
                    continue;
                }
                examined += 1;
                if difference_mask(mask, pu, full) != full {
                    continue;
                }
                let size = sumset_mask(mask, h, pu, full).count_ones();
                if better(size, mask, best) {
                    best = Some((size, mask));
                }
            }
            (best, examined)
        })
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| {
                let pick = match (a, b) {
                    (Some(x), Some(y)) => Some(if better(y.0, y.1, Some(x)) { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                };
                (pick, na + nb)
            },
        );
    let (size, mask) = best.expect("the full set is a subtractive basis");
    let best_set: Vec<u64> = bits(mask).map(u64::from).collect();
    verify_witness(p, h, &best_set, u64::from(size))?;
    Ok(SearchReport {
        p,
        h,
        strategy: Strategy::Exhaustive,
        seed: None,
        best_set,
        best_sumset_size: u64::from(size),
        best_density: rational::ratio(i64::from(size), p as i64),
        sets_examined: examined,
        meets_epsilon: None,
        wall_time: start.elapsed(),
    })
}

fn better(size: u32, mask: u32, current: Option<(u32, u32)>) -> bool {
    match current {
        None => true,
        Some((s, m)) => size < s || (size == s && lex_less(mask, m)),
    }
}

/// Number of translation classes of nonempty subsets of `Z/pZ`, counted by
/// the same canonical form the exhaustive search uses.
pub fn canonical_class_count(p: u64) -> Result<u64> {
    if !is_prime(p) || p > MAX_EXHAUSTIVE_P {
        return Err(Error::invalid(format!(
            "p = {p} must be a prime at most {MAX_EXHAUSTIVE_P}"
        )));
    }
    let pu = p as u32;
    let full = ((1u64 << p) - 1) as u32;
    Ok((0..1u32 << (pu - 1))
        .into_par_iter()
        .filter(|&half| is_canonical((half << 1) | 1, pu, full))
        .count() as u64)
}

/// Hill climbing from the full set. The objective is the number of uncovered
/// differences, then `|hA|`, then `|A|`; moves toggle one residue and are
/// accepted when they do not make the objective worse. The walk restarts from
/// the full set after `iters / 8` steps without a strict improvement.
pub fn randomized_search(
    p: u64,
    h: u32,
    epsilon: Option<&Rational>,
    seed: u64,
    iters: u64,
) -> Result<SearchReport> {
    check_modulus(p, h, MAX_RANDOM_P)?;
    let start = Instant::now();
    let spec = Arc::new(GroupSpec::cyclic(h, &[p])?);
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let score = |set: &GroupSet| -> Result<(u64, u64, u64)> {
        let uncovered = p - difference_set(set)?.len();
        Ok((uncovered, h_fold_sumset(set, h)?.len(), set.len()))
    };

    let full = GroupSet::full(&spec, &limits)?;
    let mut current: Vec<u64> = (0..p).collect();
    let mut current_score = score(&full)?;
    let mut best = (current_score.1, current.clone());
    let patience = (iters / 8).max(1);
    let mut stale = 0u64;
    for _ in 0..iters {
        let x = rng.gen_range(0..p);
        let mut candidate = current.clone();
        match candidate.binary_search(&x) {
            Ok(pos) if candidate.len() > 1 => {
                candidate.remove(pos);
            }
            Ok(_) => continue,
            Err(pos) => candidate.insert(pos, x),
        }
        let set = GroupSet::from_indices(&spec, candidate.iter().copied(), &limits)?;
        let s = score(&set)?;
        if s < current_score {
            stale = 0;
        } else {
            stale += 1;
        }
        if s <= current_score {
            current = candidate;
            current_score = s;
            if s.0 == 0 && (s.1 < best.0 || (s.1 == best.0 && current < best.1)) {
                best = (s.1, current.clone());
            }
        }
        if stale >= patience {
            current = (0..p).collect();
            current_score = (0, p, p);
            stale = 0;
        }
    }
    verify_witness(p, h, &best.1, best.0)?;
    let density = rational::ratio(best.0 as i64, p as i64);
    Ok(SearchReport {
        p,
        h,
        strategy: Strategy::Random,
        seed: Some(seed),
        best_set: best.1,
        best_sumset_size: best.0,
        meets_epsilon: epsilon.map(|e| density < *e),
        best_density: density,
        sets_examined: iters,
        wall_time: start.elapsed(),
    })
}
