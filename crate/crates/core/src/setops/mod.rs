//! Subsets of a finite group as bitsets: difference sets, iterated sumsets and
//! images of linear forms. Integer-set operations for the MSTD examples live in
//! [`intset`].

mod bitset;
pub mod intset;

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bitset::BitSet;
pub use intset::{int_difference, int_sumset, mstd_classify, IntSet, MstdClass, MstdReport};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modarith::{Element, GroupSpec};
use crate::rational::Rational;

/// A subset of a finite group, stored as a membership bitset over element indices.
#[derive(Debug, Clone)]
pub struct GroupSet {
    spec: Arc<GroupSpec>,
    bits: BitSet,
    cardinality: u64,
}

impl PartialEq for GroupSet {
    fn eq(&self, other: &Self) -> bool {
        same_spec(&self.spec, &other.spec) && self.bits == other.bits
    }
}

impl Eq for GroupSet {}

fn same_spec(a: &Arc<GroupSpec>, b: &Arc<GroupSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupSet {
    pub fn empty(spec: &Arc<GroupSpec>, limits: &Limits) -> Result<Self> {
        limits.check_size(spec.total_size())?;
        Ok(Self::from_bits(
            spec.clone(),
            BitSet::new(spec.total_size() as usize),
        ))
    }

    pub fn full(spec: &Arc<GroupSpec>, limits: &Limits) -> Result<Self> {
        limits.check_size(spec.total_size())?;
        Ok(Self::from_bits(
            spec.clone(),
            BitSet::full(spec.total_size() as usize),
        ))
    }

    pub fn from_indices(
        spec: &Arc<GroupSpec>,
        indices: impl IntoIterator<Item = u64>,
        limits: &Limits,
    ) -> Result<Self> {
        limits.check_size(spec.total_size())?;
        let mut bits = BitSet::new(spec.total_size() as usize);
        for i in indices {
            spec.check_index(i)?;
            bits.set(i as usize);
        }
        Ok(Self::from_bits(spec.clone(), bits))
    }

    pub fn from_elements(
        spec: &Arc<GroupSpec>,
        elements: &[Element],
        limits: &Limits,
    ) -> Result<Self> {
        let indices = elements
            .iter()
            .map(|e| spec.encode(e.digits()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(spec, indices, limits)
    }

    pub(crate) fn from_bits(spec: Arc<GroupSpec>, bits: BitSet) -> Self {
        debug_assert_eq!(bits.len() as u64, spec.total_size());
        let cardinality = bits.count_ones();
        GroupSet {
            spec,
            bits,
            cardinality,
        }
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn len(&self) -> u64 {
        self.cardinality
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    pub fn is_full(&self) -> bool {
        self.cardinality == self.spec.total_size()
    }

    pub fn contains_index(&self, i: u64) -> bool {
        i < self.spec.total_size() && self.bits.get(i as usize)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.spec
            .encode(e.digits())
            .map(|i| self.bits.get(i as usize))
            .unwrap_or(false)
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn elements(&self) -> Vec<Element> {
        self.indices()
            .map(|i| self.spec.decode(i).expect("index below group order"))
            .collect()
    }

    fn check_same_spec(&self, other: &GroupSet) -> Result<()> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "sets live in different groups: {} vs {}",
                self.spec, other.spec
            )))
        }
    }

    pub fn union(&self, other: &GroupSet) -> Result<GroupSet> {
        self.check_same_spec(other)?;
        let mut bits = self.bits.clone();
        bits.or_assign(&other.bits);
        Ok(Self::from_bits(self.spec.clone(), bits))
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<GroupSet> {
        self.check_same_spec(other)?;
        let mut bits = self.bits.clone();
        bits.and_assign(&other.bits);
        Ok(Self::from_bits(self.spec.clone(), bits))
    }

    pub fn is_subset_of(&self, other: &GroupSet) -> Result<bool> {
        self.check_same_spec(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Image of the set under an index map into another group.
    pub fn map_into(
        &self,
        target: &Arc<GroupSpec>,
        limits: &Limits,
        f: impl Fn(u64) -> u64,
    ) -> Result<GroupSet> {
        GroupSet::from_indices(target, self.indices().map(f), limits)
    }

    pub fn to_json(&self, pretty: bool) -> SetJson {
        SetJson {
            spec: (*self.spec).clone(),
            cardinality: Some(self.cardinality),
            elements: pretty.then(|| self.elements()),
            bitset: (!pretty).then(|| self.bits.to_hex()),
        }
    }

    pub fn from_json(json: SetJson, limits: &Limits) -> Result<GroupSet> {
        let spec = Arc::new(json.spec);
        let set = match (json.elements, json.bitset) {
            (Some(elements), None) => GroupSet::from_elements(&spec, &elements, limits)?,
            (None, Some(hex)) => {
                limits.check_size(spec.total_size())?;
                let bits = BitSet::from_hex(&hex, spec.total_size() as usize)?;
                GroupSet::from_bits(spec, bits)
            }
            _ => {
                return Err(Error::Parse(
                    "set JSON needs exactly one of \"elements\" or \"bitset\"".into(),
                ))
            }
        };
        if let Some(c) = json.cardinality {
            if c != set.len() {
                return Err(Error::Parse(format!(
                    "declared cardinality {c} disagrees with {} members",
                    set.len()
                )));
            }
        }
        Ok(set)
    }
}

/// Serialized form of a [`GroupSet`]: either an explicit coordinate list or a
/// compact hex bitset (see [`BitSet::to_hex`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetJson {
    pub spec: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitset: Option<String>,
}

/// `F(x_1, ..., x_h) = Σ r_i x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LinearForm {
    coefficients: Vec<i64>,
}

impl LinearForm {
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid(
                "a linear form needs at least one coefficient",
            ));
        }
        Ok(LinearForm { coefficients })
    }

    /// `x_1 + ... + x_h`
    pub fn sum(h: usize) -> Result<Self> {
        Self::new(vec![1; h])
    }

    /// `x_1 - x_2`
    pub fn difference() -> Self {
        LinearForm {
            coefficients: vec![1, -1],
        }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }
}

impl TryFrom<Vec<i64>> for LinearForm {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        LinearForm::new(v)
    }
}

impl From<LinearForm> for Vec<i64> {
    fn from(f: LinearForm) -> Self {
        f.coefficients
    }
}

/// Work above which a sumset is split across the rayon pool.
const PARALLEL_THRESHOLD: u64 = 1 << 22;

/// ORs `src + shift` into `dst`.
///
/// Dense sources are moved row by row, a row being one full cycle of the least
/// significant digit; within a row the translation is a cyclic rotation and the
/// remaining digits only relabel which row it lands in. Sparse sources are
/// translated element by element.
fn translate_or(spec: &GroupSpec, src: &BitSet, src_count: u64, shift: u64, dst: &mut BitSet) {
    let radices = spec.radices();
    let nd = radices.len();
    let row_len = radices[nd - 1];
    let rows = spec.total_size() / row_len;
    let dense_cost = rows + spec.total_size() / 64;
    if src_count.saturating_mul(nd as u64) < dense_cost {
        for i in src.iter_ones() {
            dst.set(spec.add_indices(i as u64, shift) as usize);
        }
        return;
    }

    let row_shift = (shift % row_len) as usize;
    let hi = &radices[..nd - 1];
    let mut shift_digits = vec![0u64; nd];
    spec.decode_into(shift, &mut shift_digits);
    let strides = spec.strides();

    // Odometer over the high digits of the source row and its translate.
    let mut row_digits = vec![0u64; nd - 1];
    let mut target_digits: Vec<u64> = shift_digits[..nd - 1].to_vec();
    let mut target_row: u64 = target_digits
        .iter()
        .zip(strides)
        .map(|(&d, &s)| d * s)
        .sum::<u64>()
        / row_len;
    let row_len = row_len as usize;
    for r in 0..rows as usize {
        dst.or_rotated_from(
            target_row as usize * row_len,
            src,
            r * row_len,
            row_len,
            row_shift,
        );
        let mut d = hi.len();
        while d > 0 {
            d -= 1;
            let m = hi[d];
            let step = strides[d] / row_len as u64;
            row_digits[d] += 1;
            if target_digits[d] + 1 == m {
                target_digits[d] = 0;
                target_row -= (m - 1) * step;
            } else {
                target_digits[d] += 1;
                target_row += step;
            }
            if row_digits[d] == m {
                row_digits[d] = 0;
            } else {
                break;
            }
        }
    }
}

/// `A + B = {a + b}`.
pub fn sumset(a: &GroupSet, b: &GroupSet) -> Result<GroupSet> {
    a.check_same_spec(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("sumset"));
    }
    let (iter_set, moved) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let spec = &a.spec;
    let n = spec.total_size() as usize;
    let shifts: Vec<u64> = iter_set.indices().collect();
    let work = shifts.len() as u64 * (spec.total_size() / 64 + 1);

    let bits = if work >= PARALLEL_THRESHOLD && shifts.len() > 1 {
        let chunk = shifts
            .len()
            .div_ceil(rayon::current_num_threads().max(1) * 4)
            .max(1);
        shifts
            .par_chunks(chunk)
            .map(|part| {
                let mut acc = BitSet::new(n);
                for &s in part {
                    translate_or(spec, &moved.bits, moved.cardinality, s, &mut acc);
                }
                acc
            })
            .reduce(
                || BitSet::new(n),
                |mut x, y| {
                    x.or_assign(&y);
                    x
                },
            )
    } else {
        let mut acc = BitSet::new(n);
        for (k, &s) in shifts.iter().enumerate() {
            translate_or(spec, &moved.bits, moved.cardinality, s, &mut acc);
            if k % 64 == 63 && acc.is_all() {
                break;
            }
        }
        acc
    };
    Ok(GroupSet::from_bits(spec.clone(), bits))
}

/// `hA`, computed as `h - 1` successive folds `(kA) + A`.
pub fn h_fold_sumset(a: &GroupSet, h: u32) -> Result<GroupSet> {
    if h < 1 {
        return Err(Error::invalid("h-fold sumset needs h >= 1"));
    }
    if a.is_empty() {
        return Err(Error::EmptySet("h-fold sumset"));
    }
    let mut acc = a.clone();
    for _ in 1..h {
        if acc.is_full() {
            break;
        }
        acc = sumset(&acc, a)?;
    }
    Ok(acc)
}

/// `-A`
pub fn negate(a: &GroupSet) -> GroupSet {
    scale(a, -1)
}

/// `r·A = {r a : a ∈ A}` (a dilate, not a sumset).
pub fn scale(a: &GroupSet, r: i64) -> GroupSet {
    let mut bits = BitSet::new(a.bits.len());
    for i in a.indices() {
        bits.set(a.spec.scalar_mul_index(r, i) as usize);
    }
    GroupSet::from_bits(a.spec.clone(), bits)
}

/// `A - A`
pub fn difference_set(a: &GroupSet) -> Result<GroupSet> {
    if a.is_empty() {
        return Err(Error::EmptySet("difference set"));
    }
    let d = sumset(a, &negate(a))?;
    debug_assert!(d.contains_index(0));
    debug_assert!(d.indices().all(|i| d.contains_index(d.spec.neg_index(i))));
    Ok(d)
}

/// `F(A) = {Σ r_i a_i : a_i ∈ A}`, the sumset of the dilates `r_i·A`.
pub fn linear_form_image(form: &LinearForm, a: &GroupSet) -> Result<GroupSet> {
    if a.is_empty() {
        return Err(Error::EmptySet("linear form image"));
    }
    let mut coeffs = form.coefficients().iter();
    let first = *coeffs.next().expect("nonempty form");
    let mut acc = scale(a, first);
    for &r in coeffs {
        acc = sumset(&acc, &scale(a, r))?;
    }
    Ok(acc)
}

/// `A - A = W`
pub fn is_subtractive_basis(a: &GroupSet) -> bool {
    !a.is_empty() && difference_set(a).map(|d| d.is_full()).unwrap_or(false)
}

/// `|A| / |W|`, exact.
pub fn density(a: &GroupSet) -> Rational {
    Rational::new(BigInt::from(a.len()), BigInt::from(a.spec.total_size()))
}
