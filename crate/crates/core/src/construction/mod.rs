//! The layered construction of `(W_k, f_k)`.
//!
//! Stage 1 is the group `W_1 = M_0 ⊕ ... ⊕ M_h` with the closed-form map
//! `f_1`, chosen so that every element of the level-1 set has a zero
//! coordinate. Stage `k+1` appends one module per admissible pair of level
//! `k+1` on `W_k`.
//!
//! For `h >= 2` the full pair set is far too large to materialize (31 000
//! modules already for `W_1 = (Z/5)^3`), so two paths exist:
//!
//! - [`full_inductive_plan`] computes the pair count, the module-size bound and
//!   the resulting group symbolically;
//! - [`inductive_step`] materializes the next stage for any chosen subset of
//!   the level-`k+1` pairs. Unless the subset is the full set and every module
//!   clears the size bound, the result is flagged [`Taint::Restricted`]: the
//!   structural properties still hold, the counting bound is not claimed.

mod fn_table;
pub mod pairs;
mod schedule;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use fn_table::FnTable;
pub use pairs::{
    count_admissible_pairs, enumerate_admissible_pairs, for_each_lift, random_pair,
    sample_level_pairs, AdmissiblePair, PairEntry,
};
pub use schedule::{
    choose_module_size, default_schedule, initial_module_bound, required_module_bound,
    EpsilonSchedule,
};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modarith::{Element, GroupSpec, ModuleSpec};
use crate::rational::{self, Rational};
use crate::setops::{BitSet, GroupSet};

/// A waived precondition that qualifies every downstream result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taint {
    /// A module size was forced below the required lower bound.
    BoundWaived,
    /// An inductive stage used only a subset of the admissible pairs or
    /// undersized modules.
    Restricted,
}

impl std::fmt::Display for Taint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Taint::BoundWaived => "bound-waived",
            Taint::Restricted => "restricted",
        })
    }
}

/// What was decided at one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: u32,
    /// Number of admissible pairs of level exactly `stage` on the previous
    /// group (decimal string; absent for stage 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_count: Option<String>,
    /// Pairs actually given a module.
    pub pairs_used: usize,
    pub module_sizes: Vec<u64>,
    /// Every module of this stage must exceed this size for the density bound.
    #[serde(with = "rational")]
    pub required_bound: Rational,
    pub taints: Vec<Taint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `(W_k, f_k)` together with its schedule and build history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct ConstructionState {
    h: u32,
    k: u32,
    spec: Arc<GroupSpec>,
    f: FnTable,
    schedule: EpsilonSchedule,
    history: Vec<StageRecord>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    h: u32,
    k: u32,
    schedule: EpsilonSchedule,
    spec: GroupSpec,
    f: FnTable,
    history: Vec<StageRecord>,
    restricted: bool,
    taints: Vec<Taint>,
}

impl TryFrom<StateJson> for ConstructionState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let state = ConstructionState {
            h: raw.h,
            k: raw.k,
            spec: Arc::new(raw.spec),
            f: raw.f,
            schedule: raw.schedule,
            history: raw.history,
        };
        state.validate()?;
        if state.is_restricted() != raw.restricted || state.taints() != raw.taints {
            return Err(Error::Parse(
                "restricted flag or taints disagree with the stage history".into(),
            ));
        }
        Ok(state)
    }
}

impl From<ConstructionState> for StateJson {
    fn from(s: ConstructionState) -> Self {
        StateJson {
            restricted: s.is_restricted(),
            taints: s.taints(),
            h: s.h,
            k: s.k,
            schedule: s.schedule,
            spec: (*s.spec).clone(),
            f: s.f,
            history: s.history,
        }
    }
}

impl ConstructionState {
    /// Assembles a state from parts, e.g. with a hand-built or mutated `f`.
    pub fn from_parts(
        h: u32,
        k: u32,
        spec: GroupSpec,
        f: FnTable,
        schedule: EpsilonSchedule,
        history: Vec<StageRecord>,
    ) -> Result<Self> {
        let s = ConstructionState {
            h,
            k,
            spec: Arc::new(spec),
            f,
            schedule,
            history,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.h {
            return Err(Error::invalid(format!(
                "stage {} outside 1..={}",
                self.k, self.h
            )));
        }
        if self.schedule.h() != self.h || self.spec.h() != self.h {
            return Err(Error::invalid("schedule, group and state disagree on h"));
        }
        if self.history.len() != self.k as usize {
            return Err(Error::invalid(format!(
                "stage {} needs {} history records, found {}",
                self.k,
                self.k,
                self.history.len()
            )));
        }
        self.f.check(&self.spec)
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn f(&self) -> &FnTable {
        &self.f
    }

    pub fn schedule(&self) -> &EpsilonSchedule {
        &self.schedule
    }

    pub fn history(&self) -> &[StageRecord] {
        &self.history
    }

    pub fn is_restricted(&self) -> bool {
        self.history
            .iter()
            .any(|r| r.taints.contains(&Taint::Restricted))
    }

    /// Union of the taints of every stage, sorted.
    pub fn taints(&self) -> Vec<Taint> {
        let mut t: Vec<Taint> = self
            .history
            .iter()
            .flat_map(|r| r.taints.iter().copied())
            .collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn warnings(&self) -> Vec<String> {
        self.history
            .iter()
            .flat_map(|r| r.warnings.iter().cloned())
            .collect()
    }

    /// The stage this one was built from, if it came from an inductive step.
    pub fn previous(&self) -> Option<ConstructionState> {
        match &self.f {
            FnTable::InductiveLayer {
                base, base_spec, ..
            } => Some(ConstructionState {
                h: self.h,
                k: self.k - 1,
                spec: Arc::new(base_spec.clone()),
                f: (**base).clone(),
                schedule: self.schedule.clone(),
                history: self.history[..self.k as usize - 1].to_vec(),
            }),
            _ => None,
        }
    }

    /// The pairs attached to the most recent inductive stage, in module order.
    pub fn layer_pairs(&self) -> Option<&[AdmissiblePair]> {
        self.f.layer_pairs()
    }

    /// Replaces `f` by its tabulated form, e.g. to perturb entries.
    pub fn with_explicit_f(&self, table: Vec<u64>) -> Result<ConstructionState> {
        let f = FnTable::Explicit { table };
        f.check(&self.spec)?;
        Ok(ConstructionState { f, ..self.clone() })
    }
}

/// Explicit module sizes for [`build_initial`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeOverride {
    pub modules: Vec<ModuleSpec>,
    /// Accept modules below the size bound (tainting the state), and fewer
    /// than `h + 1` modules.
    pub force: bool,
}

/// Stage 1: `W_1 = M_0 ⊕ ... ⊕ M_h` with `|M_i| > (h+1)/ε_1` and the closed-form `f_1`.
pub fn build_initial(
    h: u32,
    schedule: &EpsilonSchedule,
    size_override: Option<SizeOverride>,
) -> Result<ConstructionState> {
    if schedule.h() != h {
        return Err(Error::invalid(format!(
            "schedule has {} levels, expected h = {h}",
            schedule.h()
        )));
    }
    let bound = initial_module_bound(h, schedule);
    let mut taints = Vec::new();
    let mut warnings = Vec::new();
    let modules = match size_override {
        None => vec![ModuleSpec::Cyclic(choose_module_size(&bound, h)?); h as usize + 1],
        Some(SizeOverride { modules, force }) => {
            let count_ok = if force {
                !modules.is_empty() && modules.len() <= h as usize + 1
            } else {
                modules.len() == h as usize + 1
            };
            if !count_ok {
                return Err(Error::invalid(format!(
                    "initial group needs h + 1 = {} modules, got {}",
                    h + 1,
                    modules.len()
                )));
            }
            if modules.len() != h as usize + 1 {
                warnings.push(format!(
                    "forced initial group has {} modules instead of h + 1 = {}",
                    modules.len(),
                    h + 1
                ));
                push_unique(&mut taints, Taint::BoundWaived);
            }
            for m in &modules {
                m.validate(h)?;
                let size = m.size()?;
                if rational::from_int(size) <= bound {
                    if !force {
                        return Err(Error::invalid(format!(
                            "module {m} has size {size}, must exceed (h+1)/eps_1 = {}",
                            rational::format(&bound)
                        )));
                    }
                    warnings.push(format!(
                        "module {m} is below the size bound {} (forced)",
                        rational::format(&bound)
                    ));
                    push_unique(&mut taints, Taint::BoundWaived);
                }
            }
            modules
        }
    };
    let spec = GroupSpec::new(h, modules)?;
    let record = StageRecord {
        stage: 1,
        pair_count: None,
        pairs_used: 0,
        module_sizes: spec.module_sizes()?,
        required_bound: bound,
        taints,
        warnings,
    };
    ConstructionState::from_parts(
        h,
        1,
        spec,
        FnTable::InitialClosedForm { h },
        schedule.clone(),
        vec![record],
    )
}

fn push_unique(v: &mut Vec<Taint>, t: Taint) {
    if !v.contains(&t) {
        v.push(t);
    }
}

/// `A(W, f) = {w + f(w) : w ∈ W} ∪ {f(w) : w ∈ W}`.
pub fn build_a(state: &ConstructionState, limits: &Limits) -> Result<GroupSet> {
    let spec = state.spec();
    let table = state.f.materialize(spec, limits)?;
    let mut bits = BitSet::new(spec.total_size() as usize);
    for (w, &fw) in table.iter().enumerate() {
        bits.set(fw as usize);
        bits.set(spec.add_indices(w as u64, fw) as usize);
    }
    Ok(GroupSet::from_bits(spec.clone(), bits))
}

/// `z = Σ α(w)(w + f(w)) + β(w) f(w)`.
pub fn represent(pair: &AdmissiblePair, state: &ConstructionState) -> Result<Element> {
    let spec = state.spec();
    pair.validate(state.h, spec.total_size())?;
    let mut z = spec.zero();
    for e in pair.support() {
        let w = spec.decode(e.element)?;
        let fw = state.f.eval(spec, &w)?;
        let term = spec.add_unchecked(
            &spec.scalar_mul_unchecked(i64::from(e.alpha), &w),
            &spec.scalar_mul_unchecked(i64::from(e.weight()), &fw),
        );
        z = spec.add_unchecked(&z, &term);
    }
    Ok(z)
}

/// Index form of [`represent`] against a tabulated `f`.
pub(crate) fn represent_index(spec: &GroupSpec, table: &[u64], entries: &[PairEntry]) -> u64 {
    entries.iter().fold(0, |z, e| {
        let w = e.element;
        let t = spec.add_indices(
            spec.scalar_mul_index(i64::from(e.alpha), w),
            spec.scalar_mul_index(i64::from(e.weight()), table[w as usize]),
        );
        spec.add_indices(z, t)
    })
}

/// Total number of pairs of level at most `level`.
pub fn count_pairs_up_to(group_size: u64, h: u32, level: usize) -> BigUint {
    (1..=level)
        .map(|l| count_admissible_pairs(group_size, h, Some(l)))
        .sum()
}

/// `L_ℓ(W, f)`: every element represented by a pair of level at most `ℓ`.
pub fn level_set(state: &ConstructionState, level: usize, limits: &Limits) -> Result<GroupSet> {
    if level < 1 || level as u32 > state.h {
        return Err(Error::invalid(format!(
            "level {level} outside 1..={}",
            state.h
        )));
    }
    let spec = state.spec();
    limits.check_size(spec.total_size())?;
    pairs::check_budget(
        "pairs up to the requested level",
        &count_pairs_up_to(spec.total_size(), state.h, level),
        limits,
    )?;
    let table = state.f.materialize(spec, limits)?;
    let mut bits = BitSet::new(spec.total_size() as usize);
    for l in 1..=level {
        for pair in enumerate_admissible_pairs(spec.total_size(), state.h, l, limits)? {
            bits.set(represent_index(spec, &table, pair.support()) as usize);
        }
    }
    Ok(GroupSet::from_bits(spec.clone(), bits))
}

/// Order of the fiber of `π_0: W_{k+1} → W_k`.
pub fn fiber_size(upper: &GroupSpec, lower: &GroupSpec) -> Result<u64> {
    if !upper.has_prefix(lower) {
        return Err(Error::SpecMismatch(format!(
            "{lower} is not a leading summand of {upper}"
        )));
    }
    Ok(upper.total_size() / lower.total_size())
}

/// `π_0` on indices: the leading summand is the most significant block.
pub fn project_index(index: u64, fiber: u64) -> u64 {
    index / fiber
}

/// Sums a pair on `W_{k+1}` over the fibers of `π_0`, giving the pair
/// `(γ̂, δ̂)` on `W_k`.
pub fn hat_projection(
    pair: &AdmissiblePair,
    upper: &GroupSpec,
    lower: &GroupSpec,
) -> Result<AdmissiblePair> {
    let fiber = fiber_size(upper, lower)?;
    let mut acc: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    for e in pair.support() {
        upper.check_index(e.element)?;
        let v = acc.entry(project_index(e.element, fiber)).or_default();
        v.0 += e.alpha;
        v.1 += e.beta;
    }
    AdmissiblePair::new(
        acc.into_iter()
            .map(|(w, (a, b))| PairEntry::new(w, a, b))
            .collect(),
    )
}

/// Stage `k → k+1` for a chosen set of level-`k+1` pairs, one module per pair.
pub fn inductive_step(
    state: &ConstructionState,
    pairs: Vec<AdmissiblePair>,
    modules: Vec<ModuleSpec>,
) -> Result<ConstructionState> {
    let k = state.k;
    if k >= state.h {
        return Err(Error::invalid(format!(
            "state is already at the final stage {}",
            state.h
        )));
    }
    if pairs.is_empty() {
        return Err(Error::invalid("inductive step needs at least one pair"));
    }
    if pairs.len() != modules.len() {
        return Err(Error::invalid(format!(
            "{} pairs but {} module sizes",
            pairs.len(),
            modules.len()
        )));
    }
    let base_size = state.spec.total_size();
    for p in &pairs {
        p.validate(state.h, base_size)?;
        if p.level() != k as usize + 1 {
            return Err(Error::invalid(format!(
                "pair has level {}, stage {} needs level exactly {}",
                p.level(),
                k + 1,
                k + 1
            )));
        }
    }
    let mut sorted = pairs.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != pairs.len() {
        return Err(Error::invalid("the same pair was listed twice"));
    }

    let n = count_admissible_pairs(base_size, state.h, Some(k as usize + 1));
    let bound = required_module_bound(&n, &state.schedule, k)?;
    let spec = state.spec.extend(&modules)?;
    let sizes: Vec<u64> = modules
        .iter()
        .map(ModuleSpec::size)
        .collect::<Result<_>>()?;
    let all_pairs = BigUint::from(pairs.len()) == n;
    let all_large = sizes.iter().all(|&s| rational::from_int(s) > bound);
    let mut taints = Vec::new();
    let mut warnings = Vec::new();
    if !(all_pairs && all_large) {
        taints.push(Taint::Restricted);
        if !all_pairs {
            warnings.push(format!("restricted to {} of {n} pairs", pairs.len()));
        }
        if !all_large {
            warnings.push(format!(
                "module sizes below the bound {}",
                rational::format(&bound)
            ));
        }
    }

    let mut history = state.history.clone();
    history.push(StageRecord {
        stage: k + 1,
        pair_count: Some(n.to_string()),
        pairs_used: pairs.len(),
        module_sizes: sizes,
        required_bound: bound,
        taints,
        warnings,
    });
    ConstructionState::from_parts(
        state.h,
        k + 1,
        spec,
        FnTable::InductiveLayer {
            base: Box::new(state.f.clone()),
            base_spec: (*state.spec).clone(),
            module_offset: state.spec.modules().len(),
            pairs,
        },
        state.schedule.clone(),
        history,
    )
}

/// The unrestricted stage `k+1`, described without materializing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductivePlan {
    pub from_stage: u32,
    pub base_size: u64,
    /// Number of admissible pairs of level `k+1` on `W_k`, one module each.
    pub pair_count: String,
    #[serde(with = "rational")]
    pub required_bound: Rational,
    /// Smallest admissible prime above the bound.
    pub module_size: u64,
    /// `|W_{k+1}| = base_size · module_size^pair_count`.
    pub next_size: String,
    pub materializable: bool,
}

pub fn full_inductive_plan(state: &ConstructionState, limits: &Limits) -> Result<InductivePlan> {
    if state.k >= state.h {
        return Err(Error::invalid("state is already at the final stage"));
    }
    let base_size = state.spec.total_size();
    let n = count_admissible_pairs(base_size, state.h, Some(state.k as usize + 1));
    let bound = required_module_bound(&n, &state.schedule, state.k)?;
    let p = choose_module_size(&bound, state.h)?;
    // base · p^n, evaluated only while it stays under the cap
    let mut size = u128::from(base_size);
    let mut materializable = true;
    let mut i = BigUint::from(0u32);
    while i < n {
        size *= u128::from(p);
        if size > u128::from(limits.cap) {
            materializable = false;
            break;
        }
        i += 1u32;
    }
    Ok(InductivePlan {
        from_stage: state.k,
        base_size,
        pair_count: n.to_string(),
        required_bound: bound,
        module_size: p,
        next_size: format!("{base_size} * {p}^{n}"),
        materializable,
    })
}

/// Carries out [`full_inductive_plan`] when it fits under the cap.
pub fn full_inductive_step(
    state: &ConstructionState,
    limits: &Limits,
) -> Result<ConstructionState> {
    let plan = full_inductive_plan(state, limits)?;
    if !plan.materializable {
        return Err(Error::CapExceeded {
            size: plan.next_size,
            cap: limits.cap,
        });
    }
    let pairs: Vec<_> =
        enumerate_admissible_pairs(plan.base_size, state.h, state.k as usize + 1, limits)?
            .collect();
    let modules = vec![ModuleSpec::Cyclic(plan.module_size); pairs.len()];
    inductive_step(state, pairs, modules)
}

/// Stage `k → k+1` on `count` distinct pairs of level `k+1` drawn with a
/// seeded generator (all pairs when there are at most `count`). Every new
/// module is `module`, or by default the smallest admissible prime above the
/// size bound for the full pair set.
pub fn sampled_inductive_step(
    state: &ConstructionState,
    count: usize,
    module: Option<ModuleSpec>,
    seed: u64,
    limits: &Limits,
) -> Result<ConstructionState> {
    use rand::SeedableRng;
    if state.k >= state.h {
        return Err(Error::invalid("state is already at the final stage"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let base_size = state.spec.total_size();
    let pairs = sample_level_pairs(
        &mut rng,
        base_size,
        state.h,
        state.k as usize + 1,
        count,
        limits,
    )?;
    let module = match module {
        Some(m) => m,
        None => {
            let n = count_admissible_pairs(base_size, state.h, Some(state.k as usize + 1));
            let bound = required_module_bound(&n, &state.schedule, state.k)?;
            ModuleSpec::Cyclic(choose_module_size(&bound, state.h)?)
        }
    };
    let modules = vec![module; pairs.len()];
    inductive_step(state, pairs, modules)
}
