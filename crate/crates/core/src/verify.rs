//! Certificate-producing checks. Each check recomputes its quantities from
//! scratch, compares them with exact rationals and returns a self-contained
//! [`Certificate`]; re-running a check on the same inputs reproduces it
//! exactly.
//!
//! Strict inequalities are checked strictly. A measured value sitting exactly
//! on a strict bound fails with an `equality-boundary` note.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::construction::{
    self, build_a, count_pairs_up_to, enumerate_admissible_pairs, fiber_size, for_each_lift,
    level_set, pairs::count_lifts, project_index, ConstructionState, FnTable, Taint,
};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modarith::GroupSpec;
use crate::rational::{self, Rational};
use crate::setops::{difference_set, h_fold_sumset, GroupSet};

pub const SCHEMA: &str = "mdms-cert/1";

const EQUALITY_BOUNDARY: &str = "equality-boundary: measured value equals the strict bound";
const MAX_REPORTED_EXCEPTIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Claim {
    SubtractiveBasis,
    LevelBound,
    CoordinateHits,
    StructuralLemma,
    ProjectionA,
    PiJZero,
    FinalBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Verdict combined with taint status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    TaintedPass,
    TaintedFail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub claim: Claim,
    pub parameters: Value,
    pub measured: Value,
    /// The exact bound the claim compares against, as `p/q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    pub verdict: Verdict,
    pub taints: Vec<Taint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    fn new(claim: Claim, parameters: Value, measured: Value, pass: bool) -> Self {
        Certificate {
            schema: SCHEMA.to_string(),
            claim,
            parameters,
            measured,
            bound: None,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            taints: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn with_bound(mut self, bound: &Rational) -> Self {
        self.bound = Some(rational::format(bound));
        self
    }

    fn with_taints(mut self, taints: Vec<Taint>) -> Self {
        self.taints = taints;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn status(&self) -> Status {
        match (self.verdict, self.taints.is_empty()) {
            (Verdict::Pass, true) => Status::Pass,
            (Verdict::Fail, true) => Status::Fail,
            (Verdict::Pass, false) => Status::TaintedPass,
            (Verdict::Fail, false) => Status::TaintedFail,
        }
    }

    pub fn is_untainted_fail(&self) -> bool {
        self.status() == Status::Fail
    }
}

fn int(n: u64) -> Rational {
    rational::from_int(BigInt::from(n))
}

/// `measured < bound`, noting when the two are equal.
fn strictly_below(measured: u64, bound: &Rational, notes: &mut Vec<String>) -> bool {
    let m = int(measured);
    if m == *bound {
        notes.push(EQUALITY_BOUNDARY.to_string());
    }
    m < *bound
}

fn state_parameters(state: &ConstructionState) -> Value {
    json!({
        "h": state.h(),
        "k": state.k(),
        "spec": **state.spec(),
        "schedule": state.schedule(),
    })
}

/// `A − A = W` for a given set.
pub fn check_subtractive_basis_set(a: &GroupSet) -> Result<Certificate> {
    let d = difference_set(a)?;
    let cert = Certificate::new(
        Claim::SubtractiveBasis,
        json!({ "spec": **a.spec(), "set_size": a.len() }),
        json!({
            "a_size": a.len(),
            "difference_size": d.len(),
            "group_size": a.spec().total_size(),
        }),
        d.is_full(),
    );
    Ok(cert)
}

/// `A(W_k, f_k) − A(W_k, f_k) = W_k`.
pub fn check_subtractive_basis(state: &ConstructionState, limits: &Limits) -> Result<Certificate> {
    let a = build_a(state, limits)?;
    let mut cert = check_subtractive_basis_set(&a)?;
    cert.parameters = state_parameters(state);
    Ok(cert.with_taints(state.taints()))
}

/// Counts `S = {x ∈ ∏ M_j : x_j = x*_j for some j}` by enumeration and checks
/// `|S| <= |W| Σ 1/|M_j|`; when `ε` is given and each of the `n` factors has
/// `|M_j| > n/ε`, additionally checks `|S| < ε|W|`.
pub fn check_coordinate_hits(
    sizes: &[u64],
    target: &[u64],
    epsilon: Option<&Rational>,
    limits: &Limits,
) -> Result<Certificate> {
    if sizes.is_empty() {
        return Err(Error::invalid(
            "coordinate-hit check needs at least one factor",
        ));
    }
    if target.len() != sizes.len() {
        return Err(Error::invalid(format!(
            "target has {} coordinates for {} factors",
            target.len(),
            sizes.len()
        )));
    }
    if let Some((j, _)) = sizes.iter().enumerate().find(|(_, &s)| s == 0) {
        return Err(Error::invalid(format!("factor {j} is empty")));
    }
    for (j, (&t, &s)) in target.iter().zip(sizes).enumerate() {
        if t >= s {
            return Err(Error::invalid(format!(
                "target coordinate {j} = {t} not below {s}"
            )));
        }
    }
    let total = sizes.iter().try_fold(1u64, |acc, &s| {
        acc.checked_mul(s)
            .ok_or_else(|| Error::Overflow("product of factor sizes".into()))
    })?;
    limits.check_size(total)?;

    // odometer over all tuples
    let mut x = vec![0u64; sizes.len()];
    let mut hits = 0u64;
    for _ in 0..total {
        if x.iter().zip(target).any(|(a, b)| a == b) {
            hits += 1;
        }
        for d in (0..x.len()).rev() {
            x[d] += 1;
            if x[d] < sizes[d] {
                break;
            }
            x[d] = 0;
        }
    }

    let bound: Rational = sizes.iter().map(|&s| int(total) / int(s)).sum();
    let mut pass = int(hits) <= bound;
    let mut notes = Vec::new();
    let mut measured = json!({ "s_count": hits, "group_size": total });
    let mut params = json!({ "sizes": sizes, "target": target });
    if let Some(eps) = epsilon {
        params["epsilon"] = json!(rational::format(eps));
        let threshold = int(sizes.len() as u64) / eps;
        let hypothesis = sizes.iter().all(|&s| int(s) > threshold);
        measured["epsilon_hypothesis"] = json!(hypothesis);
        let eps_bound = eps * int(total);
        measured["epsilon_bound"] = json!(rational::format(&eps_bound));
        if hypothesis {
            let below = strictly_below(hits, &eps_bound, &mut notes);
            measured["epsilon_form_holds"] = json!(below);
            pass &= below;
        } else {
            notes.push("epsilon form not applicable: some factor is too small".into());
        }
    }
    let mut cert =
        Certificate::new(Claim::CoordinateHits, params, measured, pass).with_bound(&bound);
    cert.notes = notes;
    Ok(cert)
}

/// `|L_ℓ(W_k, f_k)| < ε_ℓ |W_k|`. For `ℓ = h` the level set is taken as
/// `hA`. At stage 1 and `ℓ = 1` the certificate also
/// records the intermediate bound `|W_1| Σ 1/|M_i|` and the number of level-1
/// elements lacking a zero coordinate (expected: none).
pub fn check_level_bound(
    state: &ConstructionState,
    level: usize,
    limits: &Limits,
) -> Result<Certificate> {
    // L_h = hA, which the sumset engine computes without enumerating pairs
    let l = if level == state.h() as usize {
        h_fold_sumset(&build_a(state, limits)?, state.h())?
    } else {
        level_set(state, level, limits)?
    };
    let spec = state.spec();
    let size = spec.total_size();
    let eps = state.schedule().level(level as u32)?;
    let bound = eps * int(size);
    let mut notes = Vec::new();
    let pass = strictly_below(l.len(), &bound, &mut notes);
    let mut measured = json!({ "level_set_size": l.len(), "group_size": size });
    if state.k() == 1 && level == 1 {
        let sizes = spec.module_sizes()?;
        let hit_bound: Rational = sizes.iter().map(|&s| int(size) / int(s)).sum();
        measured["coordinate_hit_bound"] = json!(rational::format(&hit_bound));
        measured["within_coordinate_hit_bound"] = json!(int(l.len()) <= hit_bound);
        let missing_zero = l
            .indices()
            .filter(|&i| {
                let z = spec.decode(i).expect("member index");
                (0..spec.modules().len())
                    .all(|m| spec.project_module(&z, m).iter().any(|&d| d != 0))
            })
            .count();
        measured["without_zero_coordinate"] = json!(missing_zero);
    }
    measured["method"] = json!(if level == state.h() as usize {
        "sumset"
    } else {
        "pair-enumeration"
    });
    let mut params = state_parameters(state);
    params["level"] = json!(level);
    let mut cert = Certificate::new(Claim::LevelBound, params, measured, pass)
        .with_bound(&bound)
        .with_taints(state.taints());
    cert.notes = notes;
    Ok(cert)
}

fn module_is_zero(spec: &GroupSpec, digits: &[u64], module: usize) -> bool {
    digits[spec.module_digits(module)].iter().all(|&d| d == 0)
}

struct LayerView {
    prev: ConstructionState,
    fiber: u64,
    offset: usize,
    table: Vec<u64>,
}

fn layer_view(state: &ConstructionState, limits: &Limits) -> Result<LayerView> {
    let prev = state
        .previous()
        .ok_or_else(|| Error::invalid("check needs a state produced by an inductive step"))?;
    let fiber = fiber_size(state.spec(), prev.spec())?;
    let offset = match state.f() {
        FnTable::InductiveLayer { module_offset, .. } => *module_offset,
        _ => unreachable!("previous() implies an inductive layer"),
    };
    let table = state.f().materialize(state.spec(), limits)?;
    Ok(LayerView {
        prev,
        fiber,
        offset,
        table,
    })
}

/// On a stage-`k+1` state: every element represented by a pair of level at
/// most `k+1` whose fiber-sum pair has level at most `k` or is one of the
/// stage's pairs `(α_j, β_j)` satisfies `π_0(z) ∈ L_k` or `π_j(z) = 0`.
///
/// All qualifying pairs are enumerated (as lifts of their fiber sums).
pub fn check_structural_lemma(
    state: &ConstructionState,
    lower_level_set: &GroupSet,
    limits: &Limits,
) -> Result<Certificate> {
    let view = layer_view(state, limits)?;
    let spec = state.spec();
    if **lower_level_set.spec() != **view.prev.spec() {
        return Err(Error::SpecMismatch("L_k must live in W_k".into()));
    }
    let k = view.prev.k() as usize;
    let h = state.h();
    let base_size = view.prev.spec().total_size();
    let layer = state.layer_pairs().expect("inductive layer");

    // hats of level <= k, then the stage's own pairs
    let mut hats: Vec<(Option<usize>, construction::AdmissiblePair)> = Vec::new();
    construction::pairs::check_budget(
        "fiber-sum pairs",
        &count_pairs_up_to(base_size, h, k),
        limits,
    )?;
    for l in 1..=k {
        hats.extend(enumerate_admissible_pairs(base_size, h, l, limits)?.map(|p| (None, p)));
    }
    hats.extend(layer.iter().cloned().enumerate().map(|(j, p)| (Some(j), p)));
    let total: num_bigint::BigUint = hats
        .iter()
        .map(|(_, p)| count_lifts(p, view.fiber, k + 1))
        .sum();
    construction::pairs::check_budget("qualifying pairs", &total, limits)?;

    let mut digits = vec![0u64; spec.digit_count()];
    let (mut low, mut matched, mut in_lk, mut pi_zero, mut exceptions) =
        (0u64, 0u64, 0u64, 0u64, 0u64);
    let mut examples = Vec::new();
    for (j, hat) in &hats {
        for_each_lift(hat, view.fiber, k + 1, limits, |entries| {
            let z = construction::represent_index(spec, &view.table, entries);
            let z0 = project_index(z, view.fiber);
            let member = lower_level_set.contains_index(z0);
            let ok = match j {
                None => {
                    low += 1;
                    member
                }
                Some(j) => {
                    matched += 1;
                    spec.decode_into(z, &mut digits);
                    let zero = module_is_zero(spec, &digits, view.offset + j);
                    if zero {
                        pi_zero += 1;
                    }
                    member || zero
                }
            };
            if member {
                in_lk += 1;
            }
            if !ok {
                exceptions += 1;
                if examples.len() < MAX_REPORTED_EXCEPTIONS {
                    examples.push(format!("pair {entries:?} represents index {z}"));
                }
            }
            Ok(())
        })?;
    }

    let mut params = state_parameters(state);
    params["lower_level_set_size"] = json!(lower_level_set.len());
    let mut cert = Certificate::new(
        Claim::StructuralLemma,
        params,
        json!({
            "qualifying_pairs": low + matched,
            "low_level_pairs": low,
            "matched_pairs": matched,
            "projection_in_lower_level_set": in_lk,
            "matched_coordinate_zero": pi_zero,
            "exceptions": exceptions,
        }),
        exceptions == 0,
    )
    .with_taints(state.taints());
    cert.notes = examples;
    Ok(cert)
}

/// On a stage-`k+1` state: every pair of level `k+1` whose fiber sums equal
/// the stage's pair `(α_j, β_j)` represents an element with `π_j(z) = 0`.
pub fn check_pi_j_zero(state: &ConstructionState, limits: &Limits) -> Result<Certificate> {
    let view = layer_view(state, limits)?;
    let spec = state.spec();
    let layer = state.layer_pairs().expect("inductive layer");
    let k = view.prev.k() as usize;
    let total: num_bigint::BigUint = layer
        .iter()
        .map(|p| count_lifts(p, view.fiber, k + 1))
        .sum();
    construction::pairs::check_budget("lifted pairs", &total, limits)?;

    let mut digits = vec![0u64; spec.digit_count()];
    let (mut checked, mut nonzero) = (0u64, 0u64);
    let mut examples = Vec::new();
    for (j, pair) in layer.iter().enumerate() {
        for_each_lift(pair, view.fiber, k + 1, limits, |entries| {
            checked += 1;
            let z = construction::represent_index(spec, &view.table, entries);
            spec.decode_into(z, &mut digits);
            if !module_is_zero(spec, &digits, view.offset + j) {
                nonzero += 1;
                if examples.len() < MAX_REPORTED_EXCEPTIONS {
                    examples.push(format!("module {}: pair {entries:?}", view.offset + j));
                }
            }
            Ok(())
        })?;
    }
    let mut cert = Certificate::new(
        Claim::PiJZero,
        state_parameters(state),
        json!({ "lifted_pairs": checked, "nonzero_coordinates": nonzero }),
        nonzero == 0,
    )
    .with_taints(state.taints());
    cert.notes = examples;
    Ok(cert)
}

/// `π_0(A(W_{k+1}, f_{k+1})) = A(W_k, f_k)`.
pub fn check_projection_a(
    lower: &ConstructionState,
    upper: &ConstructionState,
    limits: &Limits,
) -> Result<Certificate> {
    if upper.k() != lower.k() + 1 {
        return Err(Error::invalid(format!(
            "stages {} and {} are not consecutive",
            lower.k(),
            upper.k()
        )));
    }
    let fiber = fiber_size(upper.spec(), lower.spec())?;
    let a_upper = build_a(upper, limits)?;
    let a_lower = build_a(lower, limits)?;
    let projected = a_upper.map_into(lower.spec(), limits, |i| project_index(i, fiber))?;
    let missing = a_lower
        .indices()
        .filter(|&i| !projected.contains_index(i))
        .count();
    let extra = projected
        .indices()
        .filter(|&i| !a_lower.contains_index(i))
        .count();
    let mut taints = lower.taints();
    taints.extend(upper.taints());
    taints.sort_unstable();
    taints.dedup();
    let mut params = state_parameters(upper);
    params["lower_stage"] = json!(lower.k());
    Ok(Certificate::new(
        Claim::ProjectionA,
        params,
        json!({
            "upper_a_size": a_upper.len(),
            "lower_a_size": a_lower.len(),
            "projected_size": projected.len(),
            "missing": missing,
            "extra": extra,
        }),
        projected == a_lower,
    )
    .with_taints(taints))
}

/// `|hA(W_h, f_h)| < ε |W_h|`, with `hA` from the sumset engine.
pub fn check_final(state: &ConstructionState, limits: &Limits) -> Result<Certificate> {
    if state.k() != state.h() {
        return Err(Error::invalid(format!(
            "final check needs stage h = {}, state is at stage {}",
            state.h(),
            state.k()
        )));
    }
    let a = build_a(state, limits)?;
    let ha = h_fold_sumset(&a, state.h())?;
    let size = state.spec().total_size();
    let bound = state.schedule().epsilon() * int(size);
    let mut notes = Vec::new();
    let pass = strictly_below(ha.len(), &bound, &mut notes);
    let eps_h_bound = state.schedule().level(state.h())? * int(size);
    let mut cert = Certificate::new(
        Claim::FinalBound,
        state_parameters(state),
        json!({
            "a_size": a.len(),
            "sumset_size": ha.len(),
            "group_size": size,
            "below_epsilon_h": int(ha.len()) < eps_h_bound,
        }),
        pass,
    )
    .with_bound(&bound)
    .with_taints(state.taints());
    cert.notes = notes;
    Ok(cert)
}

/// Which checks to run against a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    All,
    SubtractiveBasis,
    LevelBound,
    CoordinateHits,
    Structural,
    PiJZero,
    Projection,
    Final,
}

impl std::str::FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => CheckKind::All,
            "subtractive-basis" => CheckKind::SubtractiveBasis,
            "level-bound" => CheckKind::LevelBound,
            "coordinate-hits" => CheckKind::CoordinateHits,
            "structural" => CheckKind::Structural,
            "pi-j-zero" => CheckKind::PiJZero,
            "projection" => CheckKind::Projection,
            "final" => CheckKind::Final,
            other => return Err(Error::Parse(format!("unknown check {other:?}"))),
        })
    }
}

/// A check that `All` could not run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub check: String,
    pub reason: String,
}

/// Runs the requested checks on one state file.
///
/// A single named check propagates every error. `All` runs what applies to
/// the state's stage and turns cap or budget refusals into [`Skipped`]
/// entries.
pub fn run_checks(
    state: &ConstructionState,
    kind: CheckKind,
    limits: &Limits,
) -> Result<(Vec<Certificate>, Vec<Skipped>)> {
    type Job<'a> = (&'static str, Box<dyn Fn() -> Result<Certificate> + 'a>);
    let k = state.k() as usize;
    let coordinate_hits = || {
        let first = state.history()[0].module_sizes.clone();
        check_coordinate_hits(
            &first,
            &vec![0; first.len()],
            Some(&state.schedule().levels()[0]),
            limits,
        )
    };
    let structural = || {
        let prev = state
            .previous()
            .ok_or_else(|| Error::invalid("structural check needs an inductive stage"))?;
        let lk = level_set(&prev, prev.k() as usize, limits)?;
        check_structural_lemma(state, &lk, limits)
    };
    let projection = || {
        let prev = state
            .previous()
            .ok_or_else(|| Error::invalid("projection check needs an inductive stage"))?;
        check_projection_a(&prev, state, limits)
    };
    let jobs: Vec<Job> = match kind {
        CheckKind::SubtractiveBasis => vec![(
            "subtractive-basis",
            Box::new(|| check_subtractive_basis(state, limits)),
        )],
        CheckKind::LevelBound => vec![(
            "level-bound",
            Box::new(|| check_level_bound(state, k, limits)),
        )],
        CheckKind::CoordinateHits => vec![("coordinate-hits", Box::new(coordinate_hits))],
        CheckKind::Structural => vec![("structural", Box::new(structural))],
        CheckKind::PiJZero => vec![("pi-j-zero", Box::new(|| check_pi_j_zero(state, limits)))],
        CheckKind::Projection => vec![("projection", Box::new(projection))],
        CheckKind::Final => vec![("final", Box::new(|| check_final(state, limits)))],
        CheckKind::All => {
            let mut v: Vec<Job> = vec![
                (
                    "subtractive-basis",
                    Box::new(|| check_subtractive_basis(state, limits)),
                ),
                ("coordinate-hits", Box::new(coordinate_hits)),
                (
                    "level-bound",
                    Box::new(|| check_level_bound(state, k, limits)),
                ),
            ];
            if state.previous().is_some() {
                v.push(("projection", Box::new(projection)));
                v.push(("pi-j-zero", Box::new(|| check_pi_j_zero(state, limits))));
                v.push(("structural", Box::new(structural)));
            }
            if state.k() == state.h() {
                v.push(("final", Box::new(|| check_final(state, limits))));
            }
            v
        }
    };
    let mut certs = Vec::new();
    let mut skipped = Vec::new();
    for (name, job) in jobs {
        match job() {
            Ok(c) => certs.push(c),
            Err(e) if kind == CheckKind::All && e.is_resource_limit() => skipped.push(Skipped {
                check: name.to_string(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok((certs, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{
        build_initial, default_schedule, inductive_step, AdmissiblePair, EpsilonSchedule,
        PairEntry, SizeOverride,
    };
    use crate::modarith::ModuleSpec;
    use crate::rational::ratio;
    use std::sync::Arc;

    fn h1() -> ConstructionState {
        build_initial(1, &default_schedule(1, &ratio(9, 10)).unwrap(), None).unwrap()
    }

    fn h2() -> ConstructionState {
        let s = EpsilonSchedule::new(ratio(9, 10), vec![ratio(7, 10), ratio(8, 10)]).unwrap();
        build_initial(2, &s, None).unwrap()
    }

    fn tiny_step() -> (ConstructionState, ConstructionState) {
        let s = default_schedule(2, &ratio(9, 10)).unwrap();
        let st = build_initial(
            2,
            &s,
            Some(SizeOverride {
                modules: vec![ModuleSpec::Cyclic(3), ModuleSpec::Cyclic(3)],
                force: true,
            }),
        )
        .unwrap();
        let pairs = vec![
            AdmissiblePair::new(vec![PairEntry::new(1, 1, 0), PairEntry::new(5, 0, 1)]).unwrap(),
            AdmissiblePair::new(vec![PairEntry::new(0, 1, 0), PairEntry::new(4, 1, 0)]).unwrap(),
        ];
        let next = inductive_step(
            &st,
            pairs,
            vec![ModuleSpec::Cyclic(5), ModuleSpec::Cyclic(3)],
        )
        .unwrap();
        (st, next)
    }

    #[test]
    fn subtractive_basis_certificates() {
        let c = check_subtractive_basis(&h1(), &Limits::default()).unwrap();
        assert_eq!(c.status(), Status::Pass);
        assert_eq!(c.measured["a_size"], 9);
        let spec = Arc::new(GroupSpec::cyclic(2, &[5]).unwrap());
        let zero = GroupSet::from_indices(&spec, [0], &Limits::default()).unwrap();
        let c = check_subtractive_basis_set(&zero).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        let full = GroupSet::full(&spec, &Limits::default()).unwrap();
        assert!(check_subtractive_basis_set(&full).unwrap().passed());
    }

    #[test]
    fn coordinate_hit_examples() {
        let l = Limits::default();
        let c = check_coordinate_hits(&[3, 3], &[1, 2], None, &l).unwrap();
        assert_eq!(c.measured["s_count"], 5);
        assert_eq!(c.bound.as_deref(), Some("6/1"));
        assert!(c.passed());
        let c = check_coordinate_hits(&[7], &[3], None, &l).unwrap();
        assert_eq!(c.measured["s_count"], 1);
        assert_eq!(c.bound.as_deref(), Some("1/1"));
        assert!(c.passed());
        let c = check_coordinate_hits(&[5, 5, 5], &[0, 0, 0], Some(&ratio(7, 10)), &l).unwrap();
        assert_eq!(c.measured["s_count"], 61);
        assert_eq!(c.bound.as_deref(), Some("75/1"));
        assert_eq!(c.measured["epsilon_hypothesis"], true);
        assert!(c.passed());
        assert!(check_coordinate_hits(&[], &[], None, &l).is_err());
        assert!(check_coordinate_hits(&[3], &[3], None, &l).is_err());
    }

    #[test]
    fn level_bound_examples() {
        let l = Limits::default();
        let c = check_level_bound(&h2(), 1, &l).unwrap();
        assert_eq!(c.measured["level_set_size"], 61);
        assert_eq!(c.measured["coordinate_hit_bound"], "75/1");
        assert_eq!(c.measured["without_zero_coordinate"], 0);
        assert_eq!(c.bound.as_deref(), Some("175/2"));
        assert_eq!(c.status(), Status::Pass);
        let c = check_level_bound(&h1(), 1, &l).unwrap();
        assert_eq!(c.measured["level_set_size"], 9);
        assert!(c.passed());
    }

    #[test]
    fn forced_tiny_state_is_tainted() {
        let (st, _) = tiny_step();
        let c = check_level_bound(&st, 1, &Limits::default()).unwrap();
        assert!(c.taints.contains(&Taint::BoundWaived));
        assert!(matches!(
            c.status(),
            Status::TaintedPass | Status::TaintedFail
        ));
    }

    #[test]
    fn final_bound() {
        let c = check_final(&h1(), &Limits::default()).unwrap();
        assert_eq!(c.measured["sumset_size"], 9);
        assert_eq!(c.bound.as_deref(), Some("45/2"));
        assert_eq!(c.status(), Status::Pass);
        assert!(check_final(&h2(), &Limits::default()).is_err());
    }

    #[test]
    fn zero_map_fails_final_bound() {
        let st = h1();
        let table = vec![0; 25];
        let zero = st.with_explicit_f(table).unwrap();
        let c = check_final(&zero, &Limits::default()).unwrap();
        assert_eq!(c.measured["sumset_size"], 25);
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(check_subtractive_basis(&zero, &Limits::default())
            .unwrap()
            .passed());
    }

    #[test]
    fn equality_boundary_is_a_failure() {
        let mut notes = Vec::new();
        assert!(!strictly_below(10, &ratio(10, 1), &mut notes));
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn structural_and_projection_on_tiny_step() {
        let l = Limits::default();
        let (st, next) = tiny_step();
        let lk = level_set(&st, 1, &l).unwrap();
        let c = check_structural_lemma(&next, &lk, &l).unwrap();
        assert_eq!(c.measured["exceptions"], 0, "{:?}", c.notes);
        assert!(c.measured["matched_pairs"].as_u64().unwrap() > 0);
        assert!(c.taints.contains(&Taint::Restricted));
        assert!(check_pi_j_zero(&next, &l).unwrap().passed());
        assert!(check_projection_a(&st, &next, &l).unwrap().passed());
        assert!(check_structural_lemma(&st, &lk, &l).is_err());
    }

    #[test]
    fn structural_lemma_detects_a_wrong_level_set() {
        let l = Limits::default();
        let (st, next) = tiny_step();
        let empty = GroupSet::empty(st.spec(), &l).unwrap();
        let c = check_structural_lemma(&next, &empty, &l).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(!c.notes.is_empty());
    }

    #[test]
    fn projection_detects_a_perturbed_map() {
        let l = Limits::default();
        let st = h2();
        let next =
            crate::construction::sampled_inductive_step(&st, 1, Some(ModuleSpec::Cyclic(3)), 0, &l)
                .unwrap();
        assert!(check_projection_a(&st, &next, &l).unwrap().passed());
        // send one element's image to a base component outside A_1
        let a1 = build_a(&st, &l).unwrap();
        let outside = (0..125).find(|&i| !a1.contains_index(i)).unwrap();
        let fiber = next.spec().total_size() / 125;
        let mut table = next.f().materialize(next.spec(), &l).unwrap();
        table[0] = outside * fiber;
        let mutated = next.with_explicit_f(table).unwrap();
        let c = check_projection_a(&st, &mutated, &l).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.measured["extra"].as_u64().unwrap() > 0);
    }

    #[test]
    fn layer_checks_need_a_layer() {
        let l = Limits::default();
        assert!(check_pi_j_zero(&h2(), &l).is_err());
        assert!(check_projection_a(&h2(), &h2(), &l).is_err());
    }

    #[test]
    fn run_all_on_each_kind_of_state() {
        let l = Limits::default();
        let (certs, skipped) = run_checks(&h1(), CheckKind::All, &l).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(certs.len(), 4);
        assert!(certs.iter().all(|c| c.status() == Status::Pass));
        let (_, next) = tiny_step();
        let (certs, _) = run_checks(&next, CheckKind::All, &l).unwrap();
        let claims: Vec<Claim> = certs.iter().map(|c| c.claim).collect();
        assert!(claims.contains(&Claim::StructuralLemma));
        assert!(claims.contains(&Claim::ProjectionA));
        assert!(certs.iter().all(|c| !c.is_untainted_fail()));
    }

    #[test]
    fn certificates_are_reproducible() {
        let l = Limits::default();
        let a = serde_json::to_string(&check_level_bound(&h2(), 1, &l).unwrap()).unwrap();
        let b = serde_json::to_string(&check_level_bound(&h2(), 1, &l).unwrap()).unwrap();
        assert_eq!(a, b);
        let c: Certificate = serde_json::from_str(&a).unwrap();
        assert_eq!(c.schema, SCHEMA);
    }
}
