use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::modarith::{Element, GroupSpec};

use super::pairs::AdmissiblePair;

/// A map `f: W → W`, kept symbolic wherever possible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FnTable {
    /// `f_1(x_0, ..., x_h) = (0, −(1/h)x_1, ..., −(i/h)x_i, ..., −x_h)` on
    /// `W_1 = M_0 ⊕ ... ⊕ M_h`. A forced group with fewer summands uses the
    /// leading coordinates of the same formula.
    InitialClosedForm { h: u32 },
    /// `f_{k+1}(w_k, x_1, ..., x_n) = (f_k(w_k), g_1, ..., g_n)` where pair `i`
    /// owns module `module_offset + i` and
    /// `g_i = −α_i(w_k) x_i / (α_i(w_k) + β_i(w_k))`, or 0 off its support.
    InductiveLayer {
        base: Box<FnTable>,
        base_spec: GroupSpec,
        module_offset: usize,
        pairs: Vec<AdmissiblePair>,
    },
    /// `table[i]` is the index of `f(w_i)`.
    Explicit { table: Vec<u64> },
}

impl FnTable {
    /// Checks that the descriptor is a total map on `spec`.
    pub fn check(&self, spec: &GroupSpec) -> Result<()> {
        match self {
            FnTable::InitialClosedForm { h } => {
                if *h != spec.h() {
                    return Err(Error::invalid(format!(
                        "closed form for h = {h} on a group with h = {}",
                        spec.h()
                    )));
                }
                if spec.modules().len() > *h as usize + 1 {
                    return Err(Error::invalid(format!(
                        "initial group has {} modules, at most h + 1 = {} allowed",
                        spec.modules().len(),
                        h + 1
                    )));
                }
            }
            FnTable::InductiveLayer {
                base,
                base_spec,
                module_offset,
                pairs,
            } => {
                if !spec.has_prefix(base_spec) || *module_offset != base_spec.modules().len() {
                    return Err(Error::invalid(
                        "layer base is not a leading summand of the group",
                    ));
                }
                if spec.modules().len() != module_offset + pairs.len() {
                    return Err(Error::invalid(format!(
                        "layer has {} pairs but the group adds {} modules",
                        pairs.len(),
                        spec.modules().len() - module_offset
                    )));
                }
                for p in pairs {
                    p.validate(spec.h(), base_spec.total_size())?;
                }
                base.check(base_spec)?;
            }
            FnTable::Explicit { table } => {
                if table.len() as u64 != spec.total_size() {
                    return Err(Error::invalid(format!(
                        "explicit table has {} entries for a group of order {}",
                        table.len(),
                        spec.total_size()
                    )));
                }
                if let Some(&bad) = table.iter().find(|&&v| v >= spec.total_size()) {
                    return Err(Error::IndexOutOfRange {
                        index: bad,
                        size: spec.total_size(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, spec: &GroupSpec, w: &Element) -> Result<Element> {
        spec.conform(w)?;
        let mut out = vec![0; spec.digit_count()];
        self.eval_digits(spec, w.digits(), &mut out);
        Ok(Element::from_digits(out))
    }

    /// Index form of [`FnTable::eval`].
    pub fn eval_index(&self, spec: &GroupSpec, index: u64) -> u64 {
        if let FnTable::Explicit { table } = self {
            return table[index as usize];
        }
        let mut w = vec![0; spec.digit_count()];
        spec.decode_into(index, &mut w);
        let mut out = vec![0; spec.digit_count()];
        self.eval_digits(spec, &w, &mut out);
        spec.encode_unchecked(&out)
    }

    pub(crate) fn eval_digits(&self, spec: &GroupSpec, w: &[u64], out: &mut [u64]) {
        match self {
            FnTable::InitialClosedForm { h } => {
                for i in 0..spec.modules().len() {
                    for d in spec.module_digits(i) {
                        let m = spec.radices()[d];
                        // −(i/h)·x = (m − i·x mod m) · h^{-1}
                        let ix =
                            (u128::from(i as u64 % m) * u128::from(w[d]) % u128::from(m)) as u64;
                        let neg = if ix == 0 { 0 } else { m - ix };
                        out[d] = mul_mod(neg, spec.inverse(*h, m), m);
                    }
                }
            }
            FnTable::InductiveLayer {
                base,
                base_spec,
                module_offset,
                pairs,
            } => {
                let nb = base_spec.digit_count();
                base.eval_digits(base_spec, &w[..nb], &mut out[..nb]);
                let wk = base_spec.encode_unchecked(&w[..nb]);
                for (i, pair) in pairs.iter().enumerate() {
                    let range = spec.module_digits(module_offset + i);
                    match pair.get(wk) {
                        Some((alpha, beta)) => {
                            let s = alpha + beta;
                            for d in range {
                                let m = spec.radices()[d];
                                let ax = mul_mod(u64::from(alpha) % m, w[d], m);
                                let neg = if ax == 0 { 0 } else { m - ax };
                                out[d] = mul_mod(neg, spec.inverse(s, m), m);
                            }
                        }
                        None => out[range].fill(0),
                    }
                }
            }
            FnTable::Explicit { table } => {
                let idx = spec.encode_unchecked(w);
                spec.decode_into(table[idx as usize], out);
            }
        }
    }

    /// Tabulates `f` over the whole group.
    pub fn materialize(&self, spec: &GroupSpec, limits: &Limits) -> Result<Vec<u64>> {
        limits.check_size(spec.total_size())?;
        if let FnTable::Explicit { table } = self {
            return Ok(table.clone());
        }
        Ok((0..spec.total_size() as usize)
            .into_par_iter()
            .with_min_len(4096)
            .map(|i| self.eval_index(spec, i as u64))
            .collect())
    }

    /// The pairs attached to the outermost layer, if any.
    pub fn layer_pairs(&self) -> Option<&[AdmissiblePair]> {
        match self {
            FnTable::InductiveLayer { pairs, .. } => Some(pairs),
            _ => None,
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}
