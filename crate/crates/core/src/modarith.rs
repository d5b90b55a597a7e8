//! Finite abelian groups built as direct sums of cyclic modules `Z/mZ` and
//! prime-field vector spaces `F_p^dim`, all of which must lie in the ring class
//! where every integer `1..=h` is a unit.
//!
//! Every group is flattened into a list of *digits*: a cyclic module contributes
//! one digit of radix `m`, a vector space `F_p^dim` contributes `dim` digits of
//! radix `p`. Elements are indexed in mixed radix with digit 0 (the first digit
//! of module 0) as the most significant digit. That order is part of the
//! serialization contract for hex bitsets.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single summand of a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleSpec {
    /// `Z/mZ`
    Cyclic(u64),
    /// `F_p^dim`, stored as `dim` independent cyclic-`p` coordinates.
    VectorSpace { p: u64, dim: u32 },
}

impl ModuleSpec {
    pub fn size(&self) -> Result<u64> {
        match *self {
            ModuleSpec::Cyclic(m) => Ok(m),
            ModuleSpec::VectorSpace { p, dim } => p
                .checked_pow(dim)
                .ok_or_else(|| Error::Overflow(format!("{p}^{dim} does not fit in 64 bits"))),
        }
    }

    pub fn digit_count(&self) -> usize {
        match *self {
            ModuleSpec::Cyclic(_) => 1,
            ModuleSpec::VectorSpace { dim, .. } => dim as usize,
        }
    }

    fn radix(&self) -> u64 {
        match *self {
            ModuleSpec::Cyclic(m) => m,
            ModuleSpec::VectorSpace { p, .. } => p,
        }
    }

    /// Checks that every integer in `1..=h` is a unit.
    ///
    /// For `Z/mZ` this is trial division of `m` by `2..=h`; `h` is small so
    /// there is no need to factor `m`.
    pub fn validate(&self, h: u32) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidModule {
                module: self.to_string(),
                reason,
            })
        };
        match *self {
            ModuleSpec::Cyclic(m) => {
                if m == 0 {
                    return fail("modulus must be positive".into());
                }
                if let Some(r) = (2..=u64::from(h)).find(|r| m % r == 0) {
                    return fail(format!("{r} divides {m}, so {r} is not a unit (h = {h})"));
                }
            }
            ModuleSpec::VectorSpace { p, dim } => {
                if dim == 0 {
                    return fail("dimension must be positive".into());
                }
                if !is_prime(p) {
                    return fail(format!("{p} is not prime"));
                }
                if p <= u64::from(h) {
                    return fail(format!("characteristic {p} must exceed h = {h}"));
                }
            }
        }
        self.size().map(|_| ())
    }
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModuleSpec::Cyclic(m) => write!(f, "Z/{m}"),
            ModuleSpec::VectorSpace { p, dim } => write!(f, "F_{p}^{dim}"),
        }
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = i128::from(a % m).extended_gcd(&i128::from(m));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(i128::from(m)) as u64)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn reduce_signed(r: i64, m: u64) -> u64 {
    i128::from(r).rem_euclid(i128::from(m)) as u64
}

/// An element, stored as its flattened digit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element {
    digits: Vec<u64>,
}

impl Element {
    pub fn from_digits(digits: Vec<u64>) -> Self {
        Element { digits }
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u64> {
        self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GroupSpecJson {
    h: u32,
    modules: Vec<ModuleSpec>,
}

/// A direct sum of modules together with the unit context `h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecJson", into = "GroupSpecJson")]
pub struct GroupSpec {
    h: u32,
    modules: Vec<ModuleSpec>,
    radices: Vec<u64>,
    strides: Vec<u64>,
    module_offsets: Vec<usize>,
    total_size: u64,
    inverses: BTreeMap<u64, Vec<u64>>,
}

/// Inverses are cached for `r` up to this bound; larger `r` are computed on demand.
const INVERSE_CACHE_LIMIT: u32 = 64;

impl GroupSpec {
    pub fn new(h: u32, modules: Vec<ModuleSpec>) -> Result<Self> {
        if h == 0 {
            return Err(Error::invalid("h must be at least 1"));
        }
        if modules.is_empty() {
            return Err(Error::invalid("a group needs at least one module"));
        }
        let mut radices = Vec::new();
        let mut module_offsets = Vec::with_capacity(modules.len() + 1);
        for m in &modules {
            m.validate(h)?;
            module_offsets.push(radices.len());
            radices.extend(std::iter::repeat_n(m.radix(), m.digit_count()));
        }
        module_offsets.push(radices.len());

        let mut strides = vec![1u64; radices.len()];
        let mut acc = 1u64;
        for d in (0..radices.len()).rev() {
            strides[d] = acc;
            acc = acc.checked_mul(radices[d]).ok_or_else(|| {
                Error::Overflow("group order does not fit in 64 bits".to_string())
            })?;
        }

        let mut inverses = BTreeMap::new();
        for &m in &radices {
            inverses.entry(m).or_insert_with(|| {
                (1..=h.min(INVERSE_CACHE_LIMIT))
                    .map(|r| mod_inverse(u64::from(r), m).expect("validated unit"))
                    .collect::<Vec<_>>()
            });
        }

        Ok(GroupSpec {
            h,
            modules,
            radices,
            strides,
            module_offsets,
            total_size: acc,
            inverses,
        })
    }

    pub fn cyclic(h: u32, moduli: &[u64]) -> Result<Self> {
        Self::new(h, moduli.iter().map(|&m| ModuleSpec::Cyclic(m)).collect())
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn modules(&self) -> &[ModuleSpec] {
        &self.modules
    }

    pub fn total_size(&self) -> u64 {
        self.total_size
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    pub fn strides(&self) -> &[u64] {
        &self.strides
    }

    pub fn digit_count(&self) -> usize {
        self.radices.len()
    }

    /// Digit positions occupied by module `i`.
    pub fn module_digits(&self, i: usize) -> Range<usize> {
        self.module_offsets[i]..self.module_offsets[i + 1]
    }

    pub fn module_sizes(&self) -> Result<Vec<u64>> {
        self.modules.iter().map(ModuleSpec::size).collect()
    }

    /// The subgroup formed by the first `n` modules (a coordinate projection target).
    pub fn prefix(&self, n: usize) -> Result<GroupSpec> {
        if n == 0 || n > self.modules.len() {
            return Err(Error::invalid(format!(
                "prefix length {n} outside 1..={}",
                self.modules.len()
            )));
        }
        GroupSpec::new(self.h, self.modules[..n].to_vec())
    }

    /// `self ⊕ extra`, with the new modules appended after the existing ones.
    pub fn extend(&self, extra: &[ModuleSpec]) -> Result<GroupSpec> {
        let mut modules = self.modules.clone();
        modules.extend_from_slice(extra);
        GroupSpec::new(self.h, modules)
    }

    /// Whether `prefix` is this group's leading summand.
    pub fn has_prefix(&self, prefix: &GroupSpec) -> bool {
        self.h == prefix.h
            && prefix.modules.len() <= self.modules.len()
            && self.modules[..prefix.modules.len()] == prefix.modules[..]
    }

    pub fn zero(&self) -> Element {
        Element::from_digits(vec![0; self.digit_count()])
    }

    /// Builds a validated element from its digits.
    pub fn element(&self, digits: Vec<u64>) -> Result<Element> {
        let e = Element::from_digits(digits);
        self.conform(&e)?;
        Ok(e)
    }

    pub fn conform(&self, a: &Element) -> Result<()> {
        if a.digits.len() != self.radices.len() {
            return Err(Error::SpecMismatch(format!(
                "expected {} coordinates, got {}",
                self.radices.len(),
                a.digits.len()
            )));
        }
        for (pos, (&d, &m)) in a.digits.iter().zip(&self.radices).enumerate() {
            if d >= m {
                return Err(Error::SpecMismatch(format!(
                    "coordinate {pos} = {d} is not reduced mod {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.conform(a)?;
        self.conform(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &Element, b: &Element) -> Element {
        let digits = a
            .digits
            .iter()
            .zip(&b.digits)
            .zip(&self.radices)
            .map(|((&x, &y), &m)| add_mod(x, y, m))
            .collect();
        Element { digits }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        self.conform(a)?;
        self.conform(b)?;
        let digits = a
            .digits
            .iter()
            .zip(&b.digits)
            .zip(&self.radices)
            .map(|((&x, &y), &m)| add_mod(x, m - y, m))
            .collect();
        Ok(Element { digits })
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.conform(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub(crate) fn neg_unchecked(&self, a: &Element) -> Element {
        let digits = a
            .digits
            .iter()
            .zip(&self.radices)
            .map(|(&x, &m)| if x == 0 { 0 } else { m - x })
            .collect();
        Element { digits }
    }

    pub fn scalar_mul(&self, r: i64, a: &Element) -> Result<Element> {
        self.conform(a)?;
        Ok(self.scalar_mul_unchecked(r, a))
    }

    pub(crate) fn scalar_mul_unchecked(&self, r: i64, a: &Element) -> Element {
        let digits = a
            .digits
            .iter()
            .zip(&self.radices)
            .map(|(&x, &m)| mul_mod(reduce_signed(r, m), x, m))
            .collect();
        Element { digits }
    }

    /// The unique `b` with `r·b = a`, for `1 <= r <= h`.
    pub fn unit_div(&self, a: &Element, r: i64) -> Result<Element> {
        self.conform(a)?;
        if r < 1 || r > i64::from(self.h) {
            return Err(Error::DivisorOutOfRange { r, h: self.h });
        }
        let digits = a
            .digits
            .iter()
            .zip(&self.radices)
            .map(|(&x, &m)| mul_mod(x, self.inverse(r as u32, m), m))
            .collect();
        Ok(Element { digits })
    }

    /// `r^{-1} mod m` for a validated radix `m` and `1 <= r <= h`.
    pub(crate) fn inverse(&self, r: u32, m: u64) -> u64 {
        match self.inverses.get(&m) {
            Some(table) if (r as usize) <= table.len() => table[r as usize - 1],
            _ => mod_inverse(u64::from(r), m).expect("r is a unit for validated radices"),
        }
    }

    pub fn encode(&self, digits: &[u64]) -> Result<u64> {
        self.conform(&Element::from_digits(digits.to_vec()))?;
        Ok(self.encode_unchecked(digits))
    }

    pub(crate) fn encode_unchecked(&self, digits: &[u64]) -> u64 {
        digits.iter().zip(&self.strides).map(|(&d, &s)| d * s).sum()
    }

    pub fn decode(&self, index: u64) -> Result<Element> {
        self.check_index(index)?;
        let mut digits = vec![0; self.digit_count()];
        self.decode_into(index, &mut digits);
        Ok(Element { digits })
    }

    pub(crate) fn decode_into(&self, mut index: u64, out: &mut [u64]) {
        for d in (0..self.radices.len()).rev() {
            out[d] = index % self.radices[d];
            index /= self.radices[d];
        }
    }

    pub fn check_index(&self, index: u64) -> Result<()> {
        if index >= self.total_size {
            Err(Error::IndexOutOfRange {
                index,
                size: self.total_size,
            })
        } else {
            Ok(())
        }
    }

    /// Index of the sum of two elements given by index.
    pub(crate) fn add_indices(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        for d in (0..self.radices.len()).rev() {
            let m = self.radices[d];
            out += add_mod(a % m, b % m, m) * self.strides[d];
            a /= m;
            b /= m;
        }
        out
    }

    pub(crate) fn neg_index(&self, a: u64) -> u64 {
        let mut a = a;
        let mut out = 0u64;
        for d in (0..self.radices.len()).rev() {
            let m = self.radices[d];
            let x = a % m;
            out += (if x == 0 { 0 } else { m - x }) * self.strides[d];
            a /= m;
        }
        out
    }

    pub(crate) fn scalar_mul_index(&self, r: i64, a: u64) -> u64 {
        let mut a = a;
        let mut out = 0u64;
        for d in (0..self.radices.len()).rev() {
            let m = self.radices[d];
            out += mul_mod(reduce_signed(r, m), a % m, m) * self.strides[d];
            a /= m;
        }
        out
    }

    /// Coordinates of module `i` within an element.
    pub fn project_module<'a>(&self, a: &'a Element, i: usize) -> &'a [u64] {
        &a.digits[self.module_digits(i)]
    }

    /// Renders module `i` of `a` as a polynomial `c_0 + c_1 t + ...` when the
    /// module is a vector space (coordinate `j` is the coefficient of `t^j`),
    /// or as a residue for a cyclic module.
    pub fn format_module(&self, a: &Element, i: usize) -> String {
        let coords = self.project_module(a, i);
        match self.modules[i] {
            ModuleSpec::Cyclic(_) => coords[0].to_string(),
            ModuleSpec::VectorSpace { .. } => polynomial_string(coords),
        }
    }
}

fn add_mod(x: u64, y: u64, m: u64) -> u64 {
    let s = u128::from(x) + u128::from(y);
    (s % u128::from(m)) as u64
}

/// `c_0 + c_1 t + c_2 t^2 ...` with zero terms dropped.
pub fn polynomial_string(coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| match j {
            0 => c.to_string(),
            1 if c == 1 => "t".to_string(),
            1 => format!("{c}t"),
            _ if c == 1 => format!("t^{j}"),
            _ => format!("{c}t^{j}"),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.modules == other.modules
    }
}

impl Eq for GroupSpec {}

impl TryFrom<GroupSpecJson> for GroupSpec {
    type Error = Error;

    fn try_from(raw: GroupSpecJson) -> Result<Self> {
        GroupSpec::new(raw.h, raw.modules)
    }
}

impl From<GroupSpec> for GroupSpecJson {
    fn from(spec: GroupSpec) -> Self {
        GroupSpecJson {
            h: spec.h,
            modules: spec.modules,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.modules.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Isomorphism `⊕ Z/m_i → Z/m*` for pairwise-coprime moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtIsomorphism {
    moduli: Vec<u64>,
    modulus: u64,
    /// `e_i ≡ 1 (mod m_i)` and `e_i ≡ 0 (mod m_j)` for `j != i`.
    idempotents: Vec<u64>,
}

pub fn crt_isomorphism(spec: &GroupSpec) -> Result<CrtIsomorphism> {
    let mut moduli = Vec::with_capacity(spec.modules().len());
    for m in spec.modules() {
        match *m {
            ModuleSpec::Cyclic(m) => moduli.push(m),
            ModuleSpec::VectorSpace { p, dim: 1 } => moduli.push(p),
            other => return Err(Error::NotCoprime(format!("{other} is not cyclic"))),
        }
    }
    for i in 0..moduli.len() {
        for j in i + 1..moduli.len() {
            if moduli[i].gcd(&moduli[j]) != 1 {
                return Err(Error::NotCoprime(format!(
                    "gcd({}, {}) != 1",
                    moduli[i], moduli[j]
                )));
            }
        }
    }
    let modulus = spec.total_size();
    let idempotents = moduli
        .iter()
        .map(|&m| {
            let rest = modulus / m;
            let inv = mod_inverse(rest % m, m).expect("coprime moduli");
            mul_mod(rest, inv, modulus)
        })
        .collect();
    Ok(CrtIsomorphism {
        moduli,
        modulus,
        idempotents,
    })
}

impl CrtIsomorphism {
    /// `m* = ∏ m_i`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn forward(&self, a: &Element) -> Result<u64> {
        if a.digits().len() != self.moduli.len() {
            return Err(Error::SpecMismatch(format!(
                "expected {} residues, got {}",
                self.moduli.len(),
                a.digits().len()
            )));
        }
        let mut acc = 0u64;
        for ((&x, &m), &e) in a.digits().iter().zip(&self.moduli).zip(&self.idempotents) {
            if x >= m {
                return Err(Error::SpecMismatch(format!("{x} is not reduced mod {m}")));
            }
            acc = add_mod(acc, mul_mod(x, e, self.modulus), self.modulus);
        }
        Ok(acc)
    }

    pub fn inverse(&self, x: u64) -> Result<Element> {
        if x >= self.modulus {
            return Err(Error::IndexOutOfRange {
                index: x,
                size: self.modulus,
            });
        }
        Ok(Element::from_digits(
            self.moduli.iter().map(|&m| x % m).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(d: &[u64]) -> Element {
        Element::from_digits(d.to_vec())
    }

    #[test]
    fn add_sub_neg_in_z5_squared() {
        let g = GroupSpec::cyclic(2, &[5, 5]).unwrap();
        assert_eq!(g.add(&el(&[3, 4]), &el(&[4, 3])).unwrap(), el(&[2, 2]));
        assert_eq!(g.sub(&el(&[1, 0]), &el(&[0, 1])).unwrap(), el(&[1, 4]));
        let a = el(&[2, 3]);
        assert_eq!(g.add(&a, &g.zero()).unwrap(), a);
        assert_eq!(g.add(&a, &g.neg(&a).unwrap()).unwrap(), g.zero());
        assert_eq!(g.sub(&a, &a).unwrap(), g.zero());
        assert_eq!(g.sub(&a, &g.zero()).unwrap(), a);
    }

    #[test]
    fn scalar_mul_and_unit_div() {
        let g = GroupSpec::cyclic(2, &[5]).unwrap();
        assert_eq!(g.scalar_mul(2, &el(&[3])).unwrap(), el(&[1]));
        assert_eq!(g.scalar_mul(-1, &el(&[3])).unwrap(), el(&[2]));
        assert_eq!(g.scalar_mul(0, &el(&[3])).unwrap(), el(&[0]));
        assert_eq!(g.scalar_mul(1, &el(&[3])).unwrap(), el(&[3]));
        assert_eq!(g.unit_div(&el(&[1]), 2).unwrap(), el(&[3]));
        assert_eq!(g.unit_div(&el(&[0]), 2).unwrap(), el(&[0]));
        assert!(matches!(
            g.unit_div(&el(&[1]), 3),
            Err(Error::DivisorOutOfRange { r: 3, h: 2 })
        ));
        assert!(g.unit_div(&el(&[1]), 0).is_err());
    }

    #[test]
    fn spec_mismatch_is_reported() {
        let g = GroupSpec::cyclic(2, &[5, 7]).unwrap();
        assert!(matches!(
            g.add(&el(&[1]), &el(&[1, 1])),
            Err(Error::SpecMismatch(_))
        ));
        assert!(matches!(
            g.add(&el(&[5, 1]), &el(&[1, 1])),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn module_validation() {
        assert!(ModuleSpec::Cyclic(6).validate(2).is_err());
        assert!(ModuleSpec::Cyclic(6).validate(1).is_ok());
        for h in 1..=4 {
            assert!(ModuleSpec::Cyclic(35).validate(h).is_ok());
        }
        assert!(ModuleSpec::Cyclic(35).validate(5).is_err());
        assert!(ModuleSpec::VectorSpace { p: 3, dim: 2 }.validate(2).is_ok());
        assert!(ModuleSpec::VectorSpace { p: 3, dim: 2 }
            .validate(3)
            .is_err());
        assert!(ModuleSpec::VectorSpace { p: 9, dim: 2 }
            .validate(2)
            .is_err());
        assert!(ModuleSpec::Cyclic(0).validate(1).is_err());
        assert_eq!(
            ModuleSpec::VectorSpace { p: 5, dim: 3 }.size().unwrap(),
            125
        );
    }

    #[test]
    fn mixed_radix_order() {
        // module 0 is the most significant digit: index = 1*7 + 2
        let g = GroupSpec::cyclic(2, &[5, 7]).unwrap();
        assert_eq!(g.encode(&[1, 2]).unwrap(), 9);
        assert_eq!(g.encode(&[0, 0]).unwrap(), 0);
        assert_eq!(g.encode(&[4, 6]).unwrap(), 34);
        assert_eq!(g.decode(9).unwrap(), el(&[1, 2]));
        assert!(g.decode(35).is_err());
        assert!(g.encode(&[5, 0]).is_err());
    }

    #[test]
    fn vector_space_digits() {
        let g = GroupSpec::new(
            2,
            vec![
                ModuleSpec::Cyclic(5),
                ModuleSpec::VectorSpace { p: 3, dim: 2 },
            ],
        )
        .unwrap();
        assert_eq!(g.total_size(), 45);
        assert_eq!(g.digit_count(), 3);
        assert_eq!(g.module_digits(1), 1..3);
        let a = g.element(vec![1, 2, 1]).unwrap();
        assert_eq!(g.format_module(&a, 1), "2 + t");
        assert_eq!(g.unit_div(&a, 2).unwrap(), el(&[3, 1, 2]));
    }

    #[test]
    fn polynomial_printer() {
        assert_eq!(polynomial_string(&[0, 0, 0]), "0");
        assert_eq!(polynomial_string(&[1, 0, 3]), "1 + 3t^2");
        assert_eq!(polynomial_string(&[0, 1, 1]), "t + t^2");
    }

    #[test]
    fn crt_small() {
        let g = GroupSpec::cyclic(2, &[5, 7]).unwrap();
        let crt = crt_isomorphism(&g).unwrap();
        assert_eq!(crt.modulus(), 35);
        assert_eq!(crt.forward(&el(&[1, 2])).unwrap(), 16);
        assert_eq!(crt.inverse(16).unwrap(), el(&[1, 2]));

        let single = GroupSpec::cyclic(2, &[7]).unwrap();
        let id = crt_isomorphism(&single).unwrap();
        for x in 0..7 {
            assert_eq!(id.forward(&el(&[x])).unwrap(), x);
        }

        assert!(crt_isomorphism(&GroupSpec::cyclic(2, &[5, 5]).unwrap()).is_err());
        let vs = GroupSpec::new(2, vec![ModuleSpec::VectorSpace { p: 5, dim: 2 }]).unwrap();
        assert!(crt_isomorphism(&vs).is_err());
    }

    #[test]
    fn crt_exhaustive_bijective_and_additive() {
        let g = GroupSpec::cyclic(4, &[5, 7, 11]).unwrap();
        let crt = crt_isomorphism(&g).unwrap();
        let mut seen = vec![false; 385];
        for i in 0..g.total_size() {
            let a = g.decode(i).unwrap();
            let x = crt.forward(&a).unwrap();
            assert!(!seen[x as usize]);
            seen[x as usize] = true;
            assert_eq!(crt.inverse(x).unwrap(), a);
            for j in (0..g.total_size()).step_by(17) {
                let b = g.decode(j).unwrap();
                let lhs = crt.forward(&g.add(&a, &b).unwrap()).unwrap();
                let rhs = (x + crt.forward(&b).unwrap()) % 385;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn unit_div_inverts_scalar_mul_exhaustively() {
        let g = GroupSpec::new(
            4,
            vec![
                ModuleSpec::Cyclic(35),
                ModuleSpec::VectorSpace { p: 5, dim: 2 },
                ModuleSpec::Cyclic(11),
            ],
        )
        .unwrap();
        assert!(g.total_size() <= 10_000);
        for i in 0..g.total_size() {
            let a = g.decode(i).unwrap();
            assert_eq!(g.encode(a.digits()).unwrap(), i);
            for r in 1..=4 {
                let ra = g.scalar_mul(r, &a).unwrap();
                assert_eq!(g.unit_div(&ra, r).unwrap(), a);
            }
        }
    }

    #[test]
    fn index_arithmetic_matches_element_arithmetic() {
        let g = GroupSpec::cyclic(2, &[5, 7, 3]).unwrap();
        for i in 0..g.total_size() {
            let a = g.decode(i).unwrap();
            assert_eq!(
                g.neg_index(i),
                g.encode(g.neg(&a).unwrap().digits()).unwrap()
            );
            assert_eq!(
                g.scalar_mul_index(-3, i),
                g.encode(g.scalar_mul(-3, &a).unwrap().digits()).unwrap()
            );
            for j in 0..g.total_size() {
                let b = g.decode(j).unwrap();
                assert_eq!(
                    g.add_indices(i, j),
                    g.encode(g.add(&a, &b).unwrap().digits()).unwrap()
                );
            }
        }
    }

    #[test]
    fn json_shape() {
        let g = GroupSpec::new(
            2,
            vec![
                ModuleSpec::Cyclic(5),
                ModuleSpec::VectorSpace { p: 3, dim: 2 },
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"h":2,"modules":[{"cyclic":5},{"vector_space":{"p":3,"dim":2}}]}"#
        );
        let back: GroupSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GroupSpec>(r#"{"h":2,"modules":[{"cyclic":6}]}"#).is_err());
    }

    proptest! {
        #[test]
        fn unit_div_round_trip_large(
            m in prop::sample::select(vec![101u64, 1009, 10007, 35 * 101]),
            x in 0u64..1_000_000,
            r in 1i64..=4,
        ) {
            let g = GroupSpec::cyclic(4, &[m, 7919]).unwrap();
            let a = g.element(vec![x % m, x % 7919]).unwrap();
            let ra = g.scalar_mul(r, &a).unwrap();
            prop_assert_eq!(g.unit_div(&ra, r).unwrap(), a);
        }

        #[test]
        fn encode_decode_round_trip(i in 0u64..(101 * 103 * 125)) {
            let g = GroupSpec::new(2, vec![
                ModuleSpec::Cyclic(101),
                ModuleSpec::Cyclic(103),
                ModuleSpec::VectorSpace { p: 5, dim: 3 },
            ]).unwrap();
            let a = g.decode(i).unwrap();
            prop_assert_eq!(g.encode(a.digits()).unwrap(), i);
        }
    }
}
