//! Exact rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_int(n: impl Into<BigInt>) -> Rational {
    BigRational::from_integer(n.into())
}

/// Always renders `p/q`, including integers (`2/1`).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer. Decimal and float notation is rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a rational of the form p/q, got {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(serde::de::Error::custom)
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("9/10").unwrap(), ratio(9, 10));
        assert_eq!(parse("18/20").unwrap(), ratio(9, 10));
        assert_eq!(parse("3").unwrap(), ratio(3, 1));
        assert_eq!(format(&ratio(6, 3)), "2/1");
        assert_eq!(format(&ratio(7, 10)), "7/10");
    }

    #[test]
    fn rejects_floats_and_zero_denominator() {
        assert!(parse("0.7").is_err());
        assert!(parse("1e-3").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("").is_err());
    }
}
