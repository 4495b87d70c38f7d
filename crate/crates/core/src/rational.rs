//! Exact rationals: construction, text round trips and serde helpers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.4` (exactly).
pub fn parse_rational(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = |reason: &str| Error::Parse {
        token: s.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(bad("empty number"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad("bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Q::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad("bad decimal"));
        }
        if digits.is_empty() && frac.is_empty() {
            return Err(bad("bad decimal"));
        }
        let mantissa = format!("{}{}", if digits.is_empty() { "0" } else { digits }, frac);
        let n = BigInt::from_str(&mantissa).map_err(|_| bad("bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Q::new(n, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s)
        .map(Q::from_integer)
        .map_err(|_| bad("not a rational"))
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(text: &str) -> Result<Vec<Q>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_rational)
        .collect()
}

/// Always renders `p/q`, including integers (`3/1`).
pub fn format_rational(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn format_rational_list(xs: &[Q]) -> String {
    xs.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

pub fn is_nonnegative(q: &Q) -> bool {
    !q.is_negative()
}

/// Lossy conversion, used only for reporting chi-square statistics.
pub fn to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for q in xs {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
