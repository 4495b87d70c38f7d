use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// A finite word of positive parts; the empty composition is written `-`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn empty() -> Self {
        Composition(Vec::new())
    }

    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return domain("composition parts must be positive");
        }
        Ok(Composition(parts))
    }

    /// Panics on a zero part; meant for literals.
    pub fn of(parts: &[u32]) -> Self {
        Composition::new(parts.to_vec()).expect("parts are positive")
    }

    pub fn ones(count: usize) -> Self {
        Composition(vec![1; count])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    /// `proj_1`
    pub fn first(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// `proj_{>1}`
    pub fn rest(&self) -> Composition {
        Composition(self.0.iter().skip(1).copied().collect())
    }

    pub fn apply(&self, mv: Move, d: u32) -> Composition {
        let mut parts = self.0.clone();
        match mv {
            Move::Increment(i) => parts[i] += d,
            Move::Append => parts.extend(std::iter::repeat_n(1, d as usize)),
        }
        Composition(parts)
    }
}

/// One `d`-covering step: grow part `i` by `d`, or append `d` parts equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    Increment(usize),
    Append,
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Composition::empty());
        }
        let parts = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>().ok().filter(|&p| p > 0).ok_or_else(|| Error::Parse {
                    token: t.to_string(),
                    reason: "parts must be positive integers".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Composition(parts))
    }
}

impl Serialize for Composition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Composition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The `(d, s)`-arithmetic condition; `(1, 0)` is the plain case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArithClass {
    pub d: u32,
    pub s: u32,
}

impl ArithClass {
    pub fn new(d: u32, s: u32) -> Result<Self> {
        if d == 0 || s >= d {
            return domain(format!("invalid arithmetic class ({d}, {s})"));
        }
        Ok(ArithClass { d, s })
    }

    pub fn plain() -> Self {
        ArithClass { d: 1, s: 0 }
    }

    /// Class of the `l`-th shifted weight pair: `s − l` reduced mod `d`.
    pub fn shifted(&self, l: usize) -> ArithClass {
        let d = self.d as i64;
        let s = (self.s as i64 - l as i64).rem_euclid(d);
        ArithClass { d: self.d, s: s as u32 }
    }

    pub fn admits_total(&self, n: usize) -> bool {
        n % self.d as usize == self.s as usize
    }
}

impl fmt::Display for ArithClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d, self.s)
    }
}

/// `#parts ≡ s (mod d)` and every part `≡ 1 (mod d)`.
pub fn satisfies_arith(c: &Composition, cls: ArithClass) -> bool {
    let d = cls.d as usize;
    c.len() % d == cls.s as usize && c.parts().iter().all(|&p| (p as usize) % d == 1 % d)
}

/// All `c′` with `c ≺^d c′`.
pub fn covering_successors(c: &Composition, d: u32) -> BTreeSet<Composition> {
    let mut out: BTreeSet<Composition> = (0..c.len()).map(|i| c.apply(Move::Increment(i), d)).collect();
    out.insert(c.apply(Move::Append, d));
    out
}

/// Every composition of `n`, in lexicographic order of parts.
pub fn all_compositions(n: usize) -> Vec<Composition> {
    fn rec(n: usize, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if n == 0 {
            out.push(Composition(prefix.clone()));
            return;
        }
        for p in 1..=n {
            prefix.push(p as u32);
            rec(n - p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// The partial order generated by `≺^d`: `c′` is reachable from `c` by covering steps.
pub fn precedes(c: &Composition, c2: &Composition, d: u32) -> bool {
    if c.len() > c2.len() {
        return false;
    }
    let grown_ok = c
        .parts()
        .iter()
        .zip(c2.parts())
        .all(|(&a, &b)| b >= a && (b - a) % d == 0);
    let tail = &c2.parts()[c.len()..];
    grown_ok && tail.len().is_multiple_of(d as usize) && tail.iter().all(|&p| p % d == 1 % d)
}
