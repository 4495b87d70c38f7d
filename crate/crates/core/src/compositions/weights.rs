use num_traits::{Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::rational::Q;

use super::composition::ArithClass;

/// The `(a, b)` weights of the composition model, with `b` known up to a horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPair {
    a: Vec<Q>,
    /// `b[0]` is a placeholder; `b_m` for `1 ≤ m ≤ horizon`.
    b: Vec<Q>,
    cls: ArithClass,
}

impl WeightPair {
    /// `b` lists `b_1, b_2, …, b_H`. The pair must be non-degenerate for `cls`.
    pub fn new(a: Vec<Q>, b: Vec<Q>, cls: ArithClass) -> Result<Self> {
        let mut bb = Vec::with_capacity(b.len() + 1);
        bb.push(Q::zero());
        bb.extend(b);
        let wp = WeightPair { a: trim(a), b: bb, cls };
        wp.validate()?;
        Ok(wp)
    }

    pub fn plain(a: Vec<Q>, b: Vec<Q>) -> Result<Self> {
        Self::new(a, b, ArithClass::plain())
    }

    /// `b_m = f(m)` for `1 ≤ m ≤ horizon`.
    pub fn from_fn(a: Vec<Q>, f: impl Fn(usize) -> Q, horizon: usize, cls: ArithClass) -> Result<Self> {
        Self::new(a, (1..=horizon).map(f).collect(), cls)
    }

    pub fn class(&self) -> ArithClass {
        self.cls
    }

    pub fn a(&self) -> &[Q] {
        &self.a
    }

    pub fn a_at(&self, i: usize) -> Q {
        self.a.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn b(&self, m: usize) -> Result<&Q> {
        if m == 0 {
            return domain("b is indexed from 1");
        }
        self.b.get(m).ok_or(Error::HorizonExceeded {
            requested: m,
            horizon: self.horizon(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.b.len() - 1
    }

    /// Largest index with `a_i ≠ 0`.
    pub fn top(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    /// `r_{d,s}(a)`.
    pub fn r(&self) -> usize {
        (self.top() - self.cls.s as usize) / self.cls.d as usize
    }

    /// `(a^{+l}, b)` with its class; fails if the result is degenerate.
    pub fn shift(&self, l: usize) -> Result<WeightPair> {
        let a = self.a.iter().skip(l).cloned().collect();
        let wp = WeightPair {
            a: trim(a),
            b: self.b.clone(),
            cls: self.cls.shifted(l),
        };
        wp.validate().map_err(|e| Error::Domain(format!("shift by {l} is degenerate: {e}")))?;
        Ok(wp)
    }

    /// `(d, s)`-non-degeneracy (plain non-degeneracy when `d = 1`).
    pub fn validate(&self) -> Result<()> {
        let ArithClass { d, s } = self.cls;
        let (d, s) = (d as usize, s as usize);
        if self.a.iter().chain(self.b.iter()).any(|x| x.is_negative()) {
            return domain("weights must be nonnegative");
        }
        if self.a.is_empty() || self.top() < s || self.a_at(s).is_zero() {
            return domain(format!("a_{s} must be positive"));
        }
        let top = self.top();
        if !(top - s).is_multiple_of(d) {
            return domain(format!("a_{top} lies outside the residue class {s} mod {d}"));
        }
        for i in 0..=top {
            let on = i >= s && (i - s) % d == 0;
            if on == self.a[i].is_zero() {
                return domain(format!(
                    "a must be supported exactly on {{l*{d}+{s}}} up to {top}; index {i} violates this"
                ));
            }
        }
        if s == 0 && top == 0 {
            return domain("a_0 a_d must be positive");
        }
        for m in 1..self.b.len() {
            let on = (m - 1) % d == 0;
            if on == self.b[m].is_zero() {
                return domain(format!("b must be positive exactly on 1 mod {d}; index {m} violates this"));
            }
        }
        Ok(())
    }
}

fn trim(mut a: Vec<Q>) -> Vec<Q> {
    while a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
    a
}
