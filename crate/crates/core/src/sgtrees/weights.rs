use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::compositions::InequalityReport;
use crate::error::{domain, Error, Result};
use crate::rational::Q;
use crate::treespace::{PlaneTree, VertexSet};

/// Offspring weights `w_0, w_1, …`, exact and finitely supported.
///
/// A truncated sequence only knows `w_i` for `i < radius`; that is exactly
/// what trees with at most `radius` vertices can see, so tables up to that
/// size are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSequence {
    w: Vec<Q>,
    radius: Option<usize>,
}

impl WeightSequence {
    /// A sequence known exactly, zero past the given entries.
    pub fn new(w: Vec<Q>) -> Result<Self> {
        Self::build(w, None)
    }

    /// The first `radius` entries of a longer (possibly infinite) sequence.
    pub fn truncated(mut w: Vec<Q>, radius: usize) -> Result<Self> {
        w.truncate(radius);
        Self::build(w, Some(radius))
    }

    pub fn from_fn(f: impl Fn(usize) -> Q, radius: usize) -> Result<Self> {
        Self::build((0..radius).map(f).collect(), Some(radius))
    }

    fn build(mut w: Vec<Q>, radius: Option<usize>) -> Result<Self> {
        if let Some(i) = w.iter().position(|x| x.is_negative()) {
            return domain(format!("w_{i} is negative"));
        }
        while w.last().is_some_and(|x| x.is_zero()) {
            w.pop();
        }
        if w.is_empty() {
            return domain("weight sequence is identically zero");
        }
        Ok(WeightSequence { w, radius })
    }

    pub fn get(&self, i: usize) -> Q {
        self.w.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// Stored entries, up to the last nonzero one.
    pub fn values(&self) -> &[Q] {
        &self.w
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    /// Largest `i` with `w_i ≠ 0`.
    pub fn top(&self) -> usize {
        self.w.len() - 1
    }

    /// `W = (w_0, w_d, w_{2d}, …)`.
    pub fn progression(&self, d: u32) -> Vec<Q> {
        self.w.iter().step_by(d as usize).cloned().collect()
    }

    /// `r_d(w)`: the last index of `W` with a nonzero entry.
    pub fn r(&self, d: u32) -> usize {
        self.top() / d as usize
    }

    /// Support `{ld : 0 ≤ l ≤ r}` with `w_0 w_d > 0`.
    pub fn validate(&self, d: u32) -> Result<()> {
        if d == 0 {
            return domain("d must be positive");
        }
        let d = d as usize;
        if self.get(0).is_zero() || self.get(d).is_zero() {
            return domain(format!("w_0 w_{d} must be positive"));
        }
        for (i, x) in self.w.iter().enumerate() {
            if (i % d == 0) == x.is_zero() {
                return domain(format!(
                    "w must be supported exactly on multiples of {d} up to {}; index {i} violates this",
                    self.top()
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn check_radius(&self, size: usize) -> Result<()> {
        match self.radius {
            Some(r) if size > r => domain(format!(
                "trees with {size} vertices need w_0..w_{} but the truncation radius is {r}",
                size - 1
            )),
            _ => Ok(()),
        }
    }

    /// `ω(T) = ∏_u w_{k_u(T)}`.
    pub fn weight(&self, t: &PlaneTree) -> Q {
        t.out_degrees().values().map(|&k| self.get(k)).product()
    }

    /// Refuses unless `W` is log-concave, reporting the first bad index of `W`.
    pub fn require_log_concave(&self, d: u32) -> Result<()> {
        let check = is_log_concave(&self.progression(d));
        match check.witness {
            None => Ok(()),
            Some(i) => Err(Error::Refused {
                witness: i,
                reason: format!("offspring weights along multiples of {d} are not log-concave"),
            }),
        }
    }
}

/// `w'_i = α βⁱ w_i`.
pub fn tilt(w: &WeightSequence, alpha: &Q, beta: &Q) -> Result<WeightSequence> {
    if !alpha.is_positive() || !beta.is_positive() {
        return domain("tilt parameters must be positive");
    }
    let mut power = Q::one();
    let mut out = Vec::with_capacity(w.w.len());
    for x in &w.w {
        out.push(alpha * &power * x);
        power *= beta;
    }
    WeightSequence::build(out, w.radius)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogConcavity {
    pub holds: bool,
    /// First interior index where `x_i² < x_{i−1}x_{i+1}` or `x_i` is an internal zero.
    pub witness: Option<usize>,
}

pub fn is_log_concave(x: &[Q]) -> LogConcavity {
    let first = x.iter().position(|v| !v.is_zero());
    let last = x.iter().rposition(|v| !v.is_zero());
    for i in 1..x.len().saturating_sub(1) {
        let internal_zero = x[i].is_zero() && first.is_some_and(|f| f < i) && last.is_some_and(|l| l > i);
        if internal_zero || &x[i] * &x[i] < &x[i - 1] * &x[i + 1] {
            return LogConcavity {
                holds: false,
                witness: Some(i),
            };
        }
    }
    LogConcavity {
        holds: true,
        witness: None,
    }
}

/// `x_{i−j} x_{i'−j'} ≥ x_{i−j'} x_{i'−j}` for `i ≤ i'`, `j ≤ j'` in `0..window`,
/// with `x` extended by zeros to negative indices.
pub fn check_toeplitz_tp2(x: &[Q], window: usize) -> InequalityReport {
    let at = |k: isize| -> Q {
        if k < 0 {
            Q::zero()
        } else {
            x.get(k as usize).cloned().unwrap_or_else(Q::zero)
        }
    };
    let mut report = InequalityReport::new("Toeplitz 2x2 minors");
    let w = window as isize;
    for i in 0..w {
        for i2 in i..w {
            for j in 0..w {
                for j2 in j..w {
                    let left = at(i - j2) * at(i2 - j);
                    let right = at(i - j) * at(i2 - j2);
                    report.le(0, format!("i={i}, i'={i2}, j={j}, j'={j2}"), "minor >= 0", &left, &right);
                }
            }
        }
    }
    report
}
