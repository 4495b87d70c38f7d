use num_traits::Zero;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rational::{serde_q, Q};

use super::composition::ArithClass;
use super::partition::{first_part_law_at, CompositionTables, PartitionSource};
use super::weights::WeightPair;

/// One violated inequality `left ≤ right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityFailure {
    pub n: usize,
    /// Which shifted pair (or pair of pairs) the inequality concerns.
    pub at: String,
    pub relation: String,
    #[serde(with = "serde_q")]
    pub left: Q,
    #[serde(with = "serde_q")]
    pub right: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub family: String,
    pub checked: usize,
    pub failures: Vec<InequalityFailure>,
}

impl InequalityReport {
    pub(crate) fn new(family: &str) -> Self {
        InequalityReport {
            family: family.to_string(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn undefined(&mut self, n: usize, at: String) {
        self.checked += 1;
        self.failures.push(InequalityFailure {
            n,
            at,
            relation: "ratio with zero denominator".to_string(),
            left: Q::zero(),
            right: Q::zero(),
        });
    }

    pub(crate) fn equal(&mut self, n: usize, at: String, relation: &str, left: &Q, right: &Q) {
        self.checked += 1;
        if left != right {
            self.failures.push(InequalityFailure {
                n,
                at,
                relation: relation.to_string(),
                left: left.clone(),
                right: right.clone(),
            });
        }
    }

    pub(crate) fn le(&mut self, n: usize, at: String, relation: &str, left: &Q, right: &Q) {
        self.checked += 1;
        if left > right {
            self.failures.push(InequalityFailure {
                n,
                at,
                relation: relation.to_string(),
                left: left.clone(),
                right: right.clone(),
            });
        }
    }
}

fn ratio<S: PartitionSource>(src: &S, shift: usize, hi: usize, lo: usize) -> Result<Option<Q>> {
    let den = src.z(shift, lo)?;
    if den.is_zero() {
        return Ok(None);
    }
    Ok(Some(src.z(shift, hi)? / den))
}

fn b_ratio<S: PartitionSource>(src: &S, hi: usize, lo: usize) -> Result<Q> {
    Ok(src.b(hi)? / src.b(lo)?)
}

/// The sufficient conditions for admissibility: the two-sided ratio bounds
/// for `d = 1`, the ordered ratio grid for `d ≥ 2` with `s = 0`, and the
/// first-part step conditions at every shift otherwise.
pub fn check_admissibility_inequalities(wp: &WeightPair, cls: ArithClass, n_max: usize) -> Result<InequalityReport> {
    if cls != wp.class() {
        return domain(format!("weight pair has class {}, not {cls}", wp.class()));
    }
    if cls.s != 0 {
        return check_step_inequalities(wp, n_max * cls.d as usize + cls.s as usize);
    }
    if cls.d == 1 {
        check_plain(wp, n_max)
    } else {
        check_grid(wp, n_max)
    }
}

fn check_plain(wp: &WeightPair, n_max: usize) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("plain ratio bounds");
    let r = wp.top();
    if r <= 1 {
        // a = (a_0, a_1): every composition has one part, nothing to check.
        return Ok(report);
    }
    let src = CompositionTables::new(wp, n_max + 2)?;
    for n in 0..=n_max {
        let upper = b_ratio(&src, n + 2, n + 1)?;
        let lower = if n >= 1 { Some(b_ratio(&src, n + 1, n)?) } else { None };
        for l in 0..r {
            let at = format!("l={l}");
            let Some(z) = ratio(&src, l, n + 1, n)? else {
                report.undefined(n, at);
                continue;
            };
            if let Some(lower) = &lower {
                report.le(n, at.clone(), "b ratio <= Z ratio", lower, &z);
            }
            report.le(n, at, "Z ratio <= next b ratio", &z, &upper);
        }
    }
    Ok(report)
}

fn check_grid(wp: &WeightPair, n_max: usize) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("arithmetic ratio grid");
    let d = wp.class().d as usize;
    let r = wp.r();
    let src = CompositionTables::new(wp, (n_max + 1) * d + 1)?;
    for n in 0..=n_max {
        // R_n(q, s) = Z^{a^{+(qd+s)}}_{nd+(d−s)} / Z^{a^{+(qd+s)}}_{(n−1)d+(d−s)}; only s = 0 exists at n = 0.
        let mut grid: Vec<((usize, usize), Q)> = Vec::new();
        for s in 0..d {
            if n == 0 && s > 0 {
                continue;
            }
            for q in 0..r {
                let lo = (n * d + d - s) - d;
                match ratio(&src, q * d + s, n * d + d - s, lo)? {
                    Some(x) => grid.push(((q, s), x)),
                    None => report.undefined(n, format!("(q,s)=({q},{s})")),
                }
            }
        }
        let upper = b_ratio(&src, (n + 1) * d + 1, n * d + 1)?;
        let lower = if n >= 1 { Some(b_ratio(&src, n * d + 1, (n - 1) * d + 1)?) } else { None };
        for ((q, s), x) in &grid {
            let at = format!("(q,s)=({q},{s})");
            if let Some(lower) = &lower {
                report.le(n, at.clone(), "b ratio <= R", lower, x);
            }
            report.le(n, at, "R <= next b ratio", x, &upper);
        }
        for ((q, s), x) in &grid {
            for ((q2, s2), y) in &grid {
                if (q, s) != (q2, s2) && q <= q2 && s <= s2 {
                    let at = format!("(q,s)=({q},{s}) vs ({q2},{s2})");
                    report.le(n, at, "R(q',s') <= R(q,s)", y, x);
                }
            }
        }
    }
    Ok(report)
}

/// `μ_{N+d}(p) ≤ μ_N(p) ≥ μ_{N+d}(p+d)` for every shift, total `N ≤ horizon − d`
/// and first part `p`, with the masses `μ(p) = b_p Z^{a^{+(l+1)}}_{N−p} / Z^{a^{+l}}_N`.
pub fn check_step_inequalities(wp: &WeightPair, horizon: usize) -> Result<InequalityReport> {
    let src = CompositionTables::new(wp, horizon)?;
    step_inequalities(&src)
}

/// The same conditions read off any partition source, such as tree tables.
pub fn step_inequalities<S: PartitionSource>(src: &S) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("first-part step conditions");
    let cls = src.class();
    let d = cls.d as usize;
    for shift in 0..src.top_shift() {
        let mut total = cls.shifted(shift).s as usize;
        while total + d <= src.horizon() {
            if total > 0 && !src.z(shift, total)?.is_zero() {
                let mu = first_part_law_at(src, shift, total)?;
                let next = first_part_law_at(src, shift, total + d)?;
                for j in 0..mu.masses().len() {
                    let at = format!("l={shift}, part={}", mu.part(j));
                    report.le(total, at.clone(), "mu_next(p) <= mu(p)", &next.at(j), &mu.at(j));
                    report.le(total, at, "mu_next(p+d) <= mu(p)", &next.at(j + 1), &mu.at(j));
                }
            }
            total += d;
        }
    }
    Ok(report)
}
