use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rational::Q;

use super::composition::{all_compositions, satisfies_arith, ArithClass, Composition};
use super::weights::WeightPair;

/// Exact part weights `b_m` and shifted partition values `Z^{a^{+l},b}_n`.
///
/// Implemented both by the generic composition tables below and by the tree
/// tables in `sgtrees`, so that kernels can be built from either route.
pub trait PartitionSource {
    /// Class of the unshifted pair.
    fn class(&self) -> ArithClass;
    /// Largest `l` with `a_l ≠ 0`; every higher shift has `Z ≡ 0`.
    fn top_shift(&self) -> usize;
    /// Largest total `n` for which `Z_n` and `b_n` are available.
    fn horizon(&self) -> usize;
    fn b(&self, m: usize) -> Result<&Q>;
    fn z(&self, shift: usize, total: usize) -> Result<&Q>;
}

pub(crate) fn check_horizon(requested: usize, horizon: usize) -> Result<()> {
    if requested > horizon {
        return Err(Error::HorizonExceeded { requested, horizon });
    }
    Ok(())
}

/// `Z^{a^{+l},b}_n` for all shifts and totals up to a horizon, by convolution.
#[derive(Clone, Debug)]
pub struct CompositionTables {
    wp: WeightPair,
    horizon: usize,
    /// `z[l][n]`
    z: Vec<Vec<Q>>,
    zero: Q,
}

impl CompositionTables {
    pub fn new(wp: &WeightPair, horizon: usize) -> Result<Self> {
        check_horizon(horizon, wp.horizon())?;
        // g[i][n]: sum over compositions of n into i parts of the product of b.
        let mut g = vec![vec![Q::zero(); horizon + 1]; horizon + 1];
        g[0][0] = Q::one();
        for i in 1..=horizon {
            for n in i..=horizon {
                let mut acc = Q::zero();
                for m in 1..=n - (i - 1) {
                    let prev = &g[i - 1][n - m];
                    if !prev.is_zero() {
                        acc += wp.b(m)? * prev;
                    }
                }
                g[i][n] = acc;
            }
        }
        let top = wp.top();
        let z = (0..=top)
            .map(|l| {
                (0..=horizon)
                    .map(|n| (0..=n).map(|i| wp.a_at(i + l) * &g[i][n]).sum())
                    .collect()
            })
            .collect();
        Ok(CompositionTables {
            wp: wp.clone(),
            horizon,
            z,
            zero: Q::zero(),
        })
    }

    pub fn weight_pair(&self) -> &WeightPair {
        &self.wp
    }
}

impl PartitionSource for CompositionTables {
    fn class(&self) -> ArithClass {
        self.wp.class()
    }

    fn top_shift(&self) -> usize {
        self.wp.top()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn b(&self, m: usize) -> Result<&Q> {
        check_horizon(m, self.horizon)?;
        self.wp.b(m)
    }

    fn z(&self, shift: usize, total: usize) -> Result<&Q> {
        check_horizon(total, self.horizon)?;
        Ok(self.z.get(shift).map(|row| &row[total]).unwrap_or(&self.zero))
    }
}

/// A partition value, flagged when the total has no mass in its class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionValue {
    Positive(Q),
    ZeroMass,
}

impl PartitionValue {
    pub fn value(&self) -> Q {
        match self {
            PartitionValue::Positive(q) => q.clone(),
            PartitionValue::ZeroMass => Q::zero(),
        }
    }
}

/// `Z^{a,b}_n = Σ a_i b_{n_1} ⋯ b_{n_i}` over compositions of `n`.
pub fn partition_function(wp: &WeightPair, n: usize) -> Result<PartitionValue> {
    let tables = CompositionTables::new(wp, n)?;
    let z = tables.z(0, n)?;
    Ok(if z.is_zero() {
        PartitionValue::ZeroMass
    } else {
        PartitionValue::Positive(z.clone())
    })
}

/// `P_n^{a,b}(c) = a_{#c} ∏ b_{n_j} / Z_n` on the compositions of `n` in the pair's class.
pub fn comp_distribution(wp: &WeightPair, n: usize) -> Result<BTreeMap<Composition, Q>> {
    let z = match partition_function(wp, n)? {
        PartitionValue::Positive(z) => z,
        PartitionValue::ZeroMass => {
            return Err(Error::ZeroMass(format!("compositions of {n} in class {}", wp.class())))
        }
    };
    let mut law = BTreeMap::new();
    for c in all_compositions(n) {
        if !satisfies_arith(&c, wp.class()) {
            continue;
        }
        let mut weight = wp.a_at(c.len());
        for &p in c.parts() {
            weight *= wp.b(p as usize)?;
        }
        if !weight.is_zero() {
            law.insert(c, weight / &z);
        }
    }
    Ok(law)
}

/// Law of the first part, reindexed by `j = (part − 1)/d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepLaw {
    pub d: u32,
    pub total: usize,
    #[serde(skip)]
    masses: Vec<Q>,
}

impl StepLaw {
    /// `parts` maps first-part values (each `≡ 1 mod d`, at most `total`) to masses summing to 1.
    pub fn from_parts(d: u32, total: usize, parts: &BTreeMap<u32, Q>) -> Result<Self> {
        if d == 0 {
            return domain("d must be positive");
        }
        let len = if total == 0 { 0 } else { (total - 1) / d as usize + 1 };
        let mut masses = vec![Q::zero(); len];
        for (&p, q) in parts {
            if p == 0 || (p - 1) % d != 0 || p as usize > total {
                return domain(format!("part {p} is not a first part of a composition of {total}"));
            }
            masses[((p - 1) / d) as usize] = q.clone();
        }
        let law = StepLaw { d, total, masses };
        if !law.masses.iter().sum::<Q>().is_one() {
            return domain("first-part masses do not sum to 1");
        }
        Ok(law)
    }

    pub fn masses(&self) -> &[Q] {
        &self.masses
    }

    /// Mass of index `j` (part `jd + 1`); zero outside the range.
    pub fn at(&self, j: usize) -> Q {
        self.masses.get(j).cloned().unwrap_or_else(Q::zero)
    }

    /// Cumulative mass of indices `0..=j`; `j = -1` gives 0.
    pub fn cdf(&self, j: isize) -> Q {
        if j < 0 {
            return Q::zero();
        }
        self.masses.iter().take(j as usize + 1).sum()
    }

    pub fn part(&self, j: usize) -> u32 {
        j as u32 * self.d + 1
    }

    /// The law keyed by part value, zero masses omitted.
    pub fn by_part(&self) -> BTreeMap<u32, Q> {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(j, q)| (self.part(j), q.clone()))
            .collect()
    }
}

/// `μ(p) = b_p Z^{a^{+(l+1)}}_{N−p} / Z^{a^{+l}}_N` at shift `l` and total `N ≥ 1`.
pub fn first_part_law_at<S: PartitionSource + ?Sized>(src: &S, shift: usize, total: usize) -> Result<StepLaw> {
    if total == 0 {
        return domain("the empty composition has no first part");
    }
    let z = src.z(shift, total)?;
    if z.is_zero() {
        return Err(Error::ZeroMass(format!(
            "total {total} at shift {shift} of class {}",
            src.class()
        )));
    }
    let d = src.class().d;
    let len = (total - 1) / d as usize + 1;
    let mut masses = Vec::with_capacity(len);
    for j in 0..len {
        let p = j * d as usize + 1;
        let rest = src.z(shift + 1, total - p)?;
        masses.push(if rest.is_zero() {
            Q::zero()
        } else {
            src.b(p)? * rest / z
        });
    }
    Ok(StepLaw { d, total, masses })
}

/// Law of `proj_1` under `P_n^{a,b}`.
pub fn first_part_law(wp: &WeightPair, n: usize) -> Result<StepLaw> {
    let tables = CompositionTables::new(wp, n)?;
    first_part_law_at(&tables, 0, n)
}
