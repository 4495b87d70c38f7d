use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rand_chacha::rand_core::RngCore;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rational::Q;
use crate::sampling::ExactCategorical;

use super::shuffle::{pack, Injection};
use super::theta::{subset_distribution, Theta};

/// A sequence of pairwise distinct positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Xseq(Vec<u32>);

impl Xseq {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.contains(&0) {
            return domain("sequence entries must be positive");
        }
        let distinct: BTreeSet<u32> = entries.iter().copied().collect();
        if distinct.len() != entries.len() {
            return domain(format!("{entries:?} has repeated entries"));
        }
        Ok(Xseq(entries))
    }

    pub fn of(entries: &[u32]) -> Self {
        Xseq::new(entries.to_vec()).expect("distinct positive entries")
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `{x_1, …, x_k}`.
    pub fn prefix_set(&self, k: usize) -> Result<BTreeSet<u32>> {
        self.check_k(k)?;
        Ok(self.0[..k].iter().copied().collect())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.0.len() {
            return domain(format!("k = {k} exceeds the sequence length {}", self.0.len()));
        }
        Ok(())
    }
}

impl fmt::Display for Xseq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", items.join(","))
    }
}

/// `g_{k,x}: ℓ ↦ x_ℓ` on `{1, …, k}`.
pub fn prefix_map(k: usize, x: &Xseq) -> Result<Injection> {
    x.check_k(k)?;
    Injection::new((1..=k as u32).zip(x.0[..k].iter().copied()).collect())
}

/// `σ_{k,x} = p_{{x_1,…,x_k}} ∘ g_{k,x}`: `ℓ` goes to the rank of `x_ℓ` among the first `k` entries.
pub fn sigma_rule(k: usize, x: &Xseq) -> Result<Injection> {
    let g = prefix_map(k, x)?;
    pack(&x.prefix_set(k)?).compose(&g)
}

/// The increasing coupling of `B_0^θ, B_1^θ, …, B_{N_θ}^θ`, realized as a random sequence.
///
/// The smallest support index `i` is inserted at a random rank `K` with
/// `P(K ≤ k) = p_k = B_k^θ(ℰ_i)` into an independent sequence for `θ^{(i)}`.
#[derive(Clone, Debug)]
pub struct NestedSubsetCoupling {
    pivot: u32,
    /// `p_1, …, p_{N_θ}`.
    thresholds: Vec<Q>,
    rank: ExactCategorical<usize>,
    rest: Option<Box<NestedSubsetCoupling>>,
}

impl NestedSubsetCoupling {
    pub fn new(theta: &Theta) -> Result<Self> {
        let n = theta.support_size();
        let pivot = theta.support()[0];
        let thresholds = (1..=n)
            .map(|k| theta.inclusion_probability(pivot, k))
            .collect::<Result<Vec<_>>>()?;
        debug_assert!(thresholds[n - 1].is_one());
        let mut masses = Vec::with_capacity(n);
        let mut prev = Q::zero();
        for (k, p) in thresholds.iter().enumerate() {
            let step = p - &prev;
            if step < Q::zero() {
                return domain(format!("p_{} < p_{k} for the pivot {pivot}", k + 1));
            }
            masses.push((k + 1, step));
            prev = p.clone();
        }
        let rank = ExactCategorical::new(masses)?;
        let rest = match theta.without(pivot) {
            Some(rest) => Some(Box::new(NestedSubsetCoupling::new(&rest)?)),
            None => None,
        };
        Ok(NestedSubsetCoupling {
            pivot,
            thresholds,
            rank,
            rest,
        })
    }

    pub fn pivot(&self) -> u32 {
        self.pivot
    }

    /// `p_k` at `k = 1, …, N_θ`.
    pub fn thresholds(&self) -> &[Q] {
        &self.thresholds
    }

    /// `N_θ`.
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> Xseq {
        let k = self.rank.sample(rng);
        let mut x = match &self.rest {
            Some(rest) => rest.sample(rng).0,
            None => Vec::new(),
        };
        x.insert(k - 1, self.pivot);
        Xseq(x)
    }

    /// The exact law of the sequence, from the same recursion.
    pub fn joint_law(&self) -> BTreeMap<Xseq, Q> {
        let inner = match &self.rest {
            Some(rest) => rest.joint_law(),
            None => BTreeMap::from([(Xseq(Vec::new()), Q::one())]),
        };
        let mut law = BTreeMap::new();
        let mut prev = Q::zero();
        for (k, p) in self.thresholds.iter().enumerate() {
            let step = p - &prev;
            prev = p.clone();
            if step.is_zero() {
                continue;
            }
            for (x, q) in &inner {
                let mut v = x.0.clone();
                v.insert(k, self.pivot);
                *law.entry(Xseq(v)).or_insert_with(Q::zero) += &step * q;
            }
        }
        law
    }
}

/// One draw of `X = (X_1, …, X_{N_θ})`.
pub fn nested_subset_coupling<R: RngCore>(theta: &Theta, rng: &mut R) -> Result<Xseq> {
    Ok(NestedSubsetCoupling::new(theta)?.sample(rng))
}

/// What the nested coupling guarantees, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedCouplingReport {
    pub support_size: usize,
    pub atoms: usize,
    /// `p_k ≤ p_{k+1}` along the whole recursion.
    pub thresholds_monotone: bool,
    /// Levels `k` where the law of `{X_1, …, X_k}` differs from `B_k^θ`.
    pub marginal_failures: Vec<usize>,
    /// Atoms that are not chains of subsets of the support.
    pub bad_atoms: Vec<String>,
}

impl NestedCouplingReport {
    pub fn passed(&self) -> bool {
        self.thresholds_monotone && self.marginal_failures.is_empty() && self.bad_atoms.is_empty()
    }
}

/// Compares the marginals of the exact joint law with `B_k^θ` at every level.
pub fn check_nested_coupling(theta: &Theta) -> Result<NestedCouplingReport> {
    let coupling = NestedSubsetCoupling::new(theta)?;
    let law = coupling.joint_law();
    let n = theta.support_size();
    let support: BTreeSet<u32> = theta.support().into_iter().collect();

    let mut thresholds_monotone = true;
    let mut level = Some(&coupling);
    while let Some(c) = level {
        thresholds_monotone &= c.thresholds.windows(2).all(|w| w[0] <= w[1]);
        level = c.rest.as_deref();
    }

    let bad_atoms = law
        .keys()
        .filter(|x| x.len() != n || !x.0.iter().all(|i| support.contains(i)))
        .map(|x| x.to_string())
        .collect();

    let mut marginal_failures = Vec::new();
    for k in 0..=n {
        let mut marginal: BTreeMap<BTreeSet<u32>, Q> = BTreeMap::new();
        for (x, q) in &law {
            *marginal.entry(x.prefix_set(k.min(x.len()))?).or_insert_with(Q::zero) += q;
        }
        if marginal != subset_distribution(theta, k)? {
            marginal_failures.push(k);
        }
    }
    Ok(NestedCouplingReport {
        support_size: n,
        atoms: law.len(),
        thresholds_monotone,
        marginal_failures,
        bad_atoms,
    })
}
