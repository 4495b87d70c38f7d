use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::oracle::enumerate_subtrees;
use crate::rational::{serde_q, Q};
use crate::sgtrees::compute_tables;
use crate::treespace::{PlaneTree, RootedSubtree, VertexSet, Word};

use super::bijection::{bij_p, bij_p_inv, DecoratedTree};
use super::theta::{subset_distribution, Theta};

/// `SG_n^{e(θ)}(T) = ∏ e_{k_u(T)} / b_n^{e(θ)}`, possibly zero.
fn sg_mass(theta: &Theta, t: &PlaneTree, b_n: &Q) -> Q {
    theta.offspring_weights().weight(t) / b_n
}

/// `ST_n^θ`, assembled from `SG_n^{e(θ)}` and independent `B_{k_u}^θ` decorations through `𝔓⁻¹`.
pub fn st_distribution(theta: &Theta, n: usize) -> Result<BTreeMap<RootedSubtree, Q>> {
    let w = theta.offspring_weights();
    let trees = crate::sgtrees::sg_distribution(&w, 1, n)?;
    let mut law = BTreeMap::new();
    for (t, p) in trees {
        let degrees: Vec<(Word, usize)> = t.out_degrees().into_iter().collect();
        let mut sets = BTreeMap::new();
        decorate(theta, &t, &degrees, p, &mut sets, &mut law)?;
    }
    Ok(law)
}

fn decorate(
    theta: &Theta,
    t: &PlaneTree,
    todo: &[(Word, usize)],
    mass: Q,
    sets: &mut BTreeMap<Word, BTreeSet<u32>>,
    law: &mut BTreeMap<RootedSubtree, Q>,
) -> Result<()> {
    let Some(((u, k), rest)) = todo.split_first() else {
        let tau = bij_p_inv(&DecoratedTree::new(t.clone(), sets.clone())?)?;
        *law.entry(tau).or_insert_with(Q::zero) += mass;
        return Ok(());
    };
    for (s, q) in subset_distribution(theta, *k)? {
        sets.insert(u.clone(), s);
        decorate(theta, t, rest, &mass * q, sets, law)?;
    }
    sets.remove(u);
    Ok(())
}

/// Term-by-term comparison of `ST_n^θ(τ)` with `SG_n^{e(θ)}(T) ∏_u B_{k_u(T)}^θ(S_u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub n: usize,
    /// Subtrees of `𝕌^{(m)}` compared, `m` the largest index with `θ_m > 0`.
    pub subtrees: usize,
    /// Of those, how many have mass zero on both sides.
    pub saturated: usize,
    pub failures: Vec<String>,
    /// `Σ_τ ∏ θ_i^{N_i(τ)}`.
    #[serde(with = "serde_q")]
    pub partition_value: Q,
    /// `b_n^{e(θ)}`.
    #[serde(with = "serde_q")]
    pub tree_partition_value: Q,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.partition_value == self.tree_partition_value
    }
}

/// Checks the product formula for `ST_n^θ` against direct weights over every subtree.
pub fn check_factorization(theta: &Theta, n: usize) -> Result<FactorizationReport> {
    let subtrees = enumerate_subtrees(n, theta.max_index())?;
    let weight = |tau: &RootedSubtree| -> Q {
        tau.vertices()
            .iter()
            .filter_map(Word::last)
            .map(|i| theta.get(i))
            .product()
    };
    let partition_value: Q = subtrees.iter().map(weight).sum();
    let tables = compute_tables(&theta.offspring_weights(), 1, n)?;
    let b_n = tables.b_value(n)?.clone();

    let mut failures = Vec::new();
    let mut saturated = 0;
    for tau in &subtrees {
        let left = weight(tau) / &partition_value;
        let dt = bij_p(tau);
        let mut right = sg_mass(theta, dt.tree(), &b_n);
        for s in dt.sets().values() {
            if right.is_zero() {
                break;
            }
            right *= match subset_distribution(theta, s.len()) {
                Ok(b) => b.get(s).cloned().unwrap_or_else(Q::zero),
                Err(_) => Q::zero(),
            };
        }
        if left.is_zero() && right.is_zero() {
            saturated += 1;
        }
        if left != right {
            failures.push(format!("{tau}: direct {left}, product {right}"));
        }
    }
    Ok(FactorizationReport {
        n,
        subtrees: subtrees.len(),
        saturated,
        failures,
        partition_value,
        tree_partition_value: b_n,
    })
}
