use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::rational::{format_rational_list, Q};
use crate::sgtrees::WeightSequence;

/// `e_0, …, e_kmax` of a finitely supported sequence, by adding one variable at a time.
pub fn elementary_symmetric(theta: &[Q], kmax: usize) -> Vec<Q> {
    let mut e = vec![Q::zero(); kmax + 1];
    e[0] = Q::from_integer(1.into());
    for t in theta.iter().filter(|t| !t.is_zero()) {
        for k in (1..=kmax).rev() {
            let add = t * &e[k - 1];
            e[k] += add;
        }
    }
    e
}

/// Position weights `θ_1, θ_2, …` of the subtree model, finitely supported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta {
    /// `theta[i − 1] = θ_i`, trailing zeros removed.
    theta: Vec<Q>,
    /// `e_0, …, e_{N_θ}`.
    e: Vec<Q>,
}

impl Theta {
    pub fn new(mut theta: Vec<Q>) -> Result<Self> {
        if let Some(i) = theta.iter().position(|t| t.is_negative()) {
            return domain(format!("theta_{} is negative", i + 1));
        }
        while theta.last().is_some_and(|t| t.is_zero()) {
            theta.pop();
        }
        if theta.is_empty() {
            return domain("theta must have positive total mass");
        }
        let n = theta.iter().filter(|t| !t.is_zero()).count();
        let e = elementary_symmetric(&theta, n);
        Ok(Theta { theta, e })
    }

    /// `θ_i` for `i ≥ 1`.
    pub fn get(&self, i: u32) -> Q {
        if i == 0 {
            return Q::zero();
        }
        self.theta.get(i as usize - 1).cloned().unwrap_or_else(Q::zero)
    }

    pub fn values(&self) -> &[Q] {
        &self.theta
    }

    /// Largest index with `θ_i > 0`.
    pub fn max_index(&self) -> u32 {
        self.theta.len() as u32
    }

    pub fn support(&self) -> Vec<u32> {
        (1..=self.max_index()).filter(|&i| !self.get(i).is_zero()).collect()
    }

    /// `N_θ`.
    pub fn support_size(&self) -> usize {
        self.e.len() - 1
    }

    /// `e_0(θ), …, e_{N_θ}(θ)`.
    pub fn e(&self) -> &[Q] {
        &self.e
    }

    /// `e_k(θ)`, zero for `k > N_θ`.
    pub fn e_k(&self, k: usize) -> Q {
        self.e.get(k).cloned().unwrap_or_else(Q::zero)
    }

    /// `θ^{(i)}`: `θ` with the `i`-th entry set to zero; `None` when nothing is left.
    pub fn without(&self, i: u32) -> Option<Theta> {
        let mut theta = self.theta.clone();
        if let Some(t) = theta.get_mut((i as usize).wrapping_sub(1)) {
            *t = Q::zero();
        }
        Theta::new(theta).ok()
    }

    /// `e(θ)` as offspring weights.
    pub fn offspring_weights(&self) -> WeightSequence {
        WeightSequence::new(self.e.clone()).expect("e_0 = 1")
    }

    /// `B_k^θ(ℰ_i)`: the probability that a `k`-subset contains `i`.
    pub fn inclusion_probability(&self, i: u32, k: usize) -> Result<Q> {
        if k > self.support_size() {
            return Err(self.no_subsets(k));
        }
        let t = self.get(i);
        if t.is_zero() || k == 0 {
            return Ok(Q::zero());
        }
        let rest = match self.without(i) {
            Some(rest) => rest.e_k(k - 1),
            None => Q::from_integer(1.into()),
        };
        Ok(t * rest / self.e_k(k))
    }

    fn no_subsets(&self, k: usize) -> Error {
        Error::ZeroMass(format!(
            "theta = [{}] has only {} support points, no subset of size {k}",
            format_rational_list(&self.theta),
            self.support_size()
        ))
    }
}

fn k_subsets(items: &[u32], k: usize, out: &mut Vec<BTreeSet<u32>>, current: &mut Vec<u32>) {
    if current.len() == k {
        out.push(current.iter().copied().collect());
        return;
    }
    let need = k - current.len();
    for j in 0..items.len() {
        if items.len() - j < need {
            break;
        }
        current.push(items[j]);
        k_subsets(&items[j + 1..], k, out, current);
        current.pop();
    }
}

/// `B_k^θ(S) = ∏_{i∈S} θ_i / e_k(θ)` over the `k`-subsets of the support.
pub fn subset_distribution(theta: &Theta, k: usize) -> Result<BTreeMap<BTreeSet<u32>, Q>> {
    if k > theta.support_size() {
        return Err(theta.no_subsets(k));
    }
    let mut subsets = Vec::new();
    k_subsets(&theta.support(), k, &mut subsets, &mut Vec::new());
    let ek = theta.e_k(k);
    Ok(subsets
        .into_iter()
        .map(|s| {
            let w: Q = s.iter().map(|&i| theta.get(i)).product();
            (s, w / &ek)
        })
        .collect())
}
