use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::compositions::{ArithClass, Composition};
use crate::error::{domain, Error, Result};
use crate::rational::{format_rational, Q};
use crate::treespace::{PlaneTree, RootedSubtree, VertexSet, Word};

use super::enumerate::{enumerate_plane_trees, enumerate_subtrees};

/// A finitely supported law with exact masses summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactLaw<T: Ord> {
    masses: BTreeMap<T, Q>,
}

impl<T: Ord + Clone> ExactLaw<T> {
    /// Normalizes nonnegative weights, dropping zeros.
    pub fn from_weights(weights: impl IntoIterator<Item = (T, Q)>, model: &str) -> Result<Self> {
        let mut masses: BTreeMap<T, Q> = BTreeMap::new();
        for (x, w) in weights {
            if !w.is_zero() {
                *masses.entry(x).or_insert_with(Q::zero) += w;
            }
        }
        let total: Q = masses.values().sum();
        if total.is_zero() {
            return Err(Error::ZeroMass(format!("{model} has no mass")));
        }
        for m in masses.values_mut() {
            *m /= &total;
        }
        Ok(ExactLaw { masses })
    }

    /// Takes a law that must already sum to one.
    pub fn new(masses: BTreeMap<T, Q>) -> Result<Self> {
        let masses: BTreeMap<T, Q> = masses.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        if masses.values().sum::<Q>() != Q::one() {
            return domain("masses do not sum to 1");
        }
        Ok(ExactLaw { masses })
    }

    pub fn masses(&self) -> &BTreeMap<T, Q> {
        &self.masses
    }

    pub fn into_masses(self) -> BTreeMap<T, Q> {
        self.masses
    }

    pub fn get(&self, x: &T) -> Q {
        self.masses.get(x).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> ExactLaw<U> {
        let mut masses: BTreeMap<U, Q> = BTreeMap::new();
        for (x, q) in &self.masses {
            *masses.entry(f(x)).or_insert_with(Q::zero) += q;
        }
        ExactLaw { masses }
    }
}

/// The models with a brute-force law.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    /// Simply generated trees with weights `w` and `n` vertices.
    Sg { w: Vec<Q>, d: u32, n: usize },
    /// Subtrees with position weights `θ_1, θ_2, …` and `n` vertices.
    St { theta: Vec<Q>, n: usize },
    /// Compositions of `n` with part-count weights `a` and part weights `b_1, b_2, …`.
    Comp { a: Vec<Q>, b: Vec<Q>, cls: ArithClass, n: usize },
    /// `k`-subsets of the support of `θ`.
    B { theta: Vec<Q>, k: usize },
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[Q]| xs.iter().map(format_rational).collect::<Vec<_>>().join(",");
        match self {
            ModelSpec::Sg { w, d, n } => write!(f, "SG(w=[{}], d={d}, n={n})", list(w)),
            ModelSpec::St { theta, n } => write!(f, "ST(theta=[{}], n={n})", list(theta)),
            ModelSpec::Comp { a, b, cls, n } => {
                write!(f, "Comp(a=[{}], b=[{}], class={cls}, n={n})", list(a), list(b))
            }
            ModelSpec::B { theta, k } => write!(f, "B(theta=[{}], k={k})", list(theta)),
        }
    }
}

/// An outcome of one of the models.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Tree(PlaneTree),
    Subtree(RootedSubtree),
    Composition(Composition),
    Subset(BTreeSet<u32>),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Tree(t) => write!(f, "{t}"),
            Outcome::Subtree(t) => write!(f, "{t}"),
            Outcome::Composition(c) => write!(f, "{c}"),
            Outcome::Subset(s) => {
                let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

fn at(xs: &[Q], i: usize) -> Q {
    xs.get(i).cloned().unwrap_or_else(Q::zero)
}

/// `ω(T)/Σω` over enumerated trees.
pub fn exact_sg_law(w: &[Q], d: u32, n: usize) -> Result<ExactLaw<PlaneTree>> {
    let trees = enumerate_plane_trees(n, d)?;
    let name = ModelSpec::Sg { w: w.to_vec(), d, n }.to_string();
    ExactLaw::from_weights(
        trees.into_iter().map(|t| {
            let omega = t.out_degrees().values().map(|&k| at(w, k)).product();
            (t, omega)
        }),
        &name,
    )
}

/// `∏_i θ_i^{N_i(τ)}` normalized over enumerated subtrees, `θ` indexed from 1.
pub fn exact_st_law(theta: &[Q], n: usize) -> Result<ExactLaw<RootedSubtree>> {
    let dmax = theta.len() as u32;
    let name = ModelSpec::St { theta: theta.to_vec(), n }.to_string();
    if dmax == 0 {
        return Err(Error::ZeroMass(format!("{name} has no mass")));
    }
    let subtrees = enumerate_subtrees(n, dmax)?;
    ExactLaw::from_weights(
        subtrees.into_iter().map(|t| {
            let weight = t
                .vertices()
                .iter()
                .filter_map(Word::last)
                .map(|i| at(theta, i as usize - 1))
                .product();
            (t, weight)
        }),
        &name,
    )
}

/// Every composition of `n`, from the `2^{n−1}` cut sets.
fn brute_compositions(n: usize) -> Vec<Composition> {
    if n == 0 {
        return vec![Composition::empty()];
    }
    (0u64..1 << (n - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1u32;
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            Composition::of(&parts)
        })
        .collect()
}

/// `a_i ∏ b_{n_j}` normalized over compositions of `n` whose parts are `1 mod d`
/// and whose part count is `s mod d`.
pub fn exact_comp_law(a: &[Q], b: &[Q], cls: ArithClass, n: usize) -> Result<ExactLaw<Composition>> {
    if n > 24 {
        return domain("composition enumeration is capped at n = 24");
    }
    let name = ModelSpec::Comp {
        a: a.to_vec(),
        b: b.to_vec(),
        cls,
        n,
    }
    .to_string();
    let d = cls.d;
    ExactLaw::from_weights(
        brute_compositions(n).into_iter().filter_map(|c| {
            if c.parts().iter().any(|&m| (m - 1) % d != 0) || c.len() % d as usize != cls.s as usize {
                return None;
            }
            let mut weight = at(a, c.len());
            for &m in c.parts() {
                weight *= at(b, m as usize - 1);
            }
            Some((c, weight))
        }),
        &name,
    )
}

/// `∏_{i∈S} θ_i` normalized over `k`-subsets of `{i : θ_i > 0}`.
pub fn exact_subset_law(theta: &[Q], k: usize) -> Result<ExactLaw<BTreeSet<u32>>> {
    let support: Vec<u32> = (1..=theta.len() as u32).filter(|&i| !theta[i as usize - 1].is_zero()).collect();
    let name = ModelSpec::B { theta: theta.to_vec(), k }.to_string();
    if support.len() > 20 {
        return domain("subset enumeration is capped at 20 support points");
    }
    let mut weights = Vec::new();
    for mask in 0u32..1 << support.len() {
        if mask.count_ones() as usize != k {
            continue;
        }
        let s: BTreeSet<u32> = (0..support.len()).filter(|&j| mask >> j & 1 == 1).map(|j| support[j]).collect();
        let w = s.iter().map(|&i| theta[i as usize - 1].clone()).product();
        weights.push((s, w));
    }
    ExactLaw::from_weights(weights, &name)
}

/// The brute-force law of any model.
pub fn exact_law(model: &ModelSpec) -> Result<ExactLaw<Outcome>> {
    Ok(match model {
        ModelSpec::Sg { w, d, n } => exact_sg_law(w, *d, *n)?.map(|t| Outcome::Tree(t.clone())),
        ModelSpec::St { theta, n } => exact_st_law(theta, *n)?.map(|t| Outcome::Subtree(t.clone())),
        ModelSpec::Comp { a, b, cls, n } => exact_comp_law(a, b, *cls, *n)?.map(|c| Outcome::Composition(c.clone())),
        ModelSpec::B { theta, k } => exact_subset_law(theta, *k)?.map(|s| Outcome::Subset(s.clone())),
    })
}

/// Mean root degree under `BGW_3` and `BGW_4` for `μ = ((1−ε)/2, ε, (1−ε)/2)`.
pub fn janson_expectations(eps: &Q) -> Result<(Q, Q)> {
    if *eps <= Q::zero() || *eps >= Q::one() {
        return domain("need 0 < eps < 1");
    }
    let side = (Q::one() - eps) / Q::from_integer(2.into());
    let mu = vec![side.clone(), eps.clone(), side];
    let mean = |n: usize| -> Result<Q> {
        let law = exact_sg_law(&mu, 1, n)?;
        Ok(law
            .masses()
            .iter()
            .map(|(t, p)| p * Q::from_integer((t.children_positions(&Word::root()).len() as i64).into()))
            .sum())
    };
    Ok((mean(3)?, mean(4)?))
}
