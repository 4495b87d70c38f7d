use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand_chacha::rand_core::RngCore;

use crate::error::{domain, Result};
use crate::sampling::uniform_index;
use crate::treespace::{RootedSubtree, VertexSet, Word};

/// An injective map between finite sets of positive integers.
///
/// Permutations of `{1, …, k}` are the injections with that set as domain
/// and image.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Injection(BTreeMap<u32, u32>);

impl Injection {
    pub fn new(map: BTreeMap<u32, u32>) -> Result<Self> {
        if map.iter().any(|(&a, &b)| a == 0 || b == 0) {
            return domain("positions start at 1");
        }
        let image: BTreeSet<u32> = map.values().copied().collect();
        if image.len() != map.len() {
            return domain(format!("{} is not injective", Injection(map)));
        }
        Ok(Injection(map))
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn identity(domain: impl IntoIterator<Item = u32>) -> Self {
        Injection(domain.into_iter().map(|i| (i, i)).collect())
    }

    /// The permutation `ℓ ↦ images[ℓ − 1]` of `{1, …, k}`.
    pub fn permutation(images: &[u32]) -> Result<Self> {
        let k = images.len() as u32;
        if images.iter().any(|&i| i == 0 || i > k) {
            return domain(format!("{images:?} is not a permutation of 1..{k}"));
        }
        Self::new((1..=k).zip(images.iter().copied()).collect())
    }

    /// `ℓ ↦ k + 1 − ℓ`.
    pub fn reversal(k: u32) -> Self {
        Injection((1..=k).map(|l| (l, k + 1 - l)).collect())
    }

    pub fn get(&self, i: u32) -> Option<u32> {
        self.0.get(&i).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<u32> {
        self.0.keys().copied().collect()
    }

    pub fn image(&self) -> BTreeSet<u32> {
        self.0.values().copied().collect()
    }

    pub fn pairs(&self) -> &BTreeMap<u32, u32> {
        &self.0
    }

    pub fn inverse(&self) -> Injection {
        Injection(self.0.iter().map(|(&a, &b)| (b, a)).collect())
    }

    /// `self ∘ inner`, defined where `inner` lands in the domain of `self`.
    pub fn compose(&self, inner: &Injection) -> Result<Injection> {
        let mut map = BTreeMap::new();
        for (&a, &b) in &inner.0 {
            match self.get(b) {
                Some(c) => {
                    map.insert(a, c);
                }
                None => return domain(format!("{b} is outside the domain of {self}")),
            }
        }
        Ok(Injection(map))
    }

    /// True iff this is a permutation of `{1, …, k}`.
    pub fn is_permutation_of(&self, k: usize) -> bool {
        let full: BTreeSet<u32> = (1..=k as u32).collect();
        self.len() == k && self.domain() == full && self.image() == full
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (j, (a, b)) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

/// `p_S`: the increasing bijection from `S` onto `{1, …, |S|}`.
pub fn pack(s: &BTreeSet<u32>) -> Injection {
    Injection(s.iter().zip(1..).map(|(&a, b)| (a, b)).collect())
}

/// `C(τ)`: the set of children positions at every vertex.
pub fn children_position_sets<T: VertexSet + ?Sized>(t: &T) -> BTreeMap<Word, BTreeSet<u32>> {
    let mut sets: BTreeMap<Word, BTreeSet<u32>> = t.vertices().iter().map(|u| (u.clone(), BTreeSet::new())).collect();
    for u in t.vertices() {
        if let (Some(p), Some(i)) = (u.parent(), u.last()) {
            sets.get_mut(&p).expect("parent-closed").insert(i);
        }
    }
    sets
}

/// A collection of injections indexed by words.
///
/// Acting on a tree `τ` requires one entry per vertex with domain `C_u(τ)`;
/// as a plain decoration (for instance `ḡ`) the entries are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Shuffle(BTreeMap<Word, Injection>);

impl Shuffle {
    pub fn new(maps: BTreeMap<Word, Injection>) -> Self {
        Shuffle(maps)
    }

    /// The identity on the children positions of every vertex.
    pub fn identity<T: VertexSet + ?Sized>(t: &T) -> Self {
        Shuffle(
            children_position_sets(t)
                .into_iter()
                .map(|(u, c)| (u, Injection::identity(c)))
                .collect(),
        )
    }

    pub fn get(&self, u: &Word) -> Option<&Injection> {
        self.0.get(u)
    }

    pub fn maps(&self) -> &BTreeMap<Word, Injection> {
        &self.0
    }

    pub fn into_maps(self) -> BTreeMap<Word, Injection> {
        self.0
    }

    /// Checks `g ∈ 𝔾(τ)`.
    pub fn check_on<T: VertexSet + ?Sized>(&self, t: &T) -> Result<()> {
        let sets = children_position_sets(t);
        for (u, c) in &sets {
            match self.0.get(u) {
                None => return domain(format!("no injection at vertex {u}")),
                Some(g) if g.domain() != *c => {
                    return domain(format!("the injection {g} at {u} is not defined on the children positions"))
                }
                Some(_) => {}
            }
        }
        if let Some(u) = self.0.keys().find(|u| !sets.contains_key(*u)) {
            return domain(format!("injection given at {u}, which is not a vertex"));
        }
        Ok(())
    }

    /// `g · u = (g_{u_0}(u_1), g_{u_1}(u_2), …)`.
    pub fn act(&self, u: &Word) -> Result<Word> {
        let mut out = Word::root();
        let mut prefix = Word::root();
        for &l in u.letters() {
            let Some(g) = self.0.get(&prefix) else {
                return domain(format!("no injection at vertex {prefix}"));
            };
            let Some(image) = g.get(l) else {
                return domain(format!("position {l} is outside the domain of the injection at {prefix}"));
            };
            out = out.child(image);
            prefix = prefix.child(l);
        }
        Ok(out)
    }

    /// `ḡ = (g_u^{-1})_u`, indexed like `g`.
    pub fn overline(&self) -> Shuffle {
        Shuffle(self.0.iter().map(|(u, g)| (u.clone(), g.inverse())).collect())
    }
}

/// `g · τ`.
pub fn apply_shuffle<T: VertexSet + ?Sized>(t: &T, g: &Shuffle) -> Result<RootedSubtree> {
    g.check_on(t)?;
    let image = t.vertices().iter().map(|u| g.act(u)).collect::<Result<BTreeSet<_>>>()?;
    RootedSubtree::new(image)
}

/// `g⁻¹ ∈ 𝔾(g·τ)`: the injection at `g·u` is `g_u^{-1}`.
pub fn inverse_shuffle<T: VertexSet + ?Sized>(g: &Shuffle, t: &T) -> Result<Shuffle> {
    g.check_on(t)?;
    let mut maps = BTreeMap::new();
    for u in t.vertices() {
        maps.insert(g.act(u)?, g.0[u].inverse());
    }
    Ok(Shuffle(maps))
}

/// `g_* x = (x_{g⁻¹·u'})_{u' ∈ g·τ}`.
pub fn push_forward<T: VertexSet + ?Sized, X: Clone>(
    g: &Shuffle,
    t: &T,
    x: &BTreeMap<Word, X>,
) -> Result<BTreeMap<Word, X>> {
    g.check_on(t)?;
    if x.len() != t.len() || x.keys().any(|u| !t.contains(u)) {
        return domain("the tuple is not indexed by the vertices of the tree");
    }
    t.vertices().iter().map(|u| Ok((g.act(u)?, x[u].clone()))).collect()
}

/// `g_*` applied to a collection of injections, giving a collection over `g·τ`.
pub fn push_forward_shuffle<T: VertexSet + ?Sized>(g: &Shuffle, t: &T, h: &Shuffle) -> Result<Shuffle> {
    push_forward(g, t, h.maps()).map(Shuffle)
}

/// A uniform element of `𝔾(τ)` with every image in `1..=max_position`.
pub fn random_shuffle<T: VertexSet + ?Sized, R: RngCore>(t: &T, max_position: u32, rng: &mut R) -> Result<Shuffle> {
    let mut maps = BTreeMap::new();
    for (u, c) in children_position_sets(t) {
        if c.len() > max_position as usize {
            return domain(format!("{u} has {} children but positions stop at {max_position}", c.len()));
        }
        let mut pool: Vec<u32> = (1..=max_position).collect();
        let map = c.into_iter().map(|i| (i, pool.swap_remove(uniform_index(pool.len(), rng)))).collect();
        maps.insert(u, Injection(map));
    }
    Ok(Shuffle(maps))
}
