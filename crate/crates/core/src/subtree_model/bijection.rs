use std::collections::{BTreeMap, BTreeSet};

use crate::error::{domain, Result};
use crate::treespace::{PlaneTree, RootedSubtree, VertexSet, Word};

use super::shuffle::{apply_shuffle, children_position_sets, pack, push_forward, Shuffle};

/// A plane tree whose vertices carry finite subsets of `{1, 2, …}`, with
/// `#S_u = k_u(T)` everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedTree {
    tree: PlaneTree,
    sets: BTreeMap<Word, BTreeSet<u32>>,
}

impl DecoratedTree {
    pub fn new(tree: PlaneTree, sets: BTreeMap<Word, BTreeSet<u32>>) -> Result<Self> {
        if sets.len() != tree.len() || sets.keys().any(|u| !tree.contains(u)) {
            return domain("decorations are not indexed by the vertices of the tree");
        }
        let degrees = tree.out_degrees();
        for (u, s) in &sets {
            if s.len() != degrees[u] {
                return domain(format!(
                    "decoration at {u} has {} elements but the vertex has {} children",
                    s.len(),
                    degrees[u]
                ));
            }
            if s.contains(&0) {
                return domain(format!("decoration at {u} contains 0"));
            }
        }
        Ok(DecoratedTree { tree, sets })
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    pub fn sets(&self) -> &BTreeMap<Word, BTreeSet<u32>> {
        &self.sets
    }

    /// `p_S = (p_{S_u})_u`.
    pub fn packing(&self) -> Shuffle {
        Shuffle::new(self.sets.iter().map(|(u, s)| (u.clone(), pack(s))).collect())
    }
}

/// `p_τ = p_{C(τ)}`, an element of `𝔾(τ)`.
pub fn packing_shuffle<T: VertexSet + ?Sized>(t: &T) -> Shuffle {
    Shuffle::new(
        children_position_sets(t)
            .iter()
            .map(|(u, c)| (u.clone(), pack(c)))
            .collect(),
    )
}

/// `push(τ) = p_τ · τ`: children moved as far left as possible.
pub fn push(t: &RootedSubtree) -> PlaneTree {
    let image = apply_shuffle(t, &packing_shuffle(t)).expect("p_τ acts on τ");
    image.to_plane_tree().expect("packed positions are left-closed")
}

/// `𝔓(τ) = (p_τ · τ, (p_τ)_* C(τ))`.
pub fn bij_p(t: &RootedSubtree) -> DecoratedTree {
    let p = packing_shuffle(t);
    let tree = push(t);
    let sets = push_forward(&p, t, &children_position_sets(t)).expect("C(τ) is indexed by τ");
    DecoratedTree::new(tree, sets).expect("the image of 𝔓 is grading-compatible")
}

/// `𝔓⁻¹(T, S) = p̄_S · T`.
pub fn bij_p_inv(dt: &DecoratedTree) -> Result<RootedSubtree> {
    apply_shuffle(dt.tree(), &dt.packing().overline())
}
