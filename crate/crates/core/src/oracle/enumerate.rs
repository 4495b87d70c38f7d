use std::collections::BTreeSet;

use crate::error::{domain, Error, Result};
use crate::treespace::{PlaneTree, RootedSubtree, VertexSet, Word};

/// Largest plane-tree size enumerated (58786 trees at 12 vertices).
pub const PLANE_TREE_CAP: usize = 12;
/// Largest subtree size enumerated.
pub const SUBTREE_CAP: usize = 8;

fn catalan(n: usize) -> u128 {
    (0..n).fold(1u128, |c, k| c * 2 * (2 * k as u128 + 1) / (k as u128 + 2))
}

fn refuse(requested: usize, cap: usize, estimate: String) -> Error {
    Error::Domain(format!(
        "enumeration of size {requested} exceeds the cap {cap} (about {estimate} objects)"
    ))
}

/// Every plane tree with `n` vertices whose out-degrees are multiples of `d`,
/// in canonical order.
///
/// Trees are grown one leaf at a time in every possible position and
/// deduplicated; the arithmetic ones are then filtered by out-degree.
pub fn enumerate_plane_trees(n: usize, d: u32) -> Result<Vec<PlaneTree>> {
    if n == 0 || d == 0 {
        return domain("need n ≥ 1 and d ≥ 1");
    }
    if n > PLANE_TREE_CAP {
        return Err(refuse(n, PLANE_TREE_CAP, catalan(n - 1).to_string()));
    }
    let mut level: BTreeSet<BTreeSet<Word>> = BTreeSet::from([BTreeSet::from([Word::root()])]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for t in &level {
            for v in t {
                let k = t.iter().filter(|u| u.parent().as_ref() == Some(v)).count() as u32;
                let mut t2 = t.clone();
                t2.insert(v.child(k + 1));
                next.insert(t2);
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(PlaneTree::new)
        .filter(|t| match t {
            Ok(t) => t.out_degrees().values().all(|&k| k % d as usize == 0),
            Err(_) => true,
        })
        .collect()
}

/// Every rooted subtree of `𝕌^{(dmax)}` with `n` vertices, in canonical order.
pub fn enumerate_subtrees(n: usize, dmax: u32) -> Result<Vec<RootedSubtree>> {
    if n == 0 || dmax == 0 {
        return domain("need n ≥ 1 and dmax ≥ 1");
    }
    if n > SUBTREE_CAP {
        return Err(refuse(n, SUBTREE_CAP, format!("{dmax}^{} / n", 2 * n)));
    }
    let mut level: BTreeSet<BTreeSet<Word>> = BTreeSet::from([BTreeSet::from([Word::root()])]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for t in &level {
            for v in t {
                for i in 1..=dmax {
                    let c = v.child(i);
                    if !t.contains(&c) {
                        let mut t2 = t.clone();
                        t2.insert(c);
                        next.insert(t2);
                    }
                }
            }
        }
        level = next;
    }
    level.into_iter().map(RootedSubtree::new).collect()
}
