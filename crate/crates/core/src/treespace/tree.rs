use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::compositions::Composition;
use crate::error::{domain, Error, Result};

use super::word::Word;

/// Shared read access to a finite set of Ulam–Harris words.
pub trait VertexSet {
    fn vertices(&self) -> &BTreeSet<Word>;

    fn len(&self) -> usize {
        self.vertices().len()
    }

    fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    fn contains(&self, u: &Word) -> bool {
        self.vertices().contains(u)
    }

    /// Sorted positions `i` with `ui` in the set.
    fn children_positions(&self, u: &Word) -> Vec<u32> {
        let depth = u.height() + 1;
        self.vertices()
            .range(u.clone()..)
            .take_while(|v| u.is_prefix_of(v))
            .filter(|v| v.height() == depth)
            .map(|v| v.last().expect("non-root"))
            .collect()
    }

    /// `k_u`: the number of children of `u`.
    fn children_count(&self, u: &Word) -> Result<usize> {
        if !self.contains(u) {
            return domain(format!("vertex {u} is not in the tree"));
        }
        Ok(self.children_positions(u).len())
    }

    /// `k_u` for every vertex in one pass.
    fn out_degrees(&self) -> BTreeMap<Word, usize> {
        let mut k: BTreeMap<Word, usize> = self.vertices().iter().map(|u| (u.clone(), 0)).collect();
        for u in self.vertices() {
            if let Some(p) = u.parent() {
                *k.get_mut(&p).expect("parent-closed") += 1;
            }
        }
        k
    }

    fn leaves(&self) -> Vec<Word> {
        self.out_degrees()
            .into_iter()
            .filter(|(_, k)| *k == 0)
            .map(|(u, _)| u)
            .collect()
    }
}

/// A finite subset of 𝕌 closed under parents and left siblings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaneTree {
    vertices: BTreeSet<Word>,
}

/// A finite subset of 𝕌 containing the root and closed under parents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedSubtree {
    vertices: BTreeSet<Word>,
}

impl VertexSet for PlaneTree {
    fn vertices(&self) -> &BTreeSet<Word> {
        &self.vertices
    }
}

impl VertexSet for RootedSubtree {
    fn vertices(&self) -> &BTreeSet<Word> {
        &self.vertices
    }
}

fn closure_violation(vertices: &BTreeSet<Word>, plane: bool) -> Option<Error> {
    if !vertices.contains(&Word::root()) {
        return Some(Error::Parse {
            token: "e".into(),
            reason: "the root is missing".into(),
        });
    }
    for u in vertices {
        let Some(parent) = u.parent() else { continue };
        if !vertices.contains(&parent) {
            return Some(Error::Parse {
                token: u.to_string(),
                reason: format!("parent {parent} is missing"),
            });
        }
        let i = u.last().expect("non-root");
        if plane && i > 1 && !vertices.contains(&parent.child(i - 1)) {
            return Some(Error::Parse {
                token: u.to_string(),
                reason: format!("left sibling {} is missing", parent.child(i - 1)),
            });
        }
    }
    None
}

impl PlaneTree {
    pub fn new(vertices: BTreeSet<Word>) -> Result<Self> {
        match closure_violation(&vertices, true) {
            Some(e) => Err(e),
            None => Ok(PlaneTree { vertices }),
        }
    }

    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Result<Self> {
        Self::new(words.into_iter().collect())
    }

    pub fn root_only() -> Self {
        PlaneTree {
            vertices: BTreeSet::from([Word::root()]),
        }
    }

    pub fn into_vertices(self) -> BTreeSet<Word> {
        self.vertices
    }

    pub fn as_subtree(&self) -> RootedSubtree {
        RootedSubtree {
            vertices: self.vertices.clone(),
        }
    }

    /// The fringe subtree `{v : uv ∈ T}` rooted at `u`.
    pub fn fringe(&self, u: &Word) -> PlaneTree {
        let vertices = self
            .vertices
            .range(u.clone()..)
            .take_while(|v| u.is_prefix_of(v))
            .map(|v| v.strip_prefix(u).expect("prefix"))
            .collect();
        PlaneTree { vertices }
    }

    /// Number of vertices in the fringe subtree of every vertex.
    pub fn subtree_sizes(&self) -> BTreeMap<Word, usize> {
        let mut sizes = BTreeMap::new();
        for u in &self.vertices {
            for a in u.ancestors() {
                *sizes.entry(a).or_insert(0) += 1;
            }
        }
        sizes
    }

    /// Adds the `d` right-leaning leaves `v(k+1), …, v(k+d)`.
    pub fn with_bouquet(&self, v: &Word, d: usize) -> Result<(PlaneTree, Vec<Word>)> {
        let k = self.children_count(v)? as u32;
        let new: Vec<Word> = (1..=d as u32).map(|j| v.child(k + j)).collect();
        let mut vertices = self.vertices.clone();
        vertices.extend(new.iter().cloned());
        Ok((PlaneTree { vertices }, new))
    }
}

impl RootedSubtree {
    pub fn new(vertices: BTreeSet<Word>) -> Result<Self> {
        match closure_violation(&vertices, false) {
            Some(e) => Err(e),
            None => Ok(RootedSubtree { vertices }),
        }
    }

    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Result<Self> {
        Self::new(words.into_iter().collect())
    }

    pub(crate) fn from_set_unchecked(vertices: BTreeSet<Word>) -> Self {
        debug_assert!(closure_violation(&vertices, false).is_none());
        RootedSubtree { vertices }
    }

    pub fn root_only() -> Self {
        RootedSubtree {
            vertices: BTreeSet::from([Word::root()]),
        }
    }

    pub fn into_vertices(self) -> BTreeSet<Word> {
        self.vertices
    }

    pub fn to_plane_tree(&self) -> Result<PlaneTree> {
        PlaneTree::new(self.vertices.clone())
    }

    /// `N_i(τ)`: the number of vertices whose last letter is `i`.
    pub fn type_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for u in &self.vertices {
            if let Some(i) = u.last() {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        counts
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_words(self))
    }
}

impl fmt::Display for RootedSubtree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_words(self))
    }
}

fn added<'a>(t: &BTreeSet<Word>, t2: &'a BTreeSet<Word>) -> Option<Vec<&'a Word>> {
    if !t.is_subset(t2) {
        return None;
    }
    Some(t2.iter().filter(|w| !t.contains(*w)).collect())
}

/// True iff `t2 = t ∪ {vi}` with `i = k_v(t) + 1`.
pub fn is_right_leaning_leaf_addition(t: &PlaneTree, t2: &PlaneTree) -> bool {
    is_bouquet_addition(t, t2, 1)
}

/// True iff `t2 \ t = {v(k+1), …, v(k+d)}` for some `v ∈ t` with `k = k_v(t)`.
pub fn is_bouquet_addition(t: &PlaneTree, t2: &PlaneTree, d: usize) -> bool {
    let Some(new) = added(&t.vertices, &t2.vertices) else {
        return false;
    };
    if d == 0 || new.len() != d {
        return false;
    }
    let Some(v) = new[0].parent() else {
        return false;
    };
    if !t.contains(&v) {
        return false;
    }
    let k = t.children_positions(&v).len() as u32;
    new.iter()
        .zip(1..)
        .all(|(w, j)| w.parent().as_ref() == Some(&v) && w.last() == Some(k + j))
}

/// True iff `t2` is `t` plus one leaf, in any position.
pub fn is_leaf_addition(t: &RootedSubtree, t2: &RootedSubtree) -> bool {
    match added(&t.vertices, &t2.vertices) {
        Some(new) if new.len() == 1 => new[0].parent().is_some_and(|p| t.contains(&p)),
        _ => false,
    }
}

/// `φ(T) = (T^[1], …, T^[i])` together with the composition of their sizes.
pub fn decompose_root(t: &PlaneTree) -> (Vec<PlaneTree>, Composition) {
    let k = t.children_positions(&Word::root()).len() as u32;
    let subtrees: Vec<PlaneTree> = (1..=k).map(|j| t.fringe(&Word::of(&[j]))).collect();
    let parts = subtrees.iter().map(|s| s.len() as u32).collect();
    (subtrees, Composition::new(parts).expect("subtree sizes are positive"))
}

/// `φ⁻¹`: `{∅} ∪ ⋃_j jT^j`.
pub fn compose_root(subtrees: &[PlaneTree]) -> PlaneTree {
    let mut vertices = BTreeSet::from([Word::root()]);
    for (j, s) in subtrees.iter().enumerate() {
        vertices.extend(s.vertices.iter().map(|u| u.prepend(j as u32 + 1)));
    }
    PlaneTree { vertices }
}

/// `comp^(d)(τ) = τ ∪ {ui : u ∈ τ, 1 ≤ i ≤ d}`.
pub fn complete_d_ary(tau: &RootedSubtree, d: u32) -> Result<PlaneTree> {
    if d == 0 {
        return domain("d must be positive");
    }
    if let Some(u) = tau.vertices.iter().find(|u| u.letters().iter().any(|&l| l > d)) {
        return domain(format!("vertex {u} has a letter larger than {d}"));
    }
    let mut vertices = tau.vertices.clone();
    for u in &tau.vertices {
        vertices.extend((1..=d).map(|i| u.child(i)));
    }
    Ok(PlaneTree { vertices })
}

fn parse_words(text: &str) -> Result<BTreeSet<Word>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse {
            token: String::new(),
            reason: "empty tree".into(),
        });
    }
    let mut set = BTreeSet::new();
    for token in text.split(',') {
        let w: Word = token.parse()?;
        if !set.insert(w) {
            return Err(Error::Parse {
                token: token.trim().to_string(),
                reason: "duplicate word".into(),
            });
        }
    }
    Ok(set)
}

pub fn parse_plane_tree(text: &str) -> Result<PlaneTree> {
    PlaneTree::new(parse_words(text)?)
}

pub fn parse_subtree(text: &str) -> Result<RootedSubtree> {
    RootedSubtree::new(parse_words(text)?)
}

/// Comma-separated words in canonical order, root written `e`.
pub fn format_words<T: VertexSet + ?Sized>(t: &T) -> String {
    t.vertices()
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Graphviz rendering with children listed in position order.
pub fn to_dot<T: VertexSet + ?Sized>(t: &T, name: &str) -> String {
    let mut out = format!("digraph \"{name}\" {{\n  node [shape=circle];\n");
    for u in t.vertices() {
        out.push_str(&format!("  \"{u}\" [label=\"{u}\"];\n"));
    }
    for u in t.vertices() {
        if let Some(p) = u.parent() {
            out.push_str(&format!("  \"{p}\" -> \"{u}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}
