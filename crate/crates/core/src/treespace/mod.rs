//! Ulam–Harris words, plane trees and rooted subtrees.

mod tree;
mod word;

pub use tree::{
    complete_d_ary, compose_root, decompose_root, format_words, is_bouquet_addition, is_leaf_addition,
    is_right_leaning_leaf_addition, parse_plane_tree, parse_subtree, to_dot, PlaneTree, RootedSubtree,
    VertexSet,
};
pub use word::Word;

#[cfg(test)]
mod tests;
