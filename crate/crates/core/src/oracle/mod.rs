//! Brute-force enumerators, exact reference laws and the statistical harness
//! every other module is checked against.

mod enumerate;
mod gof;
mod interchange;
mod laws;

pub use enumerate::{enumerate_plane_trees, enumerate_subtrees, PLANE_TREE_CAP, SUBTREE_CAP};
pub use gof::{count, goodness_of_fit, GofReport};
pub use interchange::{kernel_interchange_check, Discrepancy, InterchangeReport};
pub use laws::{
    exact_comp_law, exact_law, exact_sg_law, exact_st_law, exact_subset_law, janson_expectations, ExactLaw, ModelSpec,
    Outcome,
};

#[cfg(test)]
mod tests;
