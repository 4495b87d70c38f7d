//! The inhomogeneous subtree model: shuffles of rooted subtrees, the
//! left-packing bijection with decorated plane trees, elementary symmetric
//! weights, the nested subset coupling, and the increasing subtree growth.

mod bijection;
mod chain;
mod checks;
mod distribution;
mod invariance;
mod shuffle;
mod subsets;
mod theta;

pub use bijection::{bij_p, bij_p_inv, packing_shuffle, push, DecoratedTree};
pub use chain::{
    coupling_law, embedded_image, CompiledSubtreeGrowth, naive_image, shuffled_image, subtree_grow_chain, SubtreeChain, SubtreeGrowth,
    SubtreeStep,
};
pub use checks::{check_bijection, check_groupoid};
pub use distribution::{check_factorization, st_distribution, FactorizationReport};
pub use invariance::{
    check_equivariance, check_unshuffling, decorated_trees, first_child_reversal, identity_rule, permutation_fields,
    shuffle_invariance_check, sigma_field, sigma_shuffling_rule, CheckReport, Decorated, InvarianceReport,
    ShufflingRule,
};
pub use shuffle::{
    apply_shuffle, children_position_sets, inverse_shuffle, pack, push_forward, push_forward_shuffle, random_shuffle,
    Injection, Shuffle,
};
pub use subsets::{
    check_nested_coupling, nested_subset_coupling, prefix_map, sigma_rule, NestedCouplingReport,
    NestedSubsetCoupling, Xseq,
};
pub use theta::{elementary_symmetric, subset_distribution, Theta};
