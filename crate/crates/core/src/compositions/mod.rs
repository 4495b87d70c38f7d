//! Random compositions, their partition functions and monotone couplings.

mod admissibility;
mod composition;
mod coupling;
mod partition;
mod weights;

pub use admissibility::{check_admissibility_inequalities, check_step_inequalities, step_inequalities, InequalityFailure, InequalityReport};
pub use composition::{all_compositions, covering_successors, precedes, satisfies_arith, ArithClass, Composition, Move};
pub use coupling::{composition_kernel, monotone_step_kernel, sample_composition_chain, CompositionCoupling, StepKernel};
pub use partition::{
    comp_distribution, first_part_law, first_part_law_at, partition_function, CompositionTables, PartitionSource,
    PartitionValue, StepLaw,
};
pub use weights::WeightPair;

#[cfg(test)]
mod tests;
