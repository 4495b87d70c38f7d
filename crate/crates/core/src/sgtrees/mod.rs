//! Simply generated trees: weight sequences, exact partition tables, the
//! inequalities behind admissibility, and increasing growth chains.

mod distribution;
mod kernel;
mod tables;
mod weights;

pub use distribution::{sg_distribution, sg_law, sg_probability};
pub use kernel::{grow_chain, growth_kernel, growth_kernel_row, CompiledGrowth, GrowthChain, GrowthKernel, GrowthStep};
pub use tables::{check_ratio_chain, check_tp2_array, compute_tables, PartitionTables, Route};
pub use weights::{check_toeplitz_tp2, is_log_concave, tilt, LogConcavity, WeightSequence};
