//! Increasing Markov growth of simply generated trees and of random subtrees
//! of the Ulam–Harris tree, with every table and transition kernel computed
//! in exact rational arithmetic.
//!
//! - [`treespace`]: words, plane trees, rooted subtrees.
//! - [`compositions`]: weighted random compositions and their monotone couplings.
//! - [`sgtrees`]: simply generated tree tables, inequality checks and growth chains.
//! - [`subtree_model`]: the inhomogeneous subtree model and its coupling.
//! - [`oracle`]: brute-force enumerators, exact laws and statistical checks.

pub mod compositions;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod sampling;
pub mod sgtrees;
pub mod subtree_model;
pub mod treespace;

pub use error::{Error, Result};
pub use rational::Q;
