//! Detection of *pair smells*: pairs of files whose actual modular relation
//! (same folder or not) contradicts the relation that a portfolio of
//! modularization algorithms unanimously suggests.
//!
//! The pipeline runs in four steps:
//!
//! 1. load or scan a file-level [`DependencyGraph`](depgraph::DependencyGraph),
//! 2. cluster it with each algorithm in [`modularize`],
//! 3. fold the solutions into a [`CoAssociationMatrix`](consensus::CoAssociationMatrix)
//!    and classify every pair's apt relation,
//! 4. compare apt relations with the folder structure recovered by
//!    [`structure`] to emit [`smells`].
//!
//! [`cochange`] and [`evolution`] then measure how smelly pairs behave in
//! the version history. [`pipeline`] wires steps 1 to 4 together.

pub mod cochange;
pub mod consensus;
pub mod depgraph;
pub mod error;
pub mod evolution;
pub mod modularize;
pub mod pipeline;
pub mod smells;
mod sparse;
pub mod stats;
pub mod structure;

pub use error::{Error, Result};
pub use sparse::SparseVector;
