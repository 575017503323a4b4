//! Pair-counting comparison of two clusterings of the same items.
//!
//! The observed indices (RI, MRI, the unnormalized and normalized ARI, and
//! MARI) are all computed from a handful of exact integer sums over the
//! sparse contingency table, which is built in `O(n)` time by sorting the
//! label pairs. The [`model`] module holds the multinomial-model moments of
//! these indices and the bias of the hypergeometric adjustment, and
//! [`simulate`] runs reproducible Monte-Carlo checks of them.

pub mod bench;
pub mod cli;
pub mod contingency;
pub mod error;
pub mod indices;
pub mod labels;
pub mod model;
pub mod oracle;
pub mod simulate;

pub use contingency::{summarize_dense, summarize_sparse, ContingencySummary};
pub use error::{Error, Result};
pub use indices::{compare, IndexReport, PairSums};
pub use labels::LabelVector;
pub use model::{JointDistribution, Scenario, ScenarioSpec};
