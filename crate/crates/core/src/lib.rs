//! Restricted Boltzmann Machines with jointly learned inter-layer connectivity.
//!
//! The model keeps the classic RBM parameters (weights `W`, hidden biases `b`,
//! visible biases `d`) next to a binary adjacency `A` and a continuous
//! connection-strength matrix `A'`. Every probability, energy and gradient is
//! computed through the effective weights `C = W ⊙ A`, and the per-connection
//! gradient drives `A'` so that the connectivity pattern is learned jointly
//! with the weights. Static patterns (dense, random, line) and prune-and-regrow
//! rewiring are available as baselines, with exact-enumeration and annealed
//! importance sampling estimators for evaluation, dataset loaders, and a seeded
//! experiment harness on top.

pub mod checkpoint;
pub mod connectivity;
pub mod data;
pub mod error;
pub mod eval;
pub mod harness;
pub mod math;
pub mod rbm;
pub mod seeds;

#[cfg(test)]
pub(crate) mod testutil;

pub use connectivity::{ConnectivityState, PatternSpec};
pub use data::Dataset;
pub use error::{Error, Result};
pub use rbm::{CdGradients, GibbsChain, Rbm, RbmParams};
