//! Performance measurement: exact enumeration on tiny models, annealed
//! importance sampling for larger ones, and clamped-label classification.

mod ais;
mod classify;
mod exact;

pub use ais::{ais_log_partition, estimate_average_nll, marginal_base_biases, AisBase, AisConfig, NllEstimate};
pub use classify::{accuracy, classify};
pub use exact::{average_nll_with_log_z, exact_average_nll, exact_log_partition, ENUMERATION_LIMIT};
