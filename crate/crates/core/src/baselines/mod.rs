//! Reference policies: static all-on/all-off, tabular Q-learning, a tabular
//! actor-critic, and the noncausal exhaustive-search bound.
//!
//! The tabular learners see only the quantized arrivals of the previous
//! slot, not the current modes. Their tables are sparse: an entry exists
//! only once the pair has been updated, and every missing entry reads as 0.

mod fixed;
mod sota;
mod tabular;

pub use fixed::{StaticKind, StaticPolicy};
pub use sota::{sota_action, Sota, TooLarge, SOTA_MAX_CELLS};
pub use tabular::{
    boltzmann_select, ql_update, quantize, state_key, Quantizer, SparseTable, TabularAC,
    TabularConfig, TabularQ,
};
