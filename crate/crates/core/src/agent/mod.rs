//! The learning controller.
//!
//! Each slot the controller predicts the coming arrivals from the last few
//! slots, asks the actor for a continuous activation level per small cell,
//! perturbs and rounds it into a proto-action, and then picks the best mode
//! vector in a small Hamming ball around the proto-action, ranked either by
//! the learned immediate-cost estimator or by the critic. After the slot is
//! played every network takes a few gradient steps on replayed experience.

mod checkpoint;
mod drag;
mod networks;
mod refine;
mod replay;
mod state;
mod train;

pub use checkpoint::CHECKPOINT_HEADER;
pub use drag::{
    run_slots, ArpRecord, CenRecord, Decision, DragAgent, DragConfig, Experience, TrainingReport,
};
pub use networks::{
    actor_layers, arp_layers, cen_layers, critic_layers, hidden_sizes, AgentNetworks, FULL_HIDDEN,
};
pub use refine::{
    argmin_with_ties, candidate_inputs, neighborhood, proto_action, refine_action,
    score_candidates, Branch, Refinement,
};
pub use replay::ReplayMemory;
pub use state::{ArHistory, State};
pub use train::{
    actor_gradients, actor_gradients_with, critic_target, mse_gradients, mse_step, train_actor,
    train_arp, train_cen, train_critic, StepReport,
};

use thiserror::Error;

use crate::nn::NnError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("replay memory holds {available} records, {needed} needed")]
    InsufficientSamples { needed: usize, available: usize },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("invalid agent configuration: {0}")]
    Config(String),
    #[error("observe called without a pending decision")]
    NoDecision,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
