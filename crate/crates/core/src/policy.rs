//! The interface every controller implements, learning or not.

use crate::env::{Environment, ModeVector, StepOutcome};

/// Counters a policy may expose to the harness.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyStats {
    /// Distinct `(state, action)` pairs with a table entry.
    pub visited_pairs: Option<u64>,
    /// Size of the full `(state, action)` space.
    pub total_pairs: Option<f64>,
    pub visited_states: Option<u64>,
}

pub trait Policy {
    fn name(&self) -> &str;

    /// Modes for the slot `env` is about to play. Only noncausal baselines
    /// peek at the coming arrivals.
    fn decide(&mut self, env: &mut Environment) -> ModeVector;

    /// What the slot revealed after `action` was executed.
    fn observe(&mut self, action: &ModeVector, outcome: &StepOutcome);

    fn stats(&self) -> PolicyStats {
        PolicyStats::default()
    }
}

/// Decide, execute, observe.
pub fn play_slot<P: Policy + ?Sized>(policy: &mut P, env: &mut Environment) -> (ModeVector, StepOutcome) {
    let action = policy.decide(env);
    let outcome = env.step(&action);
    policy.observe(&action, &outcome);
    (action, outcome)
}
