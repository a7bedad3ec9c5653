use crate::env::{Environment, ModeVector, StepOutcome};
use crate::policy::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticKind {
    AllOn,
    AllOff,
}

/// Plays the same mode vector every slot.
#[derive(Debug, Clone)]
pub struct StaticPolicy {
    kind: StaticKind,
    modes: ModeVector,
}

impl StaticPolicy {
    pub fn new(kind: StaticKind, n_sbs: usize) -> Self {
        let modes = match kind {
            StaticKind::AllOn => ModeVector::all_on(n_sbs),
            StaticKind::AllOff => ModeVector::all_off(n_sbs),
        };
        Self { kind, modes }
    }
}

impl Policy for StaticPolicy {
    fn name(&self) -> &str {
        match self.kind {
            StaticKind::AllOn => "all_on",
            StaticKind::AllOff => "all_off",
        }
    }

    fn decide(&mut self, _env: &mut Environment) -> ModeVector {
        self.modes.clone()
    }

    fn observe(&mut self, _action: &ModeVector, _outcome: &StepOutcome) {}
}
