//! The simulated heterogeneous network.
//!
//! [`Environment`] owns a topology, a traffic model and its own random stream.
//! Each call to [`Environment::step`] reveals one slot of arrivals and charges
//! the cost of the chosen small-cell modes. Traffic never depends on the
//! actions taken, so two environments built from the same seed see identical
//! arrivals whatever their controllers do.

mod cost;
mod modes;
mod topology;
mod traffic;

pub use cost::{
    compute_load, compute_load_into, delay_cost, energy, offered_load_into, reference_cost,
    slot_cost, switching_cost, CostBreakdown,
};
pub use modes::ModeVector;
pub use topology::{generate_topology, Point, Topology};
pub use traffic::{
    base_pattern, default_base_pattern, ou_step, write_trace_csv, ArrivalVector, TrafficModel,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::ScenarioConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("placed only {placed} of {requested} small cells; the minimum distance is too large for the area")]
    PlacementFailed { placed: usize, requested: usize },
}

/// What one slot revealed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub slot: u64,
    pub arrivals: ArrivalVector,
    pub loads: Vec<f64>,
    pub cost: CostBreakdown,
}

#[derive(Debug, Clone)]
pub struct Environment {
    config: ScenarioConfig,
    topology: Topology,
    traffic: TrafficModel,
    rng: ChaCha8Rng,
    slot: u64,
    prev_modes: ModeVector,
    pending: Option<ArrivalVector>,
}

impl Environment {
    /// Builds topology and traffic from one seed. Every small cell starts on.
    pub fn new(config: ScenarioConfig, seed: u64) -> Result<Self, EnvError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topology = generate_topology(&config, &mut rng)?;
        let traffic = TrafficModel::new(&config, &mut rng);
        Ok(Self::from_parts(config, topology, traffic, rng))
    }

    pub fn from_parts(
        config: ScenarioConfig,
        topology: Topology,
        traffic: TrafficModel,
        rng: ChaCha8Rng,
    ) -> Self {
        let n_sbs = topology.n_sbs();
        Self {
            config,
            topology,
            traffic,
            rng,
            slot: 0,
            prev_modes: ModeVector::all_on(n_sbs),
            pending: None,
        }
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn traffic(&self) -> &TrafficModel {
        &self.traffic
    }

    /// Index of the slot the next [`Environment::step`] will play.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn prev_modes(&self) -> &ModeVector {
        &self.prev_modes
    }

    /// Arrivals of the coming slot. Only noncausal controllers may look.
    pub fn peek_arrivals(&mut self) -> &ArrivalVector {
        if self.pending.is_none() {
            let arrivals = self.traffic.sample_arrivals(self.slot, &mut self.rng);
            self.pending = Some(arrivals);
        }
        self.pending.as_ref().expect("just sampled")
    }

    /// Plays one slot with `action` and advances the clock.
    pub fn step(&mut self, action: &ModeVector) -> StepOutcome {
        assert_eq!(action.len(), self.topology.n_sbs(), "action length");
        self.peek_arrivals();
        let arrivals = self.pending.take().expect("sampled by peek");
        let loads = compute_load(&arrivals, action, &self.topology, &self.config);
        let cost = CostBreakdown::new(
            energy(&loads, action, &self.config),
            delay_cost(&loads, &self.config),
            switching_cost(&self.prev_modes, action, &self.config),
        );
        let outcome = StepOutcome {
            slot: self.slot,
            arrivals,
            loads,
            cost,
        };
        self.prev_modes = action.clone();
        self.slot += 1;
        outcome
    }

    /// Re-scales and re-shifts every small cell's traffic using the
    /// environment's own stream.
    pub fn pattern_shift(&mut self) {
        self.traffic.pattern_shift(&mut self.rng);
    }
}
