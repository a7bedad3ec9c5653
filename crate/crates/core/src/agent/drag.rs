use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;

use crate::config::ScenarioConfig;
use crate::env::{reference_cost, Environment, ModeVector, StepOutcome};
use crate::nn::{LinearSchedule, NnError};
use crate::policy::{play_slot, Policy};
use crate::SimRng;

use super::refine::{proto_action, refine_action, Branch, Refinement};
use super::train::{critic_target, train_actor, train_arp, train_cen, train_critic, StepReport};
use super::{AgentError, AgentNetworks, ArHistory, ReplayMemory, State};

/// Hyper-parameters of the learning controller.
#[derive(Debug, Clone, PartialEq)]
pub struct DragConfig {
    /// Slots of arrivals fed to the predictor.
    pub history: usize,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Hamming radius of the refinement ball.
    pub distance: usize,
    /// Multiplies the 200/100 hidden widths.
    pub width_scale: f64,
    /// Gradient steps per network per slot.
    pub k_train: usize,
    pub tau: f64,
    pub noise: LinearSchedule,
    pub epsilon: LinearSchedule,
    pub lr_actor: LinearSchedule,
    pub lr_critic: LinearSchedule,
    pub lr_arp: LinearSchedule,
    pub lr_cen: LinearSchedule,
    pub refinement: Refinement,
    /// Arrivals are divided by this before entering any network; it also
    /// caps what the sigmoid predictor head can output.
    pub lambda_scale: f64,
    /// The cost estimator predicts `cost / reference / cen_head_scale`.
    pub cen_head_scale: f64,
}

impl Default for DragConfig {
    fn default() -> Self {
        const HORIZON: u64 = 10_000;
        Self {
            history: 4,
            replay_capacity: 6000,
            batch_size: 64,
            distance: 1,
            width_scale: 1.0,
            k_train: 5,
            tau: 1e-4,
            noise: LinearSchedule::new(0.5, 0.05, HORIZON),
            epsilon: LinearSchedule::new(3.0, 0.1, HORIZON),
            // plain SGD needs larger early steps; the predictors keep a
            // higher floor so they can follow traffic pattern changes
            lr_actor: LinearSchedule::new(5e-2, 8e-4, HORIZON),
            lr_critic: LinearSchedule::new(2e-2, 2e-4, HORIZON),
            lr_arp: LinearSchedule::new(5e-2, 5e-3, HORIZON),
            lr_cen: LinearSchedule::new(2e-2, 2e-3, HORIZON),
            refinement: Refinement::Hybrid,
            lambda_scale: 1.25,
            cen_head_scale: 2.0,
        }
    }
}

impl DragConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::Config(m.to_string()));
        if self.history == 0 {
            return bad("history must be positive");
        }
        if self.batch_size < 2 || self.batch_size > self.replay_capacity {
            return bad("batch size must be in [2, replay capacity]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must be in (0, 1]");
        }
        if !(self.width_scale > 0.0) || !(self.lambda_scale > 0.0) || !(self.cen_head_scale > 0.0) {
            return bad("scales must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArpRecord {
    /// Flattened history, raw arrivals.
    pub history: Vec<f64>,
    pub arrivals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenRecord {
    pub arrivals: Vec<f64>,
    pub prev_modes: ModeVector,
    pub modes: ModeVector,
    /// Normalized cost.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: State,
    pub action: ModeVector,
    /// Normalized cost.
    pub cost: f64,
    pub next_state: State,
}

/// Most recent training diagnostics, one per network.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrainingReport {
    pub arp: StepReport,
    pub cen: StepReport,
    pub critic: StepReport,
    pub actor_mean_q: f64,
    pub steps: u64,
}

/// Everything about one decision, for logging and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub state: State,
    pub continuous: Vec<f64>,
    pub proto: ModeVector,
    pub action: ModeVector,
    pub branch: Branch,
}

/// The learning controller: arrival predictor, cost estimator, actor and
/// critic with targets, three replay memories and the refinement step.
#[derive(Debug, Clone)]
pub struct DragAgent {
    pub(crate) config: DragConfig,
    pub(crate) gamma: f64,
    pub(crate) n_sbs: usize,
    pub(crate) n_bs: usize,
    pub(crate) reference: f64,
    pub(crate) nets: AgentNetworks,
    pub(crate) arp_memory: ReplayMemory<ArpRecord>,
    pub(crate) cen_memory: ReplayMemory<CenRecord>,
    pub(crate) ac_memory: ReplayMemory<Experience>,
    pub(crate) history: ArHistory,
    pub(crate) prev_modes: ModeVector,
    /// Prediction for the coming slot.
    pub(crate) predicted: Vec<f64>,
    pub(crate) slot: u64,
    pub(crate) rng: SimRng,
    pub(crate) pending: Option<Decision>,
    pub(crate) report: TrainingReport,
}

impl DragAgent {
    pub fn new(scenario: &ScenarioConfig, config: DragConfig, seed: u64) -> Result<Self, AgentError> {
        config.validate()?;
        let n_sbs = scenario.n_sbs;
        let n_bs = scenario.n_bs();
        let mut rng = SimRng::seed_from_u64(seed);
        let nets = AgentNetworks::new(config.history, n_bs, n_sbs, config.width_scale, &mut rng);
        let mut agent = Self {
            gamma: scenario.gamma,
            n_sbs,
            n_bs,
            reference: reference_cost(scenario),
            nets,
            arp_memory: ReplayMemory::new(config.replay_capacity),
            cen_memory: ReplayMemory::new(config.replay_capacity),
            ac_memory: ReplayMemory::new(config.replay_capacity),
            history: ArHistory::new(config.history, n_bs),
            prev_modes: ModeVector::all_on(n_sbs),
            predicted: Vec::new(),
            slot: 0,
            rng,
            pending: None,
            report: TrainingReport::default(),
            config,
        };
        agent.predicted = agent.predict_arrivals()?;
        Ok(agent)
    }

    pub fn config(&self) -> &DragConfig {
        &self.config
    }

    pub fn networks(&self) -> &AgentNetworks {
        &self.nets
    }

    pub fn networks_mut(&mut self) -> &mut AgentNetworks {
        &mut self.nets
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Cost that normalizes everything the networks learn.
    pub fn reference_cost(&self) -> f64 {
        self.reference
    }

    pub fn predicted(&self) -> &[f64] {
        &self.predicted
    }

    pub fn report(&self) -> &TrainingReport {
        &self.report
    }

    pub fn memory_sizes(&self) -> [usize; 3] {
        [self.arp_memory.len(), self.cen_memory.len(), self.ac_memory.len()]
    }

    pub fn last_decision(&self) -> Option<&Decision> {
        self.pending.as_ref()
    }

    /// Predictor output for the current history, in arrival units.
    pub fn predict_arrivals(&self) -> Result<Vec<f64>, NnError> {
        let scale = self.config.lambda_scale;
        let input: Vec<f64> = self.history.flatten().iter().map(|l| l / scale).collect();
        let x = ArrayView2::from_shape((1, input.len()), &input).expect("one row");
        let out = self.nets.arp.predict(x)?;
        Ok(out.iter().map(|&y| (y * scale).max(0.0)).collect())
    }

    /// Continuous actor output for `state`.
    pub fn act(&self, state: &State) -> Result<Vec<f64>, NnError> {
        let f = state.features(self.config.lambda_scale);
        let x = ArrayView2::from_shape((1, f.len()), &f).expect("one row");
        Ok(self.nets.actor.predict(x)?.row(0).to_vec())
    }

    /// Estimated normalized cost of switching from `prev` to `modes` under
    /// `arrivals`.
    pub fn estimate_cost(&self, arrivals: &[f64], prev: &ModeVector, modes: &ModeVector) -> Result<f64, NnError> {
        let row = self.cen_row(arrivals, prev, modes);
        let x = ArrayView2::from_shape((1, row.len()), &row).expect("one row");
        Ok(self.nets.cen.predict(x)?[[0, 0]] * self.config.cen_head_scale)
    }

    fn cen_row(&self, arrivals: &[f64], prev: &ModeVector, modes: &ModeVector) -> Vec<f64> {
        let s = self.config.lambda_scale;
        let mut row: Vec<f64> = arrivals.iter().map(|l| l / s).collect();
        row.extend(prev.to_f64());
        row.extend(modes.to_f64());
        row
    }

    /// Picks the modes for the coming slot.
    pub fn decide_slot(&mut self) -> Result<&Decision, AgentError> {
        let t = self.slot;
        let state = State::new(self.predicted.clone(), self.prev_modes.clone());
        let continuous = self.act(&state)?;
        let proto = proto_action(&continuous, self.config.noise.value(t), &mut self.rng);
        let (action, branch) = refine_action(
            &proto,
            &state,
            self.config.epsilon.value(t),
            self.config.distance,
            self.config.refinement,
            &self.nets.cen,
            &self.nets.critic,
            self.config.lambda_scale,
            &mut self.rng,
        )?;
        self.pending = Some(Decision {
            state,
            continuous,
            proto,
            action,
            branch,
        });
        Ok(self.pending.as_ref().expect("just set"))
    }

    /// Stores what the slot revealed and trains.
    pub fn observe_slot(&mut self, outcome: &StepOutcome) -> Result<(), AgentError> {
        let decision = self.pending.clone().ok_or(AgentError::NoDecision)?;
        let arrivals = outcome.arrivals.as_slice().to_vec();
        let cost = outcome.cost.total / self.reference;

        self.arp_memory.push(ArpRecord {
            history: self.history.flatten(),
            arrivals: arrivals.clone(),
        });
        self.cen_memory.push(CenRecord {
            arrivals: arrivals.clone(),
            prev_modes: self.prev_modes.clone(),
            modes: decision.action.clone(),
            cost,
        });
        self.history.push(&arrivals);
        self.prev_modes = decision.action.clone();
        self.predicted = self.predict_arrivals()?;
        self.ac_memory.push(Experience {
            state: decision.state,
            action: decision.action,
            cost,
            next_state: State::new(self.predicted.clone(), self.prev_modes.clone()),
        });

        self.train(self.slot)?;
        self.slot += 1;
        Ok(())
    }

    /// Decide, execute on `env`, observe.
    pub fn run_slot(&mut self, env: &mut Environment) -> Result<(Decision, StepOutcome), AgentError> {
        let decision = self.decide_slot()?.clone();
        let outcome = env.step(&decision.action);
        self.observe_slot(&outcome)?;
        Ok((decision, outcome))
    }

    fn train(&mut self, t: u64) -> Result<(), AgentError> {
        let n = self.config.batch_size;
        if self.arp_memory.len() < n || self.cen_memory.len() < n || self.ac_memory.len() < n {
            return Ok(());
        }
        for _ in 0..self.config.k_train {
            self.report.arp = self.train_arp_step(self.config.lr_arp.value(t))?;
            self.report.cen = self.train_cen_step(self.config.lr_cen.value(t))?;
            let (critic, q) = self.train_actor_critic_step(self.config.lr_critic.value(t), self.config.lr_actor.value(t))?;
            self.report.critic = critic;
            self.report.actor_mean_q = q;
            let tau = self.config.tau;
            self.nets.actor_target.soft_update_from(&self.nets.actor, tau)?;
            self.nets.critic_target.soft_update_from(&self.nets.critic, tau)?;
            self.report.steps += 1;
        }
        Ok(())
    }

    fn train_arp_step(&mut self, lr: f64) -> Result<StepReport, AgentError> {
        let n = self.config.batch_size;
        let s = self.config.lambda_scale;
        let batch = self.arp_memory.sample(n, &mut self.rng)?;
        let hist_w = self.history.history_len() * self.n_bs;
        let x = Array2::from_shape_fn((n, hist_w), |(i, j)| batch[i].history[j] / s);
        let y = Array2::from_shape_fn((n, self.n_bs), |(i, j)| batch[i].arrivals[j] / s);
        Ok(train_arp(&mut self.nets.arp, x.view(), y.view(), lr)?)
    }

    fn train_cen_step(&mut self, lr: f64) -> Result<StepReport, AgentError> {
        let n = self.config.batch_size;
        let batch = self.cen_memory.sample(n, &mut self.rng)?;
        let mut data = Vec::with_capacity(n * (self.n_bs + 2 * self.n_sbs));
        let mut costs = Vec::with_capacity(n);
        for r in &batch {
            data.extend(self.cen_row(&r.arrivals, &r.prev_modes, &r.modes));
            costs.push(r.cost / self.config.cen_head_scale);
        }
        let x = Array2::from_shape_vec((n, self.n_bs + 2 * self.n_sbs), data).expect("row width");
        let y = Array2::from_shape_vec((n, 1), costs).expect("one column");
        Ok(train_cen(&mut self.nets.cen, x.view(), y.view(), lr)?)
    }

    fn train_actor_critic_step(&mut self, lr_critic: f64, lr_actor: f64) -> Result<(StepReport, f64), AgentError> {
        let n = self.config.batch_size;
        let scale = self.config.lambda_scale;
        let batch = self.ac_memory.sample(n, &mut self.rng)?;
        let sw = self.n_bs + self.n_sbs;
        let mut states = Vec::with_capacity(n * sw);
        let mut next = Vec::with_capacity(n * sw);
        let mut critic_in = Vec::with_capacity(n * (sw + self.n_sbs));
        let mut costs = Vec::with_capacity(n);
        for e in &batch {
            let start = states.len();
            e.state.write_features(scale, &mut states);
            critic_in.extend_from_slice(&states[start..]);
            critic_in.extend(e.action.to_f64());
            e.next_state.write_features(scale, &mut next);
            costs.push(e.cost);
        }
        let states = Array2::from_shape_vec((n, sw), states).expect("row width");
        let next = Array2::from_shape_vec((n, sw), next).expect("row width");
        let critic_in = Array2::from_shape_vec((n, sw + self.n_sbs), critic_in).expect("row width");

        let y = critic_target(&self.nets.actor_target, &self.nets.critic_target, next.view(), &costs, self.gamma)?;
        let rep = train_critic(&mut self.nets.critic, critic_in.view(), &y, lr_critic)?;
        let q = train_actor(&mut self.nets.actor, &self.nets.critic, states.view(), lr_actor)?;
        Ok((rep, q))
    }
}

impl Policy for DragAgent {
    fn name(&self) -> &str {
        match self.config.refinement {
            Refinement::Hybrid => "drag",
            Refinement::CostOnly => "drag_cost_only",
            Refinement::CriticOnly => "drag_critic_only",
            Refinement::NoiseOnly => "drag_noise_only",
        }
    }

    fn decide(&mut self, _env: &mut Environment) -> ModeVector {
        self.decide_slot().expect("agent shapes are fixed at construction").action.clone()
    }

    fn observe(&mut self, _action: &ModeVector, outcome: &StepOutcome) {
        self.observe_slot(outcome).expect("agent shapes are fixed at construction");
    }
}

/// Convenience for tests and examples: plays `slots` slots.
pub fn run_slots(agent: &mut DragAgent, env: &mut Environment, slots: u64) -> Vec<StepOutcome> {
    (0..slots).map(|_| play_slot(agent, env).1).collect()
}
