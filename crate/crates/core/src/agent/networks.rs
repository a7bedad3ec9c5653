use rand::Rng;

use crate::nn::{Activation, LayerSpec, Mlp};

/// Hidden sizes at full width.
pub const FULL_HIDDEN: [usize; 2] = [200, 100];

/// Hidden sizes scaled by `k`, each at least one unit.
pub fn hidden_sizes(width_scale: f64) -> [usize; 2] {
    FULL_HIDDEN.map(|h| ((h as f64 * width_scale).round() as usize).max(1))
}

/// Arrival predictor: `h * B` history in, `B` arrivals out.
pub fn arp_layers(history: usize, n_bs: usize, width_scale: f64) -> (usize, Vec<LayerSpec>) {
    let [h1, h2] = hidden_sizes(width_scale);
    (
        history * n_bs,
        vec![
            LayerSpec::new(h1, Activation::Tanh, true),
            LayerSpec::new(h2, Activation::Tanh, true),
            LayerSpec::new(n_bs, Activation::Sigmoid, false),
        ],
    )
}

/// Cost estimator: arrivals, previous modes and candidate modes in, one
/// scaled cost out.
pub fn cen_layers(n_bs: usize, n_sbs: usize, width_scale: f64) -> (usize, Vec<LayerSpec>) {
    let [h1, h2] = hidden_sizes(width_scale);
    (
        n_bs + 2 * n_sbs,
        vec![
            LayerSpec::new(h1, Activation::Tanh, true),
            LayerSpec::new(h2, Activation::Tanh, true),
            LayerSpec::new(1, Activation::Sigmoid, false),
        ],
    )
}

/// Actor: state in, one continuous activation level per small cell out.
pub fn actor_layers(n_bs: usize, n_sbs: usize, width_scale: f64) -> (usize, Vec<LayerSpec>) {
    let [h1, h2] = hidden_sizes(width_scale);
    (
        n_bs + n_sbs,
        vec![
            LayerSpec::new(h1, Activation::Softplus, true),
            LayerSpec::new(h2, Activation::Relu, true),
            LayerSpec::new(n_sbs, Activation::ShiftedTanh, false),
        ],
    )
}

/// Critic: state and action in, expected discounted cost out.
pub fn critic_layers(n_bs: usize, n_sbs: usize, width_scale: f64) -> (usize, Vec<LayerSpec>) {
    let [h1, h2] = hidden_sizes(width_scale);
    (
        n_bs + 2 * n_sbs,
        vec![
            LayerSpec::new(h1, Activation::Softplus, true),
            LayerSpec::new(h2, Activation::Relu, true),
            LayerSpec::new(1, Activation::Linear, false),
        ],
    )
}

/// The six networks of the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentNetworks {
    pub arp: Mlp,
    pub cen: Mlp,
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_target: Mlp,
    pub critic_target: Mlp,
}

impl AgentNetworks {
    /// Targets start as exact copies of their online networks.
    pub fn new<R: Rng + ?Sized>(
        history: usize,
        n_bs: usize,
        n_sbs: usize,
        width_scale: f64,
        rng: &mut R,
    ) -> Self {
        let build = |(input, specs): (usize, Vec<LayerSpec>), rng: &mut R| Mlp::new(input, &specs, rng);
        let arp = build(arp_layers(history, n_bs, width_scale), rng);
        let cen = build(cen_layers(n_bs, n_sbs, width_scale), rng);
        let actor = build(actor_layers(n_bs, n_sbs, width_scale), rng);
        let critic = build(critic_layers(n_bs, n_sbs, width_scale), rng);
        Self {
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            arp,
            cen,
            actor,
            critic,
        }
    }

    pub const NAMES: [&'static str; 6] = ["arp", "cen", "actor", "critic", "actor_target", "critic_target"];

    pub fn all(&self) -> [&Mlp; 6] {
        [&self.arp, &self.cen, &self.actor, &self.critic, &self.actor_target, &self.critic_target]
    }

    pub fn all_mut(&mut self) -> [&mut Mlp; 6] {
        [
            &mut self.arp,
            &mut self.cen,
            &mut self.actor,
            &mut self.critic,
            &mut self.actor_target,
            &mut self.critic_target,
        ]
    }
}
