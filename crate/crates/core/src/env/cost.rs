//! Loads and the three-part slot cost.
//!
//! Loads and arrivals share one layout: macro cells first, then small cells.

use super::{ArrivalVector, ModeVector, Topology};
use crate::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub energy: f64,
    pub delay_cost: f64,
    pub switching_cost: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(energy: f64, delay_cost: f64, switching_cost: f64) -> Self {
        Self {
            energy,
            delay_cost,
            switching_cost,
            total: energy + delay_cost + switching_cost,
        }
    }

    /// Energy plus delay; the part the exhaustive-search bound minimizes.
    pub fn operating(&self) -> f64 {
        self.energy + self.delay_cost
    }
}

/// Traffic each station is asked to carry, in units of its own capacity and
/// before the load cap. A sleeping small cell hands its whole arrival rate to
/// its parent macro cell.
pub fn offered_load_into(
    arrivals: &ArrivalVector,
    modes: &ModeVector,
    topo: &Topology,
    config: &ScenarioConfig,
    out: &mut Vec<f64>,
) {
    let n_mbs = topo.n_mbs();
    debug_assert_eq!(arrivals.len(), n_mbs + topo.n_sbs());
    debug_assert_eq!(modes.len(), topo.n_sbs());
    out.clear();
    out.extend_from_slice(arrivals.mbs(n_mbs));
    for (i, &lambda) in arrivals.sbs(n_mbs).iter().enumerate() {
        if modes.is_on(i) {
            out.push(lambda);
        } else {
            out[topo.sbs_parent[i]] += lambda;
            out.push(0.0);
        }
    }
    for macro_load in &mut out[..n_mbs] {
        *macro_load /= config.capacity_ratio;
    }
}

/// Capped loads, written into `out` to avoid allocating in search loops.
pub fn compute_load_into(
    arrivals: &ArrivalVector,
    modes: &ModeVector,
    topo: &Topology,
    config: &ScenarioConfig,
    out: &mut Vec<f64>,
) {
    offered_load_into(arrivals, modes, topo, config, out);
    for rho in out.iter_mut() {
        *rho = rho.min(config.load_cap);
    }
}

pub fn compute_load(
    arrivals: &ArrivalVector,
    modes: &ModeVector,
    topo: &Topology,
    config: &ScenarioConfig,
) -> Vec<f64> {
    let mut loads = Vec::with_capacity(arrivals.len());
    compute_load_into(arrivals, modes, topo, config, &mut loads);
    loads
}

/// Power drawn by all stations: a constant part plus a load-proportional part
/// for every active station, `sbs_sleep_power` for every sleeping small cell.
pub fn energy(loads: &[f64], modes: &ModeVector, config: &ScenarioConfig) -> f64 {
    let n_mbs = loads.len() - modes.len();
    let mut total = 0.0;
    for rho in &loads[..n_mbs] {
        total += config.mbs_const_power + rho * config.mbs_load_power;
    }
    for (i, rho) in loads[n_mbs..].iter().enumerate() {
        total += if modes.is_on(i) {
            config.sbs_const_power + rho * config.sbs_load_power
        } else {
            config.sbs_sleep_power
        };
    }
    total
}

pub fn delay_cost(loads: &[f64], config: &ScenarioConfig) -> f64 {
    config.beta_d * loads.iter().map(|rho| rho / (1.0 - rho)).sum::<f64>()
}

/// `beta_s` per small cell switched on; switching off is free.
pub fn switching_cost(prev: &ModeVector, next: &ModeVector, config: &ScenarioConfig) -> f64 {
    assert_eq!(prev.len(), next.len());
    let activations = prev
        .iter()
        .zip(next.iter())
        .filter(|(was, now)| !was && *now)
        .count();
    config.beta_s * activations as f64
}

/// Full cost of running `next` for one slot after `prev`.
pub fn slot_cost(
    arrivals: &ArrivalVector,
    prev: &ModeVector,
    next: &ModeVector,
    topo: &Topology,
    config: &ScenarioConfig,
) -> CostBreakdown {
    let loads = compute_load(arrivals, next, topo, config);
    CostBreakdown::new(
        energy(&loads, next, config),
        delay_cost(&loads, config),
        switching_cost(prev, next, config),
    )
}

/// All-on cost of one slot at a nominal load: every small cell at 0.5, each
/// macro cell carrying `mbs_own_scale * 0.5` of its own traffic. A fixed scale
/// for normalizing costs before they enter learning.
pub fn reference_cost(config: &ScenarioConfig) -> f64 {
    let topo = Topology {
        mbs_positions: vec![super::Point { x: 0.0, y: 0.0 }; config.n_mbs],
        sbs_positions: vec![super::Point { x: 0.0, y: 0.0 }; config.n_sbs],
        sbs_parent: vec![0; config.n_sbs],
    };
    let mut lambda = vec![0.5 * config.mbs_own_scale; config.n_mbs];
    lambda.extend(std::iter::repeat_n(0.5, config.n_sbs));
    let on = ModeVector::all_on(config.n_sbs);
    slot_cost(&ArrivalVector(lambda), &on, &on, &topo, config).total
}
