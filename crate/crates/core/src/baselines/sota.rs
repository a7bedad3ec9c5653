use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::env::{compute_load_into, delay_cost, energy, ArrivalVector, Environment, ModeVector, StepOutcome, Topology};
use crate::policy::Policy;

/// Largest number of small cells the exhaustive search accepts.
pub const SOTA_MAX_CELLS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("exhaustive search over {0} small cells exceeds the limit of {SOTA_MAX_CELLS}")]
pub struct TooLarge(pub usize);

/// Mode vector minimizing energy plus delay for known arrivals, switching
/// ignored. Ties go to fewer active cells, then the lower index.
pub fn sota_action(
    arrivals: &ArrivalVector,
    topo: &Topology,
    config: &ScenarioConfig,
) -> Result<ModeVector, TooLarge> {
    let n = topo.n_sbs();
    if n > SOTA_MAX_CELLS {
        return Err(TooLarge(n));
    }
    let mut loads = Vec::with_capacity(arrivals.len());
    let mut modes = ModeVector::all_off(n);
    let mut best: Option<(f64, (usize, u64))> = None;
    for idx in 0..1u64 << n {
        for i in 0..n {
            modes.set(i, idx >> i & 1 == 1);
        }
        compute_load_into(arrivals, &modes, topo, config, &mut loads);
        let cost = energy(&loads, &modes, config) + delay_cost(&loads, config);
        let key = (modes.count_on(), idx);
        let better = match best {
            None => true,
            Some((c, k)) => cost < c || (cost == c && key < k),
        };
        if better {
            best = Some((cost, key));
        }
    }
    let (_, (_, idx)) = best.expect("at least one candidate");
    Ok(ModeVector::from_index(idx, n))
}

/// Noncausal lower bound: searches every mode vector against the true
/// arrivals of the coming slot.
#[derive(Debug, Clone, Default)]
pub struct Sota;

impl Sota {
    pub fn new(config: &ScenarioConfig) -> Result<Self, TooLarge> {
        if config.n_sbs > SOTA_MAX_CELLS {
            return Err(TooLarge(config.n_sbs));
        }
        Ok(Sota)
    }
}

impl Policy for Sota {
    fn name(&self) -> &str {
        "sota"
    }

    fn decide(&mut self, env: &mut Environment) -> ModeVector {
        let arrivals = env.peek_arrivals().clone();
        sota_action(&arrivals, env.topology(), env.config()).expect("size checked at construction")
    }

    fn observe(&mut self, _action: &ModeVector, _outcome: &StepOutcome) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{slot_cost, Topology};

    #[test]
    fn idle_network_sleeps() {
        let config = ScenarioConfig { n_sbs: 6, ..ScenarioConfig::default() };
        let topo = Topology::star(6);
        let a = sota_action(&ArrivalVector::zeros(7), &topo, &config).unwrap();
        assert_eq!(a, ModeVector::all_off(6));
    }

    #[test]
    fn busy_cell_stays_on() {
        let config = ScenarioConfig { n_sbs: 1, ..ScenarioConfig::default() };
        let topo = Topology::star(1);
        // macro already near its capacity, so offloading would saturate it
        let arrivals = ArrivalVector(vec![3.5, 0.9]);
        assert_eq!(sota_action(&arrivals, &topo, &config).unwrap(), ModeVector::all_on(1));
    }

    #[test]
    fn matches_brute_force_with_allocating_cost() {
        let config = ScenarioConfig { n_sbs: 5, ..ScenarioConfig::default() };
        let topo = Topology::star(5);
        let arrivals = ArrivalVector(vec![0.7, 0.2, 0.9, 0.05, 0.6, 0.4]);
        let a = sota_action(&arrivals, &topo, &config).unwrap();
        let off = ModeVector::all_off(5);
        let best = slot_cost(&arrivals, &off, &a, &topo, &config).operating();
        for idx in 0..32 {
            let v = ModeVector::from_index(idx, 5);
            assert!(slot_cost(&arrivals, &off, &v, &topo, &config).operating() >= best);
        }
    }

    #[test]
    fn refuses_huge_searches() {
        let config = ScenarioConfig { n_sbs: 21, ..ScenarioConfig::default() };
        assert_eq!(Sota::new(&config).unwrap_err(), TooLarge(21));
        let topo = Topology::star(21);
        assert!(sota_action(&ArrivalVector::zeros(22), &topo, &config).is_err());
    }
}
