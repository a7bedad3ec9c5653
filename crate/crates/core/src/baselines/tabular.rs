use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::env::{reference_cost, Environment, ModeVector, StepOutcome};
use crate::nn::LinearSchedule;
use crate::policy::{Policy, PolicyStats};

/// Per-station bin indices, `floor(bins * min(l, hi) / hi)` clamped to the
/// last bin.
pub fn quantize(arrivals: &[f64], bins: usize, hi: f64) -> Vec<usize> {
    arrivals
        .iter()
        .map(|&l| {
            let frac = l.max(0.0).min(hi) / hi;
            ((frac * bins as f64).floor() as usize).min(bins - 1)
        })
        .collect()
}

/// Composes bin indices into one key, station 0 least significant.
pub fn state_key(bins_per_station: &[usize], bins: usize) -> u64 {
    bins_per_station
        .iter()
        .rev()
        .fold(0u64, |acc, &b| acc * bins as u64 + b as u64)
}

/// Samples an index with probability proportional to
/// `exp(-value / temperature)`, so low values (costs) are preferred.
pub fn boltzmann_select<R: Rng + ?Sized>(values: &[f64], temperature: f64, rng: &mut R) -> usize {
    assert!(temperature > 0.0 && !values.is_empty());
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = values.iter().map(|v| (-(v - min) / temperature).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(values.len() - 1)
}

/// `q + alpha * (cost + gamma * next_min - q)`.
pub fn ql_update(q: f64, cost: f64, next_min: f64, alpha: f64, gamma: f64) -> f64 {
    q + alpha * (cost + gamma * next_min - q)
}

/// State discretization with bin edges that adapt during a warm-up period.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    pub bins: usize,
    /// Upper edge is `margin` times the largest arrival seen so far.
    pub margin: f64,
    /// The edge stops moving after this many slots.
    pub freeze_after: u64,
    running_max: f64,
    hi: f64,
}

impl Quantizer {
    pub fn new(bins: usize, margin: f64, freeze_after: u64) -> Self {
        Self {
            bins,
            margin,
            freeze_after,
            running_max: 0.0,
            hi: 1.0,
        }
    }

    pub fn upper_edge(&self) -> f64 {
        self.hi
    }

    pub fn observe(&mut self, arrivals: &[f64], slot: u64) {
        if slot >= self.freeze_after {
            return;
        }
        let peak = arrivals.iter().copied().fold(self.running_max, f64::max);
        self.running_max = peak;
        if peak > 0.0 {
            self.hi = self.margin * peak;
        }
    }

    pub fn key(&self, arrivals: &[f64]) -> u64 {
        state_key(&quantize(arrivals, self.bins, self.hi), self.bins)
    }
}

/// Sparse table over `(state, action)`; missing entries read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseTable {
    rows: HashMap<u64, BTreeMap<u64, f64>>,
}

impl SparseTable {
    pub fn get(&self, state: u64, action: u64) -> f64 {
        self.rows
            .get(&state)
            .and_then(|r| r.get(&action))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, state: u64, action: u64, value: f64) {
        self.rows.entry(state).or_default().insert(action, value);
    }

    /// Minimum over all `n_actions` actions, counting missing ones as zero.
    pub fn min_over_actions(&self, state: u64, n_actions: u64) -> f64 {
        match self.rows.get(&state) {
            None => 0.0,
            Some(row) => {
                let visited_min = row.values().copied().fold(f64::INFINITY, f64::min);
                if (row.len() as u64) < n_actions {
                    visited_min.min(0.0)
                } else {
                    visited_min
                }
            }
        }
    }

    /// Boltzmann probabilities over all actions, densely. For tests and
    /// small action spaces.
    pub fn probabilities(&self, state: u64, n_actions: u64, temperature: f64) -> Vec<f64> {
        let values: Vec<f64> = (0..n_actions).map(|a| self.get(state, a)).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = values.iter().map(|v| (-(v - min) / temperature).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Boltzmann sampling over all actions without materializing the
    /// missing entries: they share one weight and are drawn uniformly as a
    /// block.
    pub fn sample_boltzmann<R: Rng + ?Sized>(&self, state: u64, n_actions: u64, temperature: f64, rng: &mut R) -> u64 {
        let empty = BTreeMap::new();
        let row = self.rows.get(&state).unwrap_or(&empty);
        let n_missing = n_actions - row.len() as u64;
        let min = self.min_over_actions(state, n_actions);
        let weight = |v: f64| (-(v - min) / temperature).exp();
        let missing_weight = weight(0.0) * n_missing as f64;
        let total = missing_weight + row.values().map(|&v| weight(v)).sum::<f64>();
        let mut u = rng.random::<f64>() * total;
        if u < missing_weight {
            // j-th missing action in increasing order
            let mut action = rng.random_range(0..n_missing);
            for &visited in row.keys() {
                if visited <= action {
                    action += 1;
                } else {
                    break;
                }
            }
            return action;
        }
        u -= missing_weight;
        let mut last = 0;
        for (&a, &v) in row {
            let w = weight(v);
            if u < w {
                return a;
            }
            u -= w;
            last = a;
        }
        last
    }

    pub fn visited_pairs(&self) -> u64 {
        self.rows.values().map(|r| r.len() as u64).sum()
    }

    pub fn visited_states(&self) -> u64 {
        self.rows.len() as u64
    }
}

/// Settings shared by the two tabular learners.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularConfig {
    pub bins: usize,
    pub margin: f64,
    pub freeze_after: u64,
    pub temperature: LinearSchedule,
    /// Q-learning rate, or critic rate for the actor-critic.
    pub alpha: f64,
    /// Actor (preference) rate of the actor-critic.
    pub alpha_policy: f64,
}

impl Default for TabularConfig {
    fn default() -> Self {
        Self {
            bins: 5,
            margin: 1.25,
            freeze_after: 10 * 48,
            temperature: LinearSchedule::new(1.0, 0.05, 10_000),
            alpha: 0.1,
            alpha_policy: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
struct TabularCore<R> {
    config: TabularConfig,
    gamma: f64,
    n_sbs: usize,
    n_actions: u64,
    reference: f64,
    quantizer: Quantizer,
    last_arrivals: Vec<f64>,
    slot: u64,
    pending: Option<(u64, u64)>,
    rng: R,
}

impl<R: Rng> TabularCore<R> {
    fn new(scenario: &ScenarioConfig, config: TabularConfig, rng: R) -> Self {
        assert!(scenario.n_sbs < 64);
        Self {
            quantizer: Quantizer::new(config.bins, config.margin, config.freeze_after),
            config,
            gamma: scenario.gamma,
            n_sbs: scenario.n_sbs,
            n_actions: 1u64 << scenario.n_sbs,
            reference: reference_cost(scenario),
            last_arrivals: vec![0.0; scenario.n_bs()],
            slot: 0,
            pending: None,
            rng,
        }
    }

    fn state(&self) -> u64 {
        self.quantizer.key(&self.last_arrivals)
    }

    /// Records the outcome; returns `(state, action, normalized cost, next state)`.
    fn advance(&mut self, outcome: &StepOutcome) -> (u64, u64, f64, u64) {
        let (s, a) = self.pending.take().expect("decide before observe");
        self.quantizer.observe(outcome.arrivals.as_slice(), self.slot);
        self.last_arrivals = outcome.arrivals.as_slice().to_vec();
        self.slot += 1;
        (s, a, outcome.cost.total / self.reference, self.state())
    }
}

/// Tabular Q-learning over quantized last-slot arrivals with Boltzmann
/// exploration.
#[derive(Debug, Clone)]
pub struct TabularQ<R> {
    core: TabularCore<R>,
    table: SparseTable,
}

impl<R: Rng> TabularQ<R> {
    pub fn new(scenario: &ScenarioConfig, config: TabularConfig, rng: R) -> Self {
        Self {
            core: TabularCore::new(scenario, config, rng),
            table: SparseTable::default(),
        }
    }

    pub fn table(&self) -> &SparseTable {
        &self.table
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.core.quantizer
    }
}

impl<R: Rng> Policy for TabularQ<R> {
    fn name(&self) -> &str {
        "ql"
    }

    fn decide(&mut self, _env: &mut Environment) -> ModeVector {
        let c = &mut self.core;
        let s = c.state();
        let t = c.config.temperature.value(c.slot);
        let a = self.table.sample_boltzmann(s, c.n_actions, t, &mut c.rng);
        c.pending = Some((s, a));
        ModeVector::from_index(a, c.n_sbs)
    }

    fn observe(&mut self, _action: &ModeVector, outcome: &StepOutcome) {
        let (s, a, cost, next) = self.core.advance(outcome);
        let next_min = self.table.min_over_actions(next, self.core.n_actions);
        let q = ql_update(self.table.get(s, a), cost, next_min, self.core.config.alpha, self.core.gamma);
        self.table.set(s, a, q);
    }

    fn stats(&self) -> PolicyStats {
        let states = (self.core.config.bins as f64).powi(self.core.last_arrivals.len() as i32);
        PolicyStats {
            visited_pairs: Some(self.table.visited_pairs()),
            total_pairs: Some(states * self.core.n_actions as f64),
            visited_states: Some(self.table.visited_states()),
        }
    }
}

/// Tabular actor-critic in the style of TACT, without its transfer
/// component: a state-value critic driven by the TD error, and per-state
/// action preferences (lower is better) sampled with Boltzmann exploration.
#[derive(Debug, Clone)]
pub struct TabularAC<R> {
    core: TabularCore<R>,
    preferences: SparseTable,
    values: HashMap<u64, f64>,
}

impl<R: Rng> TabularAC<R> {
    pub fn new(scenario: &ScenarioConfig, config: TabularConfig, rng: R) -> Self {
        Self {
            core: TabularCore::new(scenario, config, rng),
            preferences: SparseTable::default(),
            values: HashMap::new(),
        }
    }

    pub fn preferences(&self) -> &SparseTable {
        &self.preferences
    }

    pub fn value(&self, state: u64) -> f64 {
        self.values.get(&state).copied().unwrap_or(0.0)
    }
}

impl<R: Rng> Policy for TabularAC<R> {
    fn name(&self) -> &str {
        "tact_style"
    }

    fn decide(&mut self, _env: &mut Environment) -> ModeVector {
        let c = &mut self.core;
        let s = c.state();
        let t = c.config.temperature.value(c.slot);
        let a = self.preferences.sample_boltzmann(s, c.n_actions, t, &mut c.rng);
        c.pending = Some((s, a));
        ModeVector::from_index(a, c.n_sbs)
    }

    fn observe(&mut self, _action: &ModeVector, outcome: &StepOutcome) {
        let (s, a, cost, next) = self.core.advance(outcome);
        let td = cost + self.core.gamma * self.value(next) - self.value(s);
        *self.values.entry(s).or_insert(0.0) += self.core.config.alpha * td;
        let p = self.preferences.get(s, a) + self.core.config.alpha_policy * td;
        self.preferences.set(s, a, p);
    }

    fn stats(&self) -> PolicyStats {
        let states = (self.core.config.bins as f64).powi(self.core.last_arrivals.len() as i32);
        PolicyStats {
            visited_pairs: Some(self.preferences.visited_pairs()),
            total_pairs: Some(states * self.core.n_actions as f64),
            visited_states: Some(self.preferences.visited_states()),
        }
    }
}
