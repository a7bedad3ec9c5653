//! Text checkpoint of a controller between slots.
//!
//! Holds the six networks, the three replay memories, the prediction
//! history, the slot counter and the random stream position, so a restored
//! agent continues exactly as the original would have. Schedules are
//! functions of the slot counter and need no state of their own.

use std::fmt::Write as _;

use crate::config::ScenarioConfig;
use crate::env::ModeVector;
use crate::nn::{float_line, LineReader, Mlp};

use super::drag::{ArpRecord, CenRecord, DragAgent, DragConfig, Experience};
use super::{AgentError, AgentNetworks, State};

pub const CHECKPOINT_HEADER: &str = "drag-checkpoint v1";

fn parse_modes(r: &LineReader<'_>, s: &str, n: usize) -> Result<ModeVector, AgentError> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(ckpt(r.error(format!("bad mode vector `{s}`"))));
    }
    Ok(ModeVector::from_bits(&s.chars().map(|c| c == '1').collect::<Vec<_>>()))
}

fn ckpt(e: crate::nn::NnError) -> AgentError {
    AgentError::Checkpoint(e.to_string())
}

impl DragAgent {
    pub fn checkpoint(&self) -> String {
        let mut out = String::new();
        out.push_str(CHECKPOINT_HEADER);
        out.push('\n');
        let _ = writeln!(out, "slot {}", self.slot);
        let seed: String = self.rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
        let _ = writeln!(
            out,
            "rng {seed} {} {}",
            self.rng.get_stream(),
            self.rng.get_word_pos()
        );
        let _ = writeln!(out, "prev_modes {}", self.prev_modes);
        float_line(&mut out, "predicted", self.predicted.iter().copied());
        let _ = writeln!(out, "history {}", self.history.entries().count());
        for h in self.history.entries() {
            float_line(&mut out, "h", h.iter().copied());
        }
        let _ = writeln!(out, "train_steps {}", self.report.steps);
        for (name, net) in AgentNetworks::NAMES.iter().zip(self.nets.all()) {
            let _ = writeln!(out, "net {name}");
            out.push_str(&net.to_snapshot());
        }

        let _ = writeln!(out, "arp_memory {}", self.arp_memory.len());
        for r in self.arp_memory.iter() {
            float_line(&mut out, "ah", r.history.iter().copied());
            float_line(&mut out, "aa", r.arrivals.iter().copied());
        }
        let _ = writeln!(out, "cen_memory {}", self.cen_memory.len());
        for r in self.cen_memory.iter() {
            float_line(&mut out, "ca", r.arrivals.iter().copied());
            let _ = writeln!(out, "cm {} {}", r.prev_modes, r.modes);
            float_line(&mut out, "cc", [r.cost]);
        }
        let _ = writeln!(out, "ac_memory {}", self.ac_memory.len());
        for e in self.ac_memory.iter() {
            float_line(&mut out, "es", e.state.predicted.iter().copied());
            float_line(&mut out, "en", e.next_state.predicted.iter().copied());
            let _ = writeln!(out, "em {} {} {}", e.state.prev_modes, e.action, e.next_state.prev_modes);
            float_line(&mut out, "ec", [e.cost]);
        }
        out
    }

    /// Rebuilds an agent from [`DragAgent::checkpoint`] output. `scenario`
    /// and `config` must be the ones the checkpointed agent was built with.
    pub fn restore(scenario: &ScenarioConfig, config: DragConfig, text: &str) -> Result<Self, AgentError> {
        let mut agent = DragAgent::new(scenario, config, 0)?;
        let (n_bs, n_sbs) = (agent.n_bs, agent.n_sbs);
        let hist_w = agent.history.history_len() * n_bs;
        let r = &mut LineReader::new(text);

        if r.next_line().map_err(ckpt)?.trim() != CHECKPOINT_HEADER {
            return Err(AgentError::Checkpoint(format!("missing `{CHECKPOINT_HEADER}` header")));
        }
        agent.slot = r.usize_field("slot").map_err(ckpt)? as u64;

        let rng_fields = r.tagged("rng").map_err(ckpt)?;
        let [seed_hex, stream, word_pos] = rng_fields.as_slice() else {
            return Err(ckpt(r.error("`rng` takes three fields")));
        };
        if seed_hex.len() != 64 {
            return Err(ckpt(r.error("seed must be 32 bytes")));
        }
        let mut seed = [0u8; 32];
        for (i, b) in seed.iter_mut().enumerate() {
            *b = u8::from_str_radix(&seed_hex[2 * i..2 * i + 2], 16).map_err(|_| ckpt(r.error("bad seed")))?;
        }
        let stream: u64 = stream.parse().map_err(|_| ckpt(r.error("bad stream")))?;
        let word_pos: u128 = word_pos.parse().map_err(|_| ckpt(r.error("bad word position")))?;
        use rand::SeedableRng;
        agent.rng = crate::SimRng::from_seed(seed);
        agent.rng.set_stream(stream);
        agent.rng.set_word_pos(word_pos);

        let modes = r.tagged("prev_modes").map_err(ckpt)?;
        agent.prev_modes = parse_modes(r, modes.first().copied().unwrap_or(""), n_sbs)?;
        agent.predicted = r.floats("predicted", n_bs).map_err(ckpt)?;
        let n_hist = r.usize_field("history").map_err(ckpt)?;
        if n_hist > agent.history.history_len() {
            return Err(ckpt(r.error("history longer than configured")));
        }
        for _ in 0..n_hist {
            let h = r.floats("h", n_bs).map_err(ckpt)?;
            agent.history.push(&h);
        }
        agent.report.steps = r.usize_field("train_steps").map_err(ckpt)? as u64;

        for (name, slot) in AgentNetworks::NAMES.iter().zip(agent.nets.all_mut()) {
            let tag = r.tagged("net").map_err(ckpt)?;
            if tag.as_slice() != [*name] {
                return Err(ckpt(r.error(format!("expected network `{name}`"))));
            }
            let net = Mlp::read_snapshot(r).map_err(ckpt)?;
            if net.input_dim() != slot.input_dim() || net.n_params() != slot.n_params() {
                return Err(ckpt(r.error(format!("network `{name}` does not fit the scenario"))));
            }
            *slot = net;
        }

        for _ in 0..r.usize_field("arp_memory").map_err(ckpt)? {
            let history = r.floats("ah", hist_w).map_err(ckpt)?;
            let arrivals = r.floats("aa", n_bs).map_err(ckpt)?;
            agent.arp_memory.push(ArpRecord { history, arrivals });
        }
        for _ in 0..r.usize_field("cen_memory").map_err(ckpt)? {
            let arrivals = r.floats("ca", n_bs).map_err(ckpt)?;
            let m = r.tagged("cm").map_err(ckpt)?;
            let [prev, modes] = m.as_slice() else {
                return Err(ckpt(r.error("`cm` takes two mode vectors")));
            };
            let prev_modes = parse_modes(r, prev, n_sbs)?;
            let modes = parse_modes(r, modes, n_sbs)?;
            let cost = r.floats("cc", 1).map_err(ckpt)?[0];
            agent.cen_memory.push(CenRecord {
                arrivals,
                prev_modes,
                modes,
                cost,
            });
        }
        for _ in 0..r.usize_field("ac_memory").map_err(ckpt)? {
            let predicted = r.floats("es", n_bs).map_err(ckpt)?;
            let next_predicted = r.floats("en", n_bs).map_err(ckpt)?;
            let m = r.tagged("em").map_err(ckpt)?;
            let [prev, action, next_prev] = m.as_slice() else {
                return Err(ckpt(r.error("`em` takes three mode vectors")));
            };
            let state = State::new(predicted, parse_modes(r, prev, n_sbs)?);
            let action = parse_modes(r, action, n_sbs)?;
            let next_state = State::new(next_predicted, parse_modes(r, next_prev, n_sbs)?);
            let cost = r.floats("ec", 1).map_err(ckpt)?[0];
            agent.ac_memory.push(Experience {
                state,
                action,
                cost,
                next_state,
            });
        }
        Ok(agent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Environment;

    #[test]
    fn resumed_agent_matches_uninterrupted_run() {
        let scenario = ScenarioConfig {
            n_sbs: 3,
            ..ScenarioConfig::default()
        };
        let config = DragConfig {
            width_scale: 0.05,
            batch_size: 4,
            replay_capacity: 20,
            k_train: 1,
            ..DragConfig::default()
        };
        let mut env = Environment::new(scenario.clone(), 1).unwrap();
        let mut agent = DragAgent::new(&scenario, config.clone(), 2).unwrap();
        for _ in 0..30 {
            agent.run_slot(&mut env).unwrap();
        }
        let text = agent.checkpoint();
        let mut resumed = DragAgent::restore(&scenario, config, &text).unwrap();
        assert_eq!(resumed.checkpoint(), text);
        let mut env2 = env.clone();
        for _ in 0..30 {
            let (a, _) = agent.run_slot(&mut env).unwrap();
            let (b, _) = resumed.run_slot(&mut env2).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(agent.networks(), resumed.networks());
    }

    #[test]
    fn rejects_other_scenarios() {
        let scenario = ScenarioConfig {
            n_sbs: 3,
            ..ScenarioConfig::default()
        };
        let config = DragConfig {
            width_scale: 0.05,
            ..DragConfig::default()
        };
        let text = DragAgent::new(&scenario, config.clone(), 0).unwrap().checkpoint();
        let bigger = ScenarioConfig {
            n_sbs: 4,
            ..ScenarioConfig::default()
        };
        assert!(DragAgent::restore(&bigger, config.clone(), &text).is_err());
        assert!(DragAgent::restore(&scenario, config, "garbage").is_err());
    }
}
