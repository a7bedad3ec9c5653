//! Daily traffic: a shared double-peak profile, per-cell scale and shift, and
//! multiplicative Ornstein-Uhlenbeck noise.

use std::f64::consts::TAU;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::ScenarioConfig;

/// Arrival rate of every station in one slot, macro cells first. Units are
/// fractions of one small cell's capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalVector(pub Vec<f64>);

impl ArrivalVector {
    pub fn zeros(n_bs: usize) -> Self {
        Self(vec![0.0; n_bs])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn mbs<'a>(&'a self, n_mbs: usize) -> &'a [f64] {
        &self.0[..n_mbs]
    }

    pub fn sbs<'a>(&'a self, n_mbs: usize) -> &'a [f64] {
        &self.0[n_mbs..]
    }
}

const TROUGH: f64 = 0.1;
const PEAK: f64 = 1.0;

/// Periodic bump centred at `center_h` hours with concentration `kappa`.
fn daily_bump(hour: f64, center_h: f64, kappa: f64) -> f64 {
    (kappa * ((TAU * (hour - center_h) / 24.0).cos() - 1.0)).exp()
}

fn raw_profile(hour: f64) -> f64 {
    0.6 * daily_bump(hour, 12.5, 6.0) + daily_bump(hour, 20.5, 8.0) + 0.25 * daily_bump(hour, 16.0, 1.5)
}

/// Samples the daily profile on `slots_per_day` equally spaced points and
/// rescales it so the smallest sample is 0.1 and the largest 1.0.
///
/// The profile has a lunchtime peak near 12:30, an evening peak near 20:30 and
/// a night trough near 04:00.
pub fn base_pattern(slots_per_day: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..slots_per_day)
        .map(|s| raw_profile(24.0 * s as f64 / slots_per_day as f64))
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    raw.iter()
        .map(|r| TROUGH + (PEAK - TROUGH) * (r - lo) / (hi - lo))
        .collect()
}

/// The 48-slot profile at `slot`.
///
/// ```
/// use hetnet_drag::env::default_base_pattern;
/// let peak = (0..48).map(default_base_pattern).fold(0.0, f64::max);
/// assert_eq!(peak, 1.0);
/// ```
pub fn default_base_pattern(slot: usize) -> f64 {
    assert!(slot < 48, "slot {slot} outside one 48-slot day");
    base_pattern(48)[slot]
}

/// One step of the unit-time-step OU recursion towards zero.
pub fn ou_step(state: f64, theta: f64, sigma: f64, standard_normal: f64) -> f64 {
    state + theta * (0.0 - state) + sigma * standard_normal
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    pub base_pattern: Vec<f64>,
    pub scale: Vec<f64>,
    pub shift: Vec<i64>,
    pub mbs_own_scale: f64,
    pub ou_theta: f64,
    pub ou_sigma: f64,
    /// Noise state per station, macro cells first.
    pub ou_state: Vec<f64>,
    n_mbs: usize,
    scale_range: (f64, f64),
    shift_max: i64,
}

impl TrafficModel {
    /// Draws per-cell scales and shifts; noise starts at zero.
    pub fn new<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Self {
        let mut model = Self {
            base_pattern: base_pattern(config.slots_per_day),
            scale: vec![1.0; config.n_sbs],
            shift: vec![0; config.n_sbs],
            mbs_own_scale: config.mbs_own_scale,
            ou_theta: config.ou_theta,
            ou_sigma: config.ou_sigma,
            ou_state: vec![0.0; config.n_bs()],
            n_mbs: config.n_mbs,
            scale_range: (config.scale_min, config.scale_max),
            shift_max: config.shift_max,
        };
        model.pattern_shift(rng);
        model
    }

    pub fn n_bs(&self) -> usize {
        self.ou_state.len()
    }

    fn pattern_at(&self, slot: i64) -> f64 {
        let n = self.base_pattern.len() as i64;
        self.base_pattern[slot.rem_euclid(n) as usize]
    }

    /// Arrivals for global slot `slot`. Advances every noise state by one step
    /// first, then applies it multiplicatively.
    pub fn sample_arrivals<R: Rng + ?Sized>(&mut self, slot: u64, rng: &mut R) -> ArrivalVector {
        for n in self.ou_state.iter_mut() {
            let xi: f64 = rng.sample(StandardNormal);
            *n = ou_step(*n, self.ou_theta, self.ou_sigma, xi);
        }
        let slot = slot as i64;
        let mut lambda = Vec::with_capacity(self.n_bs());
        for m in 0..self.n_mbs {
            let own = self.mbs_own_scale * self.pattern_at(slot) * (1.0 + self.ou_state[m]);
            lambda.push(own.max(0.0));
        }
        for i in 0..self.scale.len() {
            let noise = self.ou_state[self.n_mbs + i];
            let value = self.scale[i] * self.pattern_at(slot + self.shift[i]) * (1.0 + noise);
            lambda.push(value.max(0.0));
        }
        ArrivalVector(lambda)
    }

    /// Redraws every small cell's scale and shift. Profile and noise are kept.
    pub fn pattern_shift<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (lo, hi) = self.scale_range;
        for i in 0..self.scale.len() {
            self.scale[i] = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            self.shift[i] = if self.shift_max > 0 {
                rng.random_range(-self.shift_max..=self.shift_max)
            } else {
                0
            };
        }
    }
}

/// Writes `slot,bs_index,lambda` rows, one per station per slot.
pub fn write_trace_csv<W: Write>(
    out: W,
    trace: impl IntoIterator<Item = (u64, ArrivalVector)>,
) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["slot", "bs_index", "lambda"])?;
    for (slot, arrivals) in trace {
        for (bs, lambda) in arrivals.0.iter().enumerate() {
            writer.write_record([slot.to_string(), bs.to_string(), lambda.to_string()])?;
        }
    }
    writer.flush()?;
    Ok(())
}
