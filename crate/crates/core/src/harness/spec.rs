use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::agent::{DragConfig, Refinement};
use crate::config::{parse_entries, parse_value, ConfigError, Entry, ScenarioConfig};

/// Which controller an experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    Drag,
    Ql,
    TactStyle,
    Sota,
    AllOn,
    AllOff,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] = [
        AgentKind::Drag,
        AgentKind::Ql,
        AgentKind::TactStyle,
        AgentKind::Sota,
        AgentKind::AllOn,
        AgentKind::AllOff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Drag => "drag",
            AgentKind::Ql => "ql",
            AgentKind::TactStyle => "tact_style",
            AgentKind::Sota => "sota",
            AgentKind::AllOn => "all_on",
            AgentKind::AllOff => "all_off",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown agent `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Stationary,
    /// Re-scale and re-shift every small cell's traffic every
    /// `shift_every_days` days.
    PatternShift,
    /// One point per OU noise level.
    NoiseSweep,
    /// One point per small-cell count.
    ScaleSweep,
    /// One point per hidden-width factor; learning controller only.
    WidthSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Stationary,
        ExperimentKind::PatternShift,
        ExperimentKind::NoiseSweep,
        ExperimentKind::ScaleSweep,
        ExperimentKind::WidthSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Stationary => "stationary",
            ExperimentKind::PatternShift => "pattern_shift_100d",
            ExperimentKind::NoiseSweep => "noise_sweep",
            ExperimentKind::ScaleSweep => "scale_sweep",
            ExperimentKind::WidthSweep => "width_sweep",
        }
    }

    /// Sweep values used when the spec gives none.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            ExperimentKind::Stationary | ExperimentKind::PatternShift => Vec::new(),
            ExperimentKind::NoiseSweep => vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05],
            ExperimentKind::ScaleSweep => vec![6.0, 8.0, 10.0, 12.0, 14.0, 16.0],
            ExperimentKind::WidthSweep => (1..=10).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// One experiment: a scenario, a controller, a protocol and how many traces.
///
/// Spec files use the scenario `key = value` format. Besides the keys listed
/// on the fields below, any scenario key may appear and overrides the value
/// from `scenario`.
///
/// ```
/// use hetnet_drag::harness::{AgentKind, ExperimentSpec};
/// let spec: ExperimentSpec = "agent = ql\ndays = 30\ntraces = 2\nn_sbs = 6\n".parse().unwrap();
/// assert_eq!(spec.agent, AgentKind::Ql);
/// assert_eq!(spec.scenario.n_sbs, 6);
/// assert_eq!(spec.total_slots(), 30 * 48);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// `scenario = path`, resolved against the spec file's directory.
    pub scenario_path: Option<PathBuf>,
    pub scenario: ScenarioConfig,
    /// `agent`
    pub agent: AgentKind,
    /// `days`, or `slots` divided by the slots per day.
    pub days: usize,
    /// `traces`
    pub traces: usize,
    /// `seed`; trace `i` runs on `seed ^ i`.
    pub seed: u64,
    /// `experiment`
    pub experiment: ExperimentKind,
    /// `sweep = a, b, c`; empty means the experiment's default points.
    pub sweep: Vec<f64>,
    /// `shift_every_days`
    pub shift_every_days: usize,
    /// `walltime_secs`: traces still running after this long stop at the
    /// next day boundary and leave a checkpoint.
    pub walltime_secs: Option<f64>,
    /// `out`, resolved against the spec file's directory.
    pub out: Option<PathBuf>,
    /// `width_scale`, `k_train`, `refinement`, `history`, `distance`,
    /// `batch_size`, `replay_capacity`.
    pub drag: DragConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            scenario_path: None,
            scenario: ScenarioConfig::default(),
            agent: AgentKind::Drag,
            days: 416,
            traces: 20,
            seed: 0,
            experiment: ExperimentKind::Stationary,
            sweep: Vec::new(),
            shift_every_days: 100,
            walltime_secs: None,
            out: None,
            drag: DragConfig::default(),
        }
    }
}

fn bad_value(entry: &Entry) -> ConfigError {
    ConfigError::BadValue {
        line: entry.line,
        key: entry.key.clone(),
        value: entry.value.clone(),
    }
}

fn parse_with<T, E>(entry: &Entry, f: impl FnOnce(&str) -> Result<T, E>) -> Result<T, ConfigError> {
    f(&entry.value).map_err(|_| bad_value(entry))
}

impl ExperimentSpec {
    /// Reads a spec file; relative paths inside it are taken from its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_in(&text, path.parent().unwrap_or(Path::new("")))
    }

    /// Parses spec text with relative paths resolved against `base`.
    pub fn parse_in(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let entries = parse_entries(text)?;
        let mut spec = Self::default();
        let mut overrides = Vec::new();
        let mut slots = None;
        let mut days = None;
        for entry in &entries {
            match entry.key.as_str() {
                "scenario" => spec.scenario_path = Some(base.join(&entry.value)),
                "agent" => spec.agent = parse_with(entry, str::parse)?,
                "days" => days = Some((entry, parse_value::<usize>(entry)?)),
                "slots" => slots = Some((entry, parse_value::<usize>(entry)?)),
                "traces" => spec.traces = parse_value(entry)?,
                "seed" => spec.seed = parse_value(entry)?,
                "experiment" => spec.experiment = parse_with(entry, str::parse)?,
                "sweep" => {
                    spec.sweep = entry
                        .value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad_value(entry))?
                }
                "shift_every_days" => spec.shift_every_days = parse_value(entry)?,
                "walltime_secs" => spec.walltime_secs = Some(parse_value(entry)?),
                "out" => spec.out = Some(base.join(&entry.value)),
                "width_scale" => spec.drag.width_scale = parse_value(entry)?,
                "k_train" => spec.drag.k_train = parse_value(entry)?,
                "refinement" => spec.drag.refinement = parse_with(entry, str::parse::<Refinement>)?,
                "history" => spec.drag.history = parse_value(entry)?,
                "distance" => spec.drag.distance = parse_value(entry)?,
                "batch_size" => spec.drag.batch_size = parse_value(entry)?,
                "replay_capacity" => spec.drag.replay_capacity = parse_value(entry)?,
                _ => overrides.push(entry),
            }
        }

        let mut scenario = match &spec.scenario_path {
            Some(p) => ScenarioConfig::from_file(p)?,
            None => ScenarioConfig::default(),
        };
        for entry in overrides {
            if !scenario.apply(entry)? {
                return Err(ConfigError::UnknownKey {
                    line: entry.line,
                    key: entry.key.clone(),
                });
            }
        }
        scenario.validate()?;
        spec.scenario = scenario;

        match (days, slots) {
            (Some((d, _)), Some(_)) => {
                return Err(ConfigError::Invalid(format!(
                    "line {}: give either `days` or `slots`, not both",
                    d.line
                )))
            }
            (Some((_, d)), None) => spec.days = d,
            (None, Some((entry, s))) => {
                let per_day = spec.scenario.slots_per_day;
                if s % per_day != 0 {
                    return Err(ConfigError::Invalid(format!(
                        "line {}: {s} slots is not a whole number of {per_day}-slot days",
                        entry.line
                    )));
                }
                spec.days = s / per_day;
            }
            (None, None) => {}
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if self.days == 0 || self.traces == 0 {
            return fail("days and traces must be positive".into());
        }
        if self.shift_every_days == 0 {
            return fail("shift_every_days must be positive".into());
        }
        if let Some(w) = self.walltime_secs {
            if !(w > 0.0) {
                return fail("walltime_secs must be positive".into());
            }
        }
        if self.experiment == ExperimentKind::WidthSweep && self.agent != AgentKind::Drag {
            return fail(format!("width_sweep needs agent drag, got {}", self.agent));
        }
        for v in self.sweep_points() {
            match self.experiment {
                ExperimentKind::NoiseSweep if !(v >= 0.0) => {
                    return fail(format!("noise level {v} must be non-negative"))
                }
                ExperimentKind::ScaleSweep if !(v >= 1.0 && v.fract() == 0.0) => {
                    return fail(format!("small-cell count {v} must be a positive integer"))
                }
                ExperimentKind::WidthSweep if !(v > 0.0) => {
                    return fail(format!("width factor {v} must be positive"))
                }
                _ => {}
            }
        }
        self.drag.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn total_slots(&self) -> usize {
        self.days * self.scenario.slots_per_day
    }

    /// Sweep values, or a single `NaN` placeholder for unswept experiments.
    pub fn sweep_points(&self) -> Vec<f64> {
        match self.experiment {
            ExperimentKind::Stationary | ExperimentKind::PatternShift => vec![f64::NAN],
            kind if self.sweep.is_empty() => kind.default_sweep(),
            _ => self.sweep.clone(),
        }
    }

    /// Scenario and controller settings for one sweep point.
    pub fn point(&self, value: f64) -> (ScenarioConfig, DragConfig) {
        let mut scenario = self.scenario.clone();
        let mut drag = self.drag.clone();
        match self.experiment {
            ExperimentKind::Stationary | ExperimentKind::PatternShift => {}
            ExperimentKind::NoiseSweep => scenario.ou_sigma = value,
            ExperimentKind::ScaleSweep => scenario.n_sbs = value as usize,
            ExperimentKind::WidthSweep => drag.width_scale = value,
        }
        (scenario, drag)
    }

    /// Day indices (from 1) at which traffic is re-shaped.
    pub fn shifts_at(&self, day: usize) -> bool {
        self.experiment == ExperimentKind::PatternShift && day > 0 && day % self.shift_every_days == 0
    }
}

impl FromStr for ExperimentSpec {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        Self::parse_in(text, Path::new(""))
    }
}

/// The resolved spec, written next to the outputs.
impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agent = {}", self.agent)?;
        writeln!(f, "experiment = {}", self.experiment)?;
        writeln!(f, "days = {}", self.days)?;
        writeln!(f, "traces = {}", self.traces)?;
        writeln!(f, "seed = {}", self.seed)?;
        if !self.sweep.is_empty() {
            let v: Vec<String> = self.sweep.iter().map(f64::to_string).collect();
            writeln!(f, "sweep = {}", v.join(", "))?;
        }
        writeln!(f, "shift_every_days = {}", self.shift_every_days)?;
        if let Some(w) = self.walltime_secs {
            writeln!(f, "walltime_secs = {w}")?;
        }
        writeln!(f, "width_scale = {}", self.drag.width_scale)?;
        writeln!(f, "k_train = {}", self.drag.k_train)?;
        writeln!(f, "refinement = {}", self.drag.refinement.name())?;
        writeln!(f, "history = {}", self.drag.history)?;
        writeln!(f, "distance = {}", self.drag.distance)?;
        writeln!(f, "batch_size = {}", self.drag.batch_size)?;
        writeln!(f, "replay_capacity = {}", self.drag.replay_capacity)?;
        write!(f, "{}", self.scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let spec: ExperimentSpec = "".parse().unwrap();
        assert_eq!(spec.days, 416);
        assert_eq!(spec.traces, 20);
        assert_eq!(spec.agent, AgentKind::Drag);
        assert_eq!(spec.sweep_points().len(), 1);
    }

    #[test]
    fn slots_must_fill_days() {
        let spec: ExperimentSpec = "slots = 960".parse().unwrap();
        assert_eq!(spec.days, 20);
        let err = "slots = 20000".parse::<ExperimentSpec>().unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn errors_carry_lines() {
        let err = "days = 3\nagent = robot\n".parse::<ExperimentSpec>().unwrap_err();
        assert!(matches!(err, ConfigError::BadValue { line: 2, .. }), "{err:?}");
        let err = "\n\nwarp = 9\n".parse::<ExperimentSpec>().unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 3, .. }), "{err:?}");
        let err = "sweep = 1, x".parse::<ExperimentSpec>().unwrap_err();
        assert!(matches!(err, ConfigError::BadValue { line: 1, .. }));
    }

    #[test]
    fn sweeps_reach_their_field() {
        let spec: ExperimentSpec = "experiment = scale_sweep\nsweep = 6, 14".parse().unwrap();
        assert_eq!(spec.point(14.0).0.n_sbs, 14);
        let spec: ExperimentSpec = "experiment = noise_sweep".parse().unwrap();
        assert_eq!(spec.sweep_points().len(), 6);
        assert_eq!(spec.point(0.05).0.ou_sigma, 0.05);
        let spec: ExperimentSpec = "experiment = width_sweep".parse().unwrap();
        assert_eq!(spec.point(0.3).1.width_scale, 0.3);
        assert!("experiment = width_sweep\nagent = ql".parse::<ExperimentSpec>().is_err());
        assert!("experiment = scale_sweep\nsweep = 6.5".parse::<ExperimentSpec>().is_err());
    }

    #[test]
    fn shift_days() {
        let spec: ExperimentSpec = "experiment = pattern_shift_100d".parse().unwrap();
        assert!(!spec.shifts_at(0));
        assert!(spec.shifts_at(100));
        assert!(!spec.shifts_at(150));
        assert!(spec.shifts_at(400));
    }

    #[test]
    fn display_parses_back() {
        let spec: ExperimentSpec = "agent = tact_style\nexperiment = noise_sweep\nsweep = 0, 0.02\nn_sbs = 7\nk_train = 2\nrefinement = noise_only\nwalltime_secs = 5"
            .parse()
            .unwrap();
        let back: ExperimentSpec = spec.to_string().parse().unwrap();
        assert_eq!(back, spec);
    }
}
