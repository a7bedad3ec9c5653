//! Scenario constants and the flat `key = value` file format they are read from.
//!
//! A scenario file looks like this:
//!
//! ```text
//! # ten small cells around one macro cell
//! n_sbs = 10
//! capacity_ratio = 4
//! ou_sigma = 0.03
//! ```
//!
//! Keys are exactly the [`ScenarioConfig`] field names. Unknown keys and
//! malformed values are reported with their line number.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` appears more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// One parsed `key = value` entry together with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits a key-value document into entries. `#` starts a comment anywhere on
/// a line; blank lines are skipped.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(entries)
}

/// Parses `entry.value` as `T`, mapping failures to [`ConfigError::BadValue`].
pub fn parse_value<T: FromStr>(entry: &Entry) -> Result<T, ConfigError> {
    entry.value.parse().map_err(|_| ConfigError::BadValue {
        line: entry.line,
        key: entry.key.clone(),
        value: entry.value.clone(),
    })
}

/// Physical and traffic constants of one simulated network.
///
/// Powers are in watts, distances in meters, arrival rates in units of one
/// small cell's capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_mbs: usize,
    pub n_sbs: usize,
    pub sbs_const_power: f64,
    pub sbs_load_power: f64,
    pub mbs_load_power: f64,
    pub mbs_const_power: f64,
    pub sbs_sleep_power: f64,
    /// Weight of the delay cost, per unit of `rho / (1 - rho)`.
    pub beta_d: f64,
    /// Cost of switching one small cell on.
    pub beta_s: f64,
    pub gamma: f64,
    pub slots_per_day: usize,
    /// Macro capacity over small-cell capacity.
    pub capacity_ratio: f64,
    /// Largest load any station can reach; keeps the delay cost finite.
    pub load_cap: f64,
    pub mbs_radius_m: f64,
    pub sbs_radius_m: f64,
    pub sbs_min_dist_m: f64,
    /// Candidate draws per small cell before placement gives up.
    pub placement_retries: usize,
    pub scale_min: f64,
    pub scale_max: f64,
    /// Daily-pattern shifts are drawn from `[-shift_max, shift_max]` slots.
    pub shift_max: i64,
    pub mbs_own_scale: f64,
    pub ou_theta: f64,
    pub ou_sigma: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_mbs: 1,
            n_sbs: 10,
            sbs_const_power: 160.0,
            sbs_load_power: 216.0,
            mbs_load_power: 1080.0,
            mbs_const_power: 780.0,
            sbs_sleep_power: 0.0,
            beta_d: 50.0,
            beta_s: 100.0,
            gamma: 0.9,
            slots_per_day: 48,
            capacity_ratio: 4.0,
            load_cap: 0.99,
            mbs_radius_m: 1000.0,
            sbs_radius_m: 100.0,
            sbs_min_dist_m: 200.0,
            placement_retries: 10_000,
            scale_min: 0.6,
            scale_max: 1.0,
            shift_max: 8,
            mbs_own_scale: 1.0,
            ou_theta: 0.05,
            ou_sigma: 0.03,
        }
    }
}

macro_rules! scenario_keys {
    ($($field:ident),* $(,)?) => {
        /// Every key accepted in a scenario file.
        pub const SCENARIO_KEYS: &[&str] = &[$(stringify!($field)),*];

        impl ScenarioConfig {
            /// Applies one entry; `Ok(false)` if the key is not a scenario key.
            pub fn apply(&mut self, entry: &Entry) -> Result<bool, ConfigError> {
                match entry.key.as_str() {
                    $(stringify!($field) => self.$field = parse_value(entry)?,)*
                    _ => return Ok(false),
                }
                Ok(true)
            }

            fn write_fields(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(writeln!(f, "{} = {}", stringify!($field), self.$field)?;)*
                Ok(())
            }
        }
    };
}

scenario_keys!(
    n_mbs,
    n_sbs,
    sbs_const_power,
    sbs_load_power,
    mbs_load_power,
    mbs_const_power,
    sbs_sleep_power,
    beta_d,
    beta_s,
    gamma,
    slots_per_day,
    capacity_ratio,
    load_cap,
    mbs_radius_m,
    sbs_radius_m,
    sbs_min_dist_m,
    placement_retries,
    scale_min,
    scale_max,
    shift_max,
    mbs_own_scale,
    ou_theta,
    ou_sigma,
);

impl ScenarioConfig {
    /// Total number of base stations, macro cells first.
    pub fn n_bs(&self) -> usize {
        self.n_mbs + self.n_sbs
    }

    pub fn from_entries(entries: &[Entry]) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for entry in entries {
            if !config.apply(entry)? {
                return Err(ConfigError::UnknownKey {
                    line: entry.line,
                    key: entry.key.clone(),
                });
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        let powers = [
            self.sbs_const_power,
            self.sbs_load_power,
            self.mbs_load_power,
            self.mbs_const_power,
            self.sbs_sleep_power,
        ];
        if powers.iter().any(|p| !(*p >= 0.0)) {
            return fail("powers must be non-negative");
        }
        if self.n_mbs == 0 {
            return fail("at least one macro cell is required");
        }
        if !(self.load_cap > 0.0 && self.load_cap < 1.0) {
            return fail("load_cap must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail("gamma must lie in [0, 1]");
        }
        if !(self.capacity_ratio > 0.0) {
            return fail("capacity_ratio must be positive");
        }
        if self.sbs_min_dist_m > 2.0 * self.mbs_radius_m {
            return fail("sbs_min_dist_m cannot exceed the macro-cell diameter");
        }
        if self.slots_per_day == 0 {
            return fail("slots_per_day must be positive");
        }
        if !(self.beta_d >= 0.0 && self.beta_s >= 0.0) {
            return fail("penalty weights must be non-negative");
        }
        if !(0.0 < self.scale_min && self.scale_min <= self.scale_max) {
            return fail("need 0 < scale_min <= scale_max");
        }
        if self.shift_max < 0 {
            return fail("shift_max must be non-negative");
        }
        if !(self.ou_theta >= 0.0 && self.ou_sigma >= 0.0 && self.mbs_own_scale >= 0.0) {
            return fail("traffic parameters must be non-negative");
        }
        Ok(())
    }
}

impl FromStr for ScenarioConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        Self::from_entries(&parse_entries(text)?)
    }
}

/// Writes the config back in scenario-file form; parsing the output yields an
/// equal config.
impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_fields(f)
    }
}
