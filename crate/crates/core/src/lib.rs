//! Deep-reinforcement-learning activation of small cells in a heterogeneous
//! cellular network.
//!
//! The crate is organised bottom-up:
//!
//! * [`env`] simulates stations, daily traffic and the slot cost.
//! * [`nn`] is a small dense-network engine with batch normalization and
//!   hand-written backpropagation.
//! * [`agent`] is the learning controller: arrival-rate predictor, cost
//!   estimator, actor and critic with target networks, and the neighbourhood
//!   action refinement that turns continuous actor outputs into on/off vectors.
//! * [`baselines`] holds static policies, tabular learners and the noncausal
//!   exhaustive-search bound.
//! * [`harness`] runs seeded multi-trace experiments and writes CSV/JSON.

pub mod agent;
pub mod baselines;
pub mod config;
pub mod env;
pub mod harness;
pub mod nn;
pub mod policy;

pub use config::ScenarioConfig;

/// The random stream type used everywhere; fixed so seeds reproduce across
/// platforms and releases.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Mixes a seed and a stream index into a well-spread 64-bit seed
/// (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
