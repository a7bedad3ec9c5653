//! Dense networks with hand-written backpropagation.
//!
//! Just enough machinery for the controller's four networks: fully connected
//! layers, optional batch normalization, a handful of activations, plain
//! gradient descent, soft target updates and a bit-exact text snapshot.
//!
//! ```
//! use hetnet_drag::nn::{Activation, LayerSpec, Mlp, Mode};
//! use ndarray::array;
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
//! let mut net = Mlp::new(
//!     2,
//!     &[
//!         LayerSpec::new(8, Activation::Tanh, true),
//!         LayerSpec::new(1, Activation::Linear, false),
//!     ],
//!     &mut rng,
//! );
//! let x = array![[0.1, 0.2], [0.3, -0.4], [1.0, 0.0]];
//! let target = array![[1.0], [0.0], [0.5]];
//! let (out, cache) = net.forward(x.view(), Mode::Train).unwrap();
//! // d/d out of the mean squared error
//! let upstream = (&out - &target) * (2.0 / 3.0);
//! let (grads, _) = net.backward(&cache, upstream.view()).unwrap();
//! net.sgd_step(&grads, 0.01).unwrap();
//! ```

mod activation;
mod mlp;
mod snapshot;

pub use activation::Activation;
pub use mlp::{
    BatchNorm, Cache, Gradients, Layer, LayerGrad, LayerSpec, Mlp, Mode, BN_EPSILON, BN_MOMENTUM,
    OUTPUT_INIT,
};
pub use snapshot::SNAPSHOT_HEADER;
pub(crate) use snapshot::{float_line, LineReader};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("input has {found} columns, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("batch normalization needs at least 2 rows in train mode, got {0}")]
    BatchTooSmall(usize),
    #[error("cache does not belong to this network: {0}")]
    StaleCache(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
}

/// Linear decay from `upper` to `lower` over `horizon` slots, then constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSchedule {
    pub upper: f64,
    pub lower: f64,
    pub horizon: u64,
}

impl LinearSchedule {
    pub const fn new(upper: f64, lower: f64, horizon: u64) -> Self {
        Self {
            upper,
            lower,
            horizon,
        }
    }

    /// A schedule that never moves.
    pub const fn constant(value: f64) -> Self {
        Self::new(value, value, 0)
    }

    /// ```
    /// use hetnet_drag::nn::LinearSchedule;
    /// let noise = LinearSchedule::new(0.5, 0.05, 10_000);
    /// assert_eq!(noise.value(0), 0.5);
    /// assert!((noise.value(5_000) - 0.275).abs() < 1e-12);
    /// assert_eq!(noise.value(10_000), 0.05);
    /// assert_eq!(noise.value(1_000_000), 0.05);
    /// ```
    pub fn value(&self, t: u64) -> f64 {
        if t >= self.horizon {
            return self.lower;
        }
        let frac = t as f64 / self.horizon as f64;
        self.upper - (self.upper - self.lower) * frac
    }
}

/// Damps an action gradient near the bounds `[lo, hi]` of the action.
///
/// `grad` is the gradient of the loss being minimized, so a negative entry
/// pushes the action up. Upward pushes are scaled by the remaining headroom
/// `(hi - a) / (hi - lo)`, downward ones by `(a - lo) / (hi - lo)`. Signs are
/// preserved and the result vanishes when pushing against a bound.
///
/// ```
/// use hetnet_drag::nn::grad_inverse;
/// assert_eq!(grad_inverse(&[-1.0], &[1.0], 0.0, 1.0), vec![0.0]);
/// assert_eq!(grad_inverse(&[-1.0, 1.0], &[0.5, 0.5], 0.0, 1.0), vec![-0.5, 0.5]);
/// assert_eq!(grad_inverse(&[1.0], &[0.0], 0.0, 1.0), vec![0.0]);
/// ```
pub fn grad_inverse(grad: &[f64], action: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    assert_eq!(grad.len(), action.len());
    let width = hi - lo;
    grad.iter()
        .zip(action)
        .map(|(&g, &a)| {
            if g < 0.0 {
                g * (hi - a) / width
            } else {
                g * (a - lo) / width
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn schedule_examples() {
        let s = LinearSchedule::new(0.5, 0.05, 10_000);
        assert_eq!(s.value(0), 0.5);
        assert_eq!(s.value(10_000), 0.05);
        assert!((s.value(5_000) - 0.275).abs() < 1e-15);
        assert_eq!(LinearSchedule::constant(3.0).value(0), 3.0);
    }

    #[test]
    fn grad_inverse_examples() {
        assert_eq!(grad_inverse(&[-2.0], &[1.0], 0.0, 1.0), vec![0.0]);
        assert_eq!(grad_inverse(&[3.0], &[0.0], 0.0, 1.0), vec![0.0]);
        assert_eq!(grad_inverse(&[-2.0, 2.0], &[0.5, 0.5], 0.0, 1.0), vec![-1.0, 1.0]);
    }

    proptest! {
        #[test]
        fn schedule_is_monotone(upper in 0.0f64..10.0, drop in 0.0f64..10.0, t in 0u64..20_000) {
            let s = LinearSchedule::new(upper, upper - drop, 10_000);
            prop_assert!(s.value(t + 1) <= s.value(t));
            prop_assert!(s.value(t) >= s.lower && s.value(t) <= s.upper);
        }

        #[test]
        fn grad_inverse_preserves_sign_and_damps(g in -5.0f64..5.0, a in 0.0f64..=1.0) {
            let out = grad_inverse(&[g], &[a], 0.0, 1.0)[0];
            prop_assert!(out * g >= 0.0);
            prop_assert!(out.abs() <= g.abs());
        }
    }
}
