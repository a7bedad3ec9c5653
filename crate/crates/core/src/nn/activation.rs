use std::fmt;
use std::str::FromStr;

/// Largest `f64` below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Softplus,
    Relu,
    Tanh,
    Sigmoid,
    Linear,
    /// `(tanh(x + 2) + 1) / 2`: a sigmoid-shaped head that already outputs
    /// about 0.98 at zero input, so a fresh actor starts close to all-on.
    ShiftedTanh,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => {
                if x > 0.0 {
                    x + (-x).exp().ln_1p()
                } else {
                    x.exp().ln_1p()
                }
            }
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Linear => x,
            // (tanh(z) + 1) / 2 == sigmoid(2z); clamped so the output stays
            // strictly inside (0, 1) in floating point
            Activation::ShiftedTanh => {
                sigmoid(2.0 * (x + 2.0)).clamp(f64::MIN_POSITIVE, BELOW_ONE)
            }
        }
    }

    /// Derivative at pre-activation `x`, given the output `y = apply(x)`.
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Softplus => sigmoid(x),
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Linear => 1.0,
            Activation::ShiftedTanh => {
                let s = sigmoid(2.0 * (x + 2.0));
                2.0 * s * (1.0 - s)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Softplus => "softplus",
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
            Activation::ShiftedTanh => "shifted_tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "softplus" => Activation::Softplus,
            "relu" => Activation::Relu,
            "tanh" => Activation::Tanh,
            "sigmoid" => Activation::Sigmoid,
            "linear" => Activation::Linear,
            "shifted_tanh" => Activation::ShiftedTanh,
            other => return Err(format!("unknown activation `{other}`")),
        })
    }
}
