use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use super::{Activation, NnError};

/// Added to variances before normalizing.
pub const BN_EPSILON: f64 = 1e-6;
pub const BN_MOMENTUM: f64 = 0.99;
/// Half-width of the uniform init of output layers.
pub const OUTPUT_INIT: f64 = 3e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Batch statistics, running statistics updated.
    Train,
    /// Running statistics, no side effects.
    Eval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub scale: Array1<f64>,
    pub offset: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
    pub momentum: f64,
}

impl BatchNorm {
    pub fn new(size: usize) -> Self {
        Self {
            scale: Array1::ones(size),
            offset: Array1::zeros(size),
            running_mean: Array1::zeros(size),
            running_var: Array1::ones(size),
            momentum: BN_MOMENTUM,
        }
    }
}

/// Dense layer `act(bn(x W^T + b))`; `bn` is optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `out x in`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
    pub batchnorm: Option<BatchNorm>,
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }
}

/// Shape of one layer when building a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub size: usize,
    pub activation: Activation,
    pub batchnorm: bool,
}

impl LayerSpec {
    pub fn new(size: usize, activation: Activation, batchnorm: bool) -> Self {
        Self {
            size,
            activation,
            batchnorm,
        }
    }
}

#[derive(Debug, Clone)]
struct LayerCache {
    input: Array2<f64>,
    normalized: Option<Array2<f64>>,
    inv_std: Option<Array1<f64>>,
    pre: Array2<f64>,
    output: Array2<f64>,
}

/// Intermediates of one forward pass, consumed by [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct Cache {
    mode: Mode,
    layers: Vec<LayerCache>,
}

impl Cache {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn output(&self) -> &Array2<f64> {
        &self.layers.last().expect("non-empty network").output
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub scale: Option<Array1<f64>>,
    pub offset: Option<Array1<f64>>,
}

/// Parameter gradients, layer by layer, in the same shapes as the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    /// All entries in [`Mlp::flat_params`] order.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in &self.layers {
            out.extend(g.weights.iter());
            out.extend(g.bias.iter());
            if let (Some(s), Some(o)) = (&g.scale, &g.offset) {
                out.extend(s.iter());
                out.extend(o.iter());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.flat().iter().all(|&g| g == 0.0)
    }
}

/// Multi-layer perceptron with optional batch normalization per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl Mlp {
    /// Random init: uniform in `±1/sqrt(fan_in)` for hidden layers and
    /// `±3e-3` for the output layer, biases included.
    pub fn new<R: Rng + ?Sized>(input_dim: usize, specs: &[LayerSpec], rng: &mut R) -> Self {
        assert!(!specs.is_empty(), "a network needs at least one layer");
        let mut layers = Vec::with_capacity(specs.len());
        let mut fan_in = input_dim;
        for (idx, spec) in specs.iter().enumerate() {
            let bound = if idx + 1 == specs.len() {
                OUTPUT_INIT
            } else {
                1.0 / (fan_in as f64).sqrt()
            };
            let weights = Array2::from_shape_fn((spec.size, fan_in), |_| rng.random_range(-bound..=bound));
            let bias = Array1::from_shape_fn(spec.size, |_| rng.random_range(-bound..=bound));
            layers.push(Layer {
                weights,
                bias,
                activation: spec.activation,
                batchnorm: spec.batchnorm.then(|| BatchNorm::new(spec.size)),
            });
            fan_in = spec.size;
        }
        Self { input_dim, layers }
    }

    /// Assembles a network from explicit layers, checking that sizes chain.
    pub fn from_layers(input_dim: usize, layers: Vec<Layer>) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::ShapeMismatch("no layers".into()));
        }
        let mut expected = input_dim;
        for (idx, layer) in layers.iter().enumerate() {
            if layer.input_dim() != expected || layer.bias.len() != layer.output_dim() {
                return Err(NnError::ShapeMismatch(format!("layer {idx} does not chain")));
            }
            if let Some(bn) = &layer.batchnorm {
                let n = layer.output_dim();
                let sizes = [bn.scale.len(), bn.offset.len(), bn.running_mean.len(), bn.running_var.len()];
                if sizes.iter().any(|&s| s != n) || bn.running_var.iter().any(|&v| !(v > 0.0)) {
                    return Err(NnError::ShapeMismatch(format!("layer {idx} batchnorm")));
                }
            }
            expected = layer.output_dim();
        }
        Ok(Self { input_dim, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Layer::output_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn has_batchnorm(&self) -> bool {
        self.layers.iter().any(|l| l.batchnorm.is_some())
    }

    fn check_input(&self, x: &ArrayView2<f64>, mode: Mode) -> Result<(), NnError> {
        if x.ncols() != self.input_dim {
            return Err(NnError::DimensionMismatch {
                expected: self.input_dim,
                found: x.ncols(),
            });
        }
        if mode == Mode::Train && self.has_batchnorm() && x.nrows() < 2 {
            return Err(NnError::BatchTooSmall(x.nrows()));
        }
        Ok(())
    }

    /// Forward pass shared by all entry points. In train mode the batch
    /// statistics of every normalized layer are returned for the caller to fold
    /// into the running averages.
    fn run(&self, x: ArrayView2<f64>, mode: Mode) -> (Cache, Vec<(Array1<f64>, Array1<f64>)>) {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut batch_stats = Vec::new();
        let mut input = x.to_owned();
        for layer in &self.layers {
            let mut z = input.dot(&layer.weights.t());
            z += &layer.bias;
            let (pre, normalized, inv_std) = match &layer.batchnorm {
                None => (z, None, None),
                Some(bn) => {
                    let (mean, var) = match mode {
                        Mode::Train => {
                            let mean = z.mean_axis(Axis(0)).expect("non-empty batch");
                            let var = (&z - &mean).mapv(|d| d * d).mean_axis(Axis(0)).expect("non-empty batch");
                            batch_stats.push((mean.clone(), var.clone()));
                            (mean, var)
                        }
                        Mode::Eval => (bn.running_mean.clone(), bn.running_var.clone()),
                    };
                    let inv_std = var.mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
                    let xhat = (z - &mean) * &inv_std;
                    let pre = &xhat * &bn.scale + &bn.offset;
                    (pre, Some(xhat), Some(inv_std))
                }
            };
            let act = layer.activation;
            let output = pre.mapv(|v| act.apply(v));
            let next = output.clone();
            caches.push(LayerCache {
                input,
                normalized,
                inv_std,
                pre,
                output,
            });
            input = next;
        }
        (Cache { mode, layers: caches }, batch_stats)
    }

    /// Forward pass returning outputs and the cache needed for backprop. Train
    /// mode normalizes with batch statistics and updates the running ones.
    pub fn forward(&mut self, x: ArrayView2<f64>, mode: Mode) -> Result<(Array2<f64>, Cache), NnError> {
        self.check_input(&x, mode)?;
        let (cache, stats) = self.run(x, mode);
        if mode == Mode::Train {
            let n = x.nrows() as f64;
            let mut stats = stats.into_iter();
            for layer in &mut self.layers {
                if let Some(bn) = &mut layer.batchnorm {
                    let (mean, var) = stats.next().expect("one entry per normalized layer");
                    let m = bn.momentum;
                    bn.running_mean = &bn.running_mean * m + &(mean * (1.0 - m));
                    bn.running_var = &bn.running_var * m + &(var * ((1.0 - m) * n / (n - 1.0)));
                }
            }
        }
        Ok((cache.output().clone(), cache))
    }

    /// Eval-mode forward pass with a cache, for gradients through a network
    /// that is not itself being trained.
    pub fn forward_eval(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, Cache), NnError> {
        self.check_input(&x, Mode::Eval)?;
        let (cache, _) = self.run(x, Mode::Eval);
        Ok((cache.output().clone(), cache))
    }

    /// Eval-mode outputs only.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, NnError> {
        self.forward_eval(x).map(|(out, _)| out)
    }

    /// Backpropagates `upstream` (d loss / d output) through the cached pass.
    /// Returns parameter gradients and d loss / d input.
    pub fn backward(&self, cache: &Cache, upstream: ArrayView2<f64>) -> Result<(Gradients, Array2<f64>), NnError> {
        if cache.layers.len() != self.layers.len() {
            return Err(NnError::StaleCache("layer count".into()));
        }
        for (idx, (layer, lc)) in self.layers.iter().zip(&cache.layers).enumerate() {
            if lc.input.ncols() != layer.input_dim()
                || lc.pre.ncols() != layer.output_dim()
                || lc.normalized.is_some() != layer.batchnorm.is_some()
            {
                return Err(NnError::StaleCache(format!("layer {idx}")));
            }
        }
        if upstream.dim() != cache.output().dim() {
            return Err(NnError::StaleCache(format!(
                "upstream {:?} vs output {:?}",
                upstream.dim(),
                cache.output().dim()
            )));
        }

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut g = upstream.to_owned();
        for (layer, lc) in self.layers.iter().zip(&cache.layers).rev() {
            let act = layer.activation;
            let mut dpre = g;
            Zip::from(&mut dpre)
                .and(&lc.pre)
                .and(&lc.output)
                .for_each(|d, &x, &y| *d *= act.derivative(x, y));

            let (dz, dscale, doffset) = match (&layer.batchnorm, &lc.normalized, &lc.inv_std) {
                (Some(bn), Some(xhat), Some(inv_std)) => {
                    let dscale = (&dpre * xhat).sum_axis(Axis(0));
                    let doffset = dpre.sum_axis(Axis(0));
                    let dxhat = dpre * &bn.scale;
                    let dz = match cache.mode {
                        Mode::Eval => dxhat * inv_std,
                        Mode::Train => {
                            let n = dxhat.nrows() as f64;
                            let sum_dxhat = dxhat.sum_axis(Axis(0));
                            let sum_dxhat_xhat = (&dxhat * xhat).sum_axis(Axis(0));
                            let mut dz = dxhat * n - &sum_dxhat - &(xhat * &sum_dxhat_xhat);
                            dz *= &(inv_std / n);
                            dz
                        }
                    };
                    (dz, Some(dscale), Some(doffset))
                }
                _ => (dpre, None, None),
            };

            grads.push(LayerGrad {
                weights: dz.t().dot(&lc.input),
                bias: dz.sum_axis(Axis(0)),
                scale: dscale,
                offset: doffset,
            });
            g = dz.dot(&layer.weights);
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, g))
    }

    fn check_grad_shapes(&self, grads: &Gradients) -> Result<(), NnError> {
        let ok = grads.layers.len() == self.layers.len()
            && self.layers.iter().zip(&grads.layers).all(|(l, g)| {
                g.weights.dim() == l.weights.dim()
                    && g.bias.len() == l.bias.len()
                    && g.scale.is_some() == l.batchnorm.is_some()
            });
        if ok {
            Ok(())
        } else {
            Err(NnError::ShapeMismatch("gradients do not match network".into()))
        }
    }

    /// Plain gradient descent on every trainable parameter. Running
    /// statistics are left alone.
    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64) -> Result<(), NnError> {
        self.check_grad_shapes(grads)?;
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            layer.weights.scaled_add(-lr, &g.weights);
            layer.bias.scaled_add(-lr, &g.bias);
            if let (Some(bn), Some(ds), Some(doff)) = (&mut layer.batchnorm, &g.scale, &g.offset) {
                bn.scale.scaled_add(-lr, ds);
                bn.offset.scaled_add(-lr, doff);
            }
        }
        Ok(())
    }

    fn same_shape(&self, other: &Mlp) -> bool {
        self.input_dim == other.input_dim
            && self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.weights.dim() == b.weights.dim()
                    && a.activation == b.activation
                    && a.batchnorm.is_some() == b.batchnorm.is_some()
            })
    }

    /// Moves `self` towards `online`: `self <- tau * online + (1 - tau) * self`
    /// for weights, biases, and normalization scale and offset. Running
    /// statistics are copied.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) -> Result<(), NnError> {
        if !self.same_shape(online) {
            return Err(NnError::ShapeMismatch("target and online networks differ".into()));
        }
        let blend = |target: &mut f64, &src: &f64| *target = tau * src + (1.0 - tau) * *target;
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            Zip::from(&mut t.weights).and(&o.weights).for_each(blend);
            Zip::from(&mut t.bias).and(&o.bias).for_each(blend);
            if let (Some(tb), Some(ob)) = (&mut t.batchnorm, &o.batchnorm) {
                Zip::from(&mut tb.scale).and(&ob.scale).for_each(blend);
                Zip::from(&mut tb.offset).and(&ob.offset).for_each(blend);
                tb.running_mean.assign(&ob.running_mean);
                tb.running_var.assign(&ob.running_var);
            }
        }
        Ok(())
    }

    /// Trainable parameters in a fixed order: per layer, weights row-major,
    /// bias, then normalization scale and offset.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
            if let Some(bn) = &l.batchnorm {
                out.extend(bn.scale.iter());
                out.extend(bn.offset.iter());
            }
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<(), NnError> {
        if params.len() != self.n_params() {
            return Err(NnError::ShapeMismatch(format!(
                "{} values for {} parameters",
                params.len(),
                self.n_params()
            )));
        }
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w = it.next().unwrap());
            l.bias.iter_mut().for_each(|b| *b = it.next().unwrap());
            if let Some(bn) = &mut l.batchnorm {
                bn.scale.iter_mut().for_each(|s| *s = it.next().unwrap());
                bn.offset.iter_mut().for_each(|o| *o = it.next().unwrap());
            }
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len() + l.batchnorm.as_ref().map_or(0, |bn| 2 * bn.scale.len()))
            .sum()
    }
}
