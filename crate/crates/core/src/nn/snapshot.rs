//! Line-oriented text snapshot of a network.
//!
//! Floats are stored as the hex of their IEEE-754 bits so a round trip is
//! exact. Layout:
//!
//! ```text
//! mlp-snapshot v1
//! input 3
//! layers 2
//! layer 5 3 softplus bn
//! w <hex> <hex> <hex>        (one line per output row)
//! b <hex> ...
//! bn_scale ... / bn_offset ... / bn_mean ... / bn_var ... / bn_momentum <hex>
//! layer 2 5 shifted_tanh -
//! ...
//! ```

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use super::{Activation, BatchNorm, Layer, Mlp, NnError};

pub const SNAPSHOT_HEADER: &str = "mlp-snapshot v1";

pub(crate) fn float_line(out: &mut String, tag: &str, values: impl IntoIterator<Item = f64>) {
    out.push_str(tag);
    for v in values {
        let _ = write!(out, " {:016x}", v.to_bits());
    }
    out.push('\n');
}

/// Reads lines one at a time and reports errors with their line number.
pub(crate) struct LineReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: usize,
}

impl<'a> LineReader<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            current: 0,
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> NnError {
        NnError::Snapshot {
            line: self.current,
            message: message.into(),
        }
    }

    pub(crate) fn next_line(&mut self) -> Result<&'a str, NnError> {
        match self.lines.next() {
            Some((idx, line)) => {
                self.current = idx + 1;
                Ok(line)
            }
            None => Err(self.error("unexpected end of snapshot")),
        }
    }

    /// Next line, which must start with `tag`; returns the remaining fields.
    pub(crate) fn tagged(&mut self, tag: &str) -> Result<Vec<&'a str>, NnError> {
        let line = self.next_line()?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(tag) {
            return Err(self.error(format!("expected `{tag}`")));
        }
        Ok(fields.collect())
    }

    pub(crate) fn usize_field(&mut self, tag: &str) -> Result<usize, NnError> {
        let fields = self.tagged(tag)?;
        match fields.as_slice() {
            [v] => v.parse().map_err(|_| self.error(format!("bad count `{v}`"))),
            _ => Err(self.error(format!("`{tag}` takes one value"))),
        }
    }

    pub(crate) fn floats(&mut self, tag: &str, n: usize) -> Result<Vec<f64>, NnError> {
        let fields = self.tagged(tag)?;
        if fields.len() != n {
            return Err(self.error(format!("`{tag}` has {} values, expected {n}", fields.len())));
        }
        fields
            .iter()
            .map(|f| {
                u64::from_str_radix(f, 16)
                    .map(f64::from_bits)
                    .map_err(|_| self.error(format!("bad float bits `{f}`")))
            })
            .collect()
    }
}

impl Mlp {
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        out.push_str(SNAPSHOT_HEADER);
        out.push('\n');
        let _ = writeln!(out, "input {}", self.input_dim());
        let _ = writeln!(out, "layers {}", self.layers().len());
        for layer in self.layers() {
            let _ = writeln!(
                out,
                "layer {} {} {} {}",
                layer.output_dim(),
                layer.input_dim(),
                layer.activation,
                if layer.batchnorm.is_some() { "bn" } else { "-" }
            );
            for row in layer.weights.rows() {
                float_line(&mut out, "w", row.iter().copied());
            }
            float_line(&mut out, "b", layer.bias.iter().copied());
            if let Some(bn) = &layer.batchnorm {
                float_line(&mut out, "bn_scale", bn.scale.iter().copied());
                float_line(&mut out, "bn_offset", bn.offset.iter().copied());
                float_line(&mut out, "bn_mean", bn.running_mean.iter().copied());
                float_line(&mut out, "bn_var", bn.running_var.iter().copied());
                float_line(&mut out, "bn_momentum", [bn.momentum]);
            }
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self, NnError> {
        let mut reader = LineReader::new(text);
        Self::read_snapshot(&mut reader)
    }

    pub(crate) fn read_snapshot(r: &mut LineReader<'_>) -> Result<Self, NnError> {
        if r.next_line()?.trim() != SNAPSHOT_HEADER {
            return Err(r.error(format!("expected `{SNAPSHOT_HEADER}`")));
        }
        let input_dim = r.usize_field("input")?;
        let n_layers = r.usize_field("layers")?;
        let mut layers = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            let head = r.tagged("layer")?;
            let [out, inp, act, bn] = head.as_slice() else {
                return Err(r.error("`layer` takes four fields"));
            };
            let out: usize = out.parse().map_err(|_| r.error("bad layer size"))?;
            let inp: usize = inp.parse().map_err(|_| r.error("bad layer size"))?;
            let activation: Activation = act.parse().map_err(|e: String| r.error(e))?;
            let has_bn = match *bn {
                "bn" => true,
                "-" => false,
                other => return Err(r.error(format!("bad batchnorm flag `{other}`"))),
            };
            let mut weights = Vec::with_capacity(out * inp);
            for _ in 0..out {
                weights.extend(r.floats("w", inp)?);
            }
            let weights = Array2::from_shape_vec((out, inp), weights).expect("row count checked");
            let bias = Array1::from(r.floats("b", out)?);
            let batchnorm = if has_bn {
                Some(BatchNorm {
                    scale: Array1::from(r.floats("bn_scale", out)?),
                    offset: Array1::from(r.floats("bn_offset", out)?),
                    running_mean: Array1::from(r.floats("bn_mean", out)?),
                    running_var: Array1::from(r.floats("bn_var", out)?),
                    momentum: r.floats("bn_momentum", 1)?[0],
                })
            } else {
                None
            };
            layers.push(Layer {
                weights,
                bias,
                activation,
                batchnorm,
            });
        }
        Mlp::from_layers(input_dim, layers).map_err(|e| r.error(e.to_string()))
    }
}
