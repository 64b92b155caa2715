//! Fully connected `tanh` network `(x, t) -> u` with a linear output layer.
//!
//! Inputs are mapped affinely from the problem window onto `[-1, 1]^2`
//! before the first layer; the map is fixed, not trained.
//!
//! # Checkpoint format
//!
//! Plain text, one record per line, floats written with 17 significant
//! digits so they read back bit-exactly:
//!
//! ```text
//! hyperlab-mlp v1
//! layer_sizes 2 40 40 40 40 40 40 40 40 40 1
//! input_bounds <x_min> <x_max> <t_min> <t_max>
//! weights <layer> <rows> <cols>
//! <row 0: cols values>
//! ...
//! bias <layer> <rows>
//! <rows values>
//! ...
//! ```
//!
//! Layers are numbered from 0 (input to first hidden layer); weight matrices
//! are row-major with one output neuron per row.

use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet, Scalar};
use crate::problems::ConservationLawProblem;
use crate::{Error, Result};

pub const HIDDEN_LAYERS: usize = 9;

const CHECKPOINT_MAGIC: &str = "hyperlab-mlp v1";

/// Rectangle mapped onto `[-1, 1]^2` before the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl InputBounds {
    pub fn from_problem(problem: &ConservationLawProblem) -> Self {
        InputBounds {
            x_min: problem.x_min,
            x_max: problem.x_max,
            t_min: 0.0,
            t_max: problem.t_end,
        }
    }

    /// Identity map: the network sees raw `(x, t)`.
    pub fn identity() -> Self {
        InputBounds {
            x_min: -1.0,
            x_max: 1.0,
            t_min: -1.0,
            t_max: 1.0,
        }
    }

    pub fn x_scale(&self) -> f64 {
        2.0 / (self.x_max - self.x_min)
    }

    pub fn t_scale(&self) -> f64 {
        2.0 / (self.t_max - self.t_min)
    }

    pub fn normalize(&self, x: f64, t: f64) -> (f64, f64) {
        (
            (x - self.x_min) * self.x_scale() - 1.0,
            (t - self.t_min) * self.t_scale() - 1.0,
        )
    }
}

/// Layer dimensions and every weight and bias, stored contiguously.
///
/// Layer `l` occupies a weight block of `sizes[l+1] x sizes[l]` (row-major)
/// followed by a bias block of `sizes[l+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    layer_sizes: Vec<usize>,
    bounds: InputBounds,
    values: Vec<f64>,
}

impl MlpParams {
    /// All-zero parameters for the given layer sizes.
    pub fn zeros(layer_sizes: Vec<usize>, bounds: InputBounds) -> Result<Self> {
        if layer_sizes.len() < 2
            || layer_sizes[0] != 2
            || *layer_sizes.last().unwrap() != 1
            || layer_sizes.contains(&0)
        {
            return Err(Error::InvalidConfig(format!(
                "layer sizes must run from 2 inputs to 1 output with no empty layer, got {layer_sizes:?}"
            )));
        }
        if !(bounds.x_min < bounds.x_max && bounds.t_min < bounds.t_max) {
            return Err(Error::InvalidConfig(format!(
                "degenerate input bounds {bounds:?}"
            )));
        }
        let count = layer_sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        Ok(MlpParams {
            layer_sizes,
            bounds,
            values: vec![0.0; count],
        })
    }

    /// Standard architecture: nine hidden layers of `width` neurons.
    pub fn architecture(width: usize) -> Vec<usize> {
        let mut sizes = vec![2];
        sizes.extend(std::iter::repeat_n(width, HIDDEN_LAYERS));
        sizes.push(1);
        sizes
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn bounds(&self) -> &InputBounds {
        &self.bounds
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Offsets of the weight and bias blocks of `layer` in the flat vector.
    pub fn layer_offsets(&self, layer: usize) -> LayerOffsets {
        layer_offsets(&self.layer_sizes, layer)
    }

    /// Sets the output bias. Handy for building constant networks.
    pub fn set_output_bias(&mut self, value: f64) {
        let last = self.layer_offsets(self.num_layers() - 1);
        self.values[last.bias] = value;
    }

    /// Network value and input derivatives at `(x, t)`.
    pub fn dual_propagate(&self, x: f64, t: f64) -> Jet {
        jet_forward(&self.layer_sizes, &self.bounds, &self.values, x, t)
    }

    /// Plain forward value at `(x, t)`.
    pub fn forward(&self, x: f64, t: f64) -> f64 {
        let (xi, tau) = self.bounds.normalize(x, t);
        let mut act = vec![xi, tau];
        let layers = self.num_layers();
        for l in 0..layers {
            let off = self.layer_offsets(l);
            let w = &self.values[off.weights..off.bias];
            let b = &self.values[off.bias..off.bias + off.rows];
            let mut next: Vec<f64> = (0..off.rows)
                .map(|i| {
                    let row = &w[i * off.cols..(i + 1) * off.cols];
                    b[i] + row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>()
                })
                .collect();
            if l + 1 < layers {
                next.iter_mut().for_each(|v| *v = v.tanh());
            }
            act = next;
        }
        act[0]
    }

    /// Forward values at many points.
    pub fn predict(&self, points: &[(f64, f64)]) -> Vec<f64> {
        points.iter().map(|&(x, t)| self.forward(x, t)).collect()
    }

    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CHECKPOINT_MAGIC}").unwrap();
        let sizes: Vec<String> = self.layer_sizes.iter().map(|s| s.to_string()).collect();
        writeln!(out, "layer_sizes {}", sizes.join(" ")).unwrap();
        let b = &self.bounds;
        writeln!(
            out,
            "input_bounds {:.16e} {:.16e} {:.16e} {:.16e}",
            b.x_min, b.x_max, b.t_min, b.t_max
        )
        .unwrap();
        let line = |vals: &[f64]| {
            vals.iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for l in 0..self.num_layers() {
            let off = self.layer_offsets(l);
            writeln!(out, "weights {l} {} {}", off.rows, off.cols).unwrap();
            for i in 0..off.rows {
                let start = off.weights + i * off.cols;
                writeln!(out, "{}", line(&self.values[start..start + off.cols])).unwrap();
            }
            writeln!(out, "bias {l} {}", off.rows).unwrap();
            writeln!(out, "{}", line(&self.values[off.bias..off.bias + off.rows])).unwrap();
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("checkpoint: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(CHECKPOINT_MAGIC) {
            return Err(bad("missing header line"));
        }
        let header = |lines: &mut dyn Iterator<Item = &str>, key: &str| -> Result<Vec<String>> {
            let line = lines.next().ok_or_else(|| bad("truncated"))?;
            let mut words = line.split_whitespace();
            if words.next() != Some(key) {
                return Err(bad(&format!("expected `{key}` record, found `{line}`")));
            }
            Ok(words.map(str::to_string).collect())
        };
        let parse_f64 = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
        let parse_usize =
            |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad count `{s}`")));

        let sizes = header(&mut lines, "layer_sizes")?
            .iter()
            .map(|s| parse_usize(s))
            .collect::<Result<Vec<_>>>()?;
        let b = header(&mut lines, "input_bounds")?
            .iter()
            .map(|s| parse_f64(s))
            .collect::<Result<Vec<_>>>()?;
        if b.len() != 4 {
            return Err(bad("input_bounds needs four values"));
        }
        let bounds = InputBounds {
            x_min: b[0],
            x_max: b[1],
            t_min: b[2],
            t_max: b[3],
        };
        let mut params = MlpParams::zeros(sizes, bounds)?;
        let data_line = |lines: &mut dyn Iterator<Item = &str>, n: usize| -> Result<Vec<f64>> {
            let line = lines.next().ok_or_else(|| bad("truncated"))?;
            let vals = line
                .split_whitespace()
                .map(parse_f64)
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != n {
                return Err(bad(&format!("expected {n} values, found {}", vals.len())));
            }
            Ok(vals)
        };
        for l in 0..params.num_layers() {
            let off = params.layer_offsets(l);
            let dims = header(&mut lines, "weights")?;
            if dims != [l.to_string(), off.rows.to_string(), off.cols.to_string()] {
                return Err(bad(&format!("weights record for layer {l} has dims {dims:?}")));
            }
            for i in 0..off.rows {
                let row = data_line(&mut lines, off.cols)?;
                let start = off.weights + i * off.cols;
                params.values[start..start + off.cols].copy_from_slice(&row);
            }
            let dims = header(&mut lines, "bias")?;
            if dims != [l.to_string(), off.rows.to_string()] {
                return Err(bad(&format!("bias record for layer {l} has dims {dims:?}")));
            }
            let bias = data_line(&mut lines, off.rows)?;
            params.values[off.bias..off.bias + off.rows].copy_from_slice(&bias);
        }
        if lines.next().is_some() {
            return Err(bad("trailing data"));
        }
        Ok(params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_checkpoint())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&std::fs::read_to_string(path)?)
    }
}

/// Location of one layer's blocks in the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerOffsets {
    pub weights: usize,
    pub bias: usize,
    pub rows: usize,
    pub cols: usize,
}

pub(crate) fn layer_offsets(sizes: &[usize], layer: usize) -> LayerOffsets {
    let start: usize = sizes[..=layer]
        .windows(2)
        .map(|w| w[1] * (w[0] + 1))
        .sum();
    let (cols, rows) = (sizes[layer], sizes[layer + 1]);
    LayerOffsets {
        weights: start,
        bias: start + rows * cols,
        rows,
        cols,
    }
}

/// Glorot-uniform weights, zero biases, nine hidden layers of `width`.
pub fn init_params(width: usize, seed: u64, bounds: InputBounds) -> Result<MlpParams> {
    if width == 0 {
        return Err(Error::InvalidConfig("network width must be at least 1".into()));
    }
    let mut params = MlpParams::zeros(MlpParams::architecture(width), bounds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for l in 0..params.num_layers() {
        let off = params.layer_offsets(l);
        let limit = (6.0 / (off.rows + off.cols) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        for w in &mut params.values[off.weights..off.bias] {
            *w = dist.sample(&mut rng);
        }
    }
    Ok(params)
}

/// Forward pass on jets over any [`Scalar`]; `params` is the flat vector.
pub fn jet_forward<S: Scalar>(
    sizes: &[usize],
    bounds: &InputBounds,
    params: &[S],
    x: f64,
    t: f64,
) -> Jet<S> {
    let (xi, tau) = bounds.normalize(x, t);
    let anchor = params[0];
    let mut act = vec![
        Jet::seed_x(anchor.constant_like(xi), bounds.x_scale()),
        Jet::seed_t(anchor.constant_like(tau), bounds.t_scale()),
    ];
    let layers = sizes.len() - 1;
    for l in 0..layers {
        let off = layer_offsets(sizes, l);
        let next = (0..off.rows).map(|i| {
            let row = &params[off.weights + i * off.cols..off.weights + (i + 1) * off.cols];
            let z = row
                .iter()
                .zip(&act)
                .map(|(&w, a)| a.scale(w))
                .reduce(|acc, term| acc + term)
                .expect("layers have at least one input")
                .shift(params[off.bias + i]);
            if l + 1 < layers {
                z.tanh()
            } else {
                z
            }
        });
        act = next.collect();
    }
    act[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> InputBounds {
        InputBounds {
            x_min: -10.0,
            x_max: 10.0,
            t_min: 0.0,
            t_max: 8.0,
        }
    }

    #[test]
    fn architecture_and_glorot_bounds() {
        let p = init_params(40, 7, bounds()).unwrap();
        assert_eq!(p.layer_sizes(), &[2, 40, 40, 40, 40, 40, 40, 40, 40, 40, 1]);
        assert_eq!(p.len(), 3 * 40 + 8 * 41 * 40 + 41);
        for l in 0..p.num_layers() {
            let off = p.layer_offsets(l);
            let limit = (6.0 / (off.rows + off.cols) as f64).sqrt();
            let w = &p.as_slice()[off.weights..off.bias];
            assert!(w.iter().all(|v| v.abs() <= limit));
            assert!(w.iter().any(|&v| v != 0.0));
            assert!(p.as_slice()[off.bias..off.bias + off.rows].iter().all(|&v| v == 0.0));
        }
        // the widest bound (first layer, fan 2 + 40) caps every hidden weight
        let hidden_end = p.layer_offsets(p.num_layers() - 1).weights;
        let cap = (6.0f64 / 42.0).sqrt();
        assert!(p.as_slice()[..hidden_end].iter().all(|v| v.abs() <= cap));
    }

    #[test]
    fn initialization_is_seeded() {
        let a = init_params(8, 3, bounds()).unwrap();
        let b = init_params(8, 3, bounds()).unwrap();
        let c = init_params(8, 4, bounds()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.as_slice(), c.as_slice());
        assert!(init_params(0, 3, bounds()).is_err());
    }

    #[test]
    fn constant_network() {
        let mut p = MlpParams::zeros(MlpParams::architecture(5), bounds()).unwrap();
        p.set_output_bias(0.25);
        let j = p.dual_propagate(1.5, 2.0);
        assert_eq!((j.value, j.d_dx, j.d_dt, j.d2_dx2), (0.25, 0.0, 0.0, 0.0));
        assert_eq!(p.predict(&[(0.0, 0.0), (3.0, 7.0)]), vec![0.25, 0.25]);
    }

    #[test]
    fn single_neuron_derivative() {
        // u = tanh(w1 x + w2 t + b) with a unit output weight
        let mut p = MlpParams::zeros(vec![2, 1, 1], InputBounds::identity()).unwrap();
        let (w1, w2, b) = (0.8, -0.3, 0.1);
        p.as_mut_slice()[..4].copy_from_slice(&[w1, w2, b, 1.0]);
        let (x, t) = (0.4, 0.6);
        let u = (w1 * x + w2 * t + b).tanh();
        let j = p.dual_propagate(x, t);
        assert!((j.value - u).abs() < 1e-15);
        assert!((j.d_dx - w1 * (1.0 - u * u)).abs() < 1e-15);
        assert!((j.d_dt - w2 * (1.0 - u * u)).abs() < 1e-15);
        assert!((p.forward(x, t) - u).abs() < 1e-15);
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = init_params(3, 11, bounds()).unwrap();
        let text = p.to_checkpoint();
        assert!(text.starts_with("hyperlab-mlp v1\nlayer_sizes 2 3 3 3 3 3 3 3 3 3 1\n"));
        assert_eq!(MlpParams::from_checkpoint(&text).unwrap(), p);

        let truncated: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(MlpParams::from_checkpoint(&truncated).is_err());
        assert!(MlpParams::from_checkpoint("garbage").is_err());
    }
}
