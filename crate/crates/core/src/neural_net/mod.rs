//! Dense feed-forward network with ReLU hidden layers and a linear output,
//! trained by backpropagation of a (optionally masked) mean-squared error
//! and plain SGD. Double precision throughout.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::sqrt;
use crate::{Error, Result};

/// Parameters of one affine map. `weights` is row-major with shape
/// `(inputs, outputs)`: entry `i * outputs + j` connects input `i` to
/// output `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.inputs, self.outputs)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.outputs + j]
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.biases);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
            for (o, w) in out.iter_mut().zip(row) {
                *o += xi * w;
            }
        }
    }
}

/// Partial derivatives of a loss, one [`Layer`]-shaped entry per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<Layer>,
}

impl GradientSet {
    pub fn zeros_like(net: &Mlp) -> Self {
        GradientSet {
            layers: net.layers.iter().map(|l| Layer::zeros(l.inputs, l.outputs)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
    }
}

/// Dense ReLU network. The last layer is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    layers: Vec<Layer>,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::invalid("layer_sizes", "need at least an input and an output layer"));
    }
    if sizes.contains(&0) {
        return Err(Error::invalid("layer_sizes", "every layer needs at least one unit"));
    }
    Ok(())
}

impl Mlp {
    /// Glorot-uniform weights, zero biases, seeded.
    pub fn new(sizes: &[usize], seed: u64) -> Result<Self> {
        Self::with_rng(sizes, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        check_sizes(sizes)?;
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = sqrt(6.0 / (fan_in + fan_out) as f64);
                let mut layer = Layer::zeros(fan_in, fan_out);
                for v in &mut layer.weights {
                    *v = rng.gen_range(-limit..=limit);
                }
                layer
            })
            .collect();
        Ok(Mlp {
            sizes: sizes.to_vec(),
            layers,
        })
    }

    /// All-zero parameters.
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        check_sizes(sizes)?;
        Ok(Mlp {
            sizes: sizes.to_vec(),
            layers: sizes.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        })
    }

    /// Reassembles a network from its layers, checking that shapes chain.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("layers", "need at least one layer"));
        }
        let mut sizes = vec![layers[0].inputs];
        for l in &layers {
            if l.inputs != *sizes.last().unwrap() {
                return Err(Error::ShapeMismatch(format!(
                    "layer expects {} inputs after a layer of {} outputs",
                    l.inputs,
                    sizes.last().unwrap()
                )));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::ShapeMismatch(format!("inconsistent parameter lengths in a {}x{} layer", l.inputs, l.outputs)));
            }
            if l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                return Err(Error::invalid("parameters", "must be finite"));
            }
            sizes.push(l.outputs);
        }
        check_sizes(&sizes)?;
        Ok(Mlp { sizes, layers })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            layer.affine(&cur, &mut next);
            if k != last {
                relu(&mut next);
            }
            core::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Activations of every layer; entry 0 is the input itself.
    fn trace(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.outputs);
            layer.affine(&acts[k], &mut out);
            if k != last {
                relu(&mut out);
            }
            acts.push(out);
        }
        acts
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_len() {
            return Err(Error::ShapeMismatch(format!(
                "network expects {} inputs, got {}",
                self.input_len(),
                input.len()
            )));
        }
        Ok(())
    }

    /// Loss and exact gradients of [`mse_loss`] over a batch.
    pub fn backward(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>], mask: Option<&[Vec<bool>]>) -> Result<(f64, GradientSet)> {
        check_batch(inputs.len(), targets, mask, self.output_len())?;
        let selected = selected_count(targets, mask)?;
        let scale = 2.0 / selected as f64;
        let mut grads = GradientSet::zeros_like(self);
        let mut loss = 0.0;
        let last = self.layers.len() - 1;

        for (b, input) in inputs.iter().enumerate() {
            self.check_input(input)?;
            let acts = self.trace(input);
            let out = &acts[self.layers.len()];
            // dL/d(pre-activation) of the current layer
            let mut delta: Vec<f64> = out
                .iter()
                .zip(&targets[b])
                .enumerate()
                .map(|(j, (y, t))| {
                    if is_selected(mask, b, j) {
                        let r = y - t;
                        loss += r * r;
                        scale * r
                    } else {
                        0.0
                    }
                })
                .collect();

            for k in (0..=last).rev() {
                let layer = &self.layers[k];
                let g = &mut grads.layers[k];
                let x = &acts[k];
                for (i, &xi) in x.iter().enumerate() {
                    if xi == 0.0 {
                        continue;
                    }
                    let row = &mut g.weights[i * layer.outputs..(i + 1) * layer.outputs];
                    for (gw, d) in row.iter_mut().zip(&delta) {
                        *gw += xi * d;
                    }
                }
                for (gb, d) in g.biases.iter_mut().zip(&delta) {
                    *gb += d;
                }
                if k > 0 {
                    // ReLU derivative: pass-through where the activation is positive.
                    delta = (0..layer.inputs)
                        .map(|i| {
                            if x[i] > 0.0 {
                                let row = &layer.weights[i * layer.outputs..(i + 1) * layer.outputs];
                                row.iter().zip(&delta).map(|(w, d)| w * d).sum()
                            } else {
                                0.0
                            }
                        })
                        .collect();
                }
            }
        }
        Ok((loss / selected as f64, grads))
    }

    /// `parameter -= lr * gradient`, elementwise.
    pub fn sgd_step(&mut self, grads: &GradientSet, lr: f64) -> Result<()> {
        if grads.layers.len() != self.layers.len()
            || grads.layers.iter().zip(&self.layers).any(|(g, l)| g.shape() != l.shape())
        {
            return Err(Error::ShapeMismatch("gradient set does not match network".into()));
        }
        if !(lr >= 0.0) {
            return Err(Error::invalid("learning rate", "must be non-negative"));
        }
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (p, d) in layer.weights.iter_mut().zip(&g.weights) {
                *p -= lr * d;
            }
            for (p, d) in layer.biases.iter_mut().zip(&g.biases) {
                *p -= lr * d;
            }
        }
        Ok(())
    }

    /// Overwrites this network's parameters with `src`'s (target-network sync).
    pub fn copy_from(&mut self, src: &Mlp) {
        self.clone_from(src);
    }
}

fn relu(xs: &mut [f64]) {
    for x in xs {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

fn is_selected(mask: Option<&[Vec<bool>]>, row: usize, col: usize) -> bool {
    mask.is_none_or(|m| m[row][col])
}

fn check_batch(rows: usize, targets: &[Vec<f64>], mask: Option<&[Vec<bool>]>, width: usize) -> Result<()> {
    if targets.len() != rows {
        return Err(Error::ShapeMismatch(format!("{rows} predictions but {} targets", targets.len())));
    }
    if let Some(t) = targets.iter().find(|t| t.len() != width) {
        return Err(Error::ShapeMismatch(format!("target of length {} for {width} outputs", t.len())));
    }
    if let Some(m) = mask {
        if m.len() != rows || m.iter().any(|r| r.len() != width) {
            return Err(Error::ShapeMismatch("mask shape differs from targets".into()));
        }
    }
    Ok(())
}

fn selected_count(targets: &[Vec<f64>], mask: Option<&[Vec<bool>]>) -> Result<usize> {
    let n = match mask {
        Some(m) => m.iter().flatten().filter(|s| **s).count(),
        None => targets.iter().map(Vec::len).sum(),
    };
    if n == 0 {
        Err(Error::EmptySelection)
    } else {
        Ok(n)
    }
}

/// Mean of squared differences over the selected elements.
pub fn mse_loss(predicted: &[Vec<f64>], target: &[Vec<f64>], mask: Option<&[Vec<bool>]>) -> Result<f64> {
    let width = predicted.first().map_or(0, Vec::len);
    if predicted.iter().any(|p| p.len() != width) {
        return Err(Error::ShapeMismatch("ragged prediction batch".into()));
    }
    check_batch(predicted.len(), target, mask, width)?;
    let n = selected_count(target, mask)?;
    let mut sum = 0.0;
    for (b, (p, t)) in predicted.iter().zip(target).enumerate() {
        for (j, (y, z)) in p.iter().zip(t).enumerate() {
            if is_selected(mask, b, j) {
                sum += (y - z) * (y - z);
            }
        }
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests;
