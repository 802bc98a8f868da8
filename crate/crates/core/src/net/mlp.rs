//! MLP shape description, forward pass, and exact reverse-mode gradients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    Relu,
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    Tanh,
    Linear,
}

/// Shape and activations of a fixed feed-forward network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_sizes: Vec<usize>,
    pub hidden: HiddenActivation,
    pub output: OutputActivation,
    /// Whether layers carry bias terms. Bias-free nets are used where the
    /// parameter space itself is searched directly.
    pub bias: bool,
}

impl MlpSpec {
    pub fn new(
        layer_sizes: Vec<usize>,
        hidden: HiddenActivation,
        output: OutputActivation,
        bias: bool,
    ) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::invalid_input("an MLP needs at least one layer transition"));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid_input("all layer sizes must be >= 1"));
        }
        Ok(MlpSpec { layer_sizes, hidden, output, bias })
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Total flat parameter count: sum over transitions of `(in + bias) * out`.
    pub fn param_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| (w[0] + usize::from(self.bias)) * w[1])
            .sum()
    }

    /// Offset of layer `l`'s block in the flat vector.
    fn layer_offset(&self, layer: usize) -> usize {
        self.layer_sizes
            .windows(2)
            .take(layer)
            .map(|w| (w[0] + usize::from(self.bias)) * w[1])
            .sum()
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::invalid_input(format!(
                "parameter vector has length {}, spec needs {}",
                params.len(),
                self.param_count()
            )));
        }
        Ok(())
    }

    /// Initial parameters: uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`
    /// per layer, biases included.
    pub fn init_params(&self, rng: &mut Stream) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.param_count());
        for w in self.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let n = (fan_in + usize::from(self.bias)) * fan_out;
            for _ in 0..n {
                params.push(rng.random_range(-bound..bound));
            }
        }
        params
    }

    /// Forward pass for a single input.
    pub fn forward(&self, params: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        let trace = self.forward_batch(params, input, 1)?;
        Ok(trace.output().to_vec())
    }

    /// Forward pass for a row-major `(batch, input_dim)` matrix, keeping the
    /// per-layer activations needed by [`MlpSpec::backward_batch`].
    pub fn forward_batch(&self, params: &[f64], inputs: &[f64], batch: usize) -> Result<ForwardTrace> {
        let mut trace = ForwardTrace::default();
        self.forward_batch_into(params, inputs, batch, &mut trace)?;
        Ok(trace)
    }

    /// Like [`MlpSpec::forward_batch`] but reusing the trace's storage.
    /// Training loops call this hundreds of thousands of times; fresh
    /// allocations per call trigger heap-trim churn that costs more than the
    /// arithmetic.
    pub fn forward_batch_into(
        &self,
        params: &[f64],
        inputs: &[f64],
        batch: usize,
        trace: &mut ForwardTrace,
    ) -> Result<()> {
        self.check_params(params)?;
        if inputs.len() != batch * self.input_dim() {
            return Err(Error::invalid_input(format!(
                "input matrix has {} values, expected {} x {}",
                inputs.len(),
                batch,
                self.input_dim()
            )));
        }
        trace.batch = batch;
        trace.activations.resize(self.layer_sizes.len(), Vec::new());
        trace.activations[0].clear();
        trace.activations[0].extend_from_slice(inputs);
        for layer in 0..self.num_layers() {
            let (fan_in, fan_out) = (self.layer_sizes[layer], self.layer_sizes[layer + 1]);
            let block = &params[self.layer_offset(layer)..];
            let weights = &block[..fan_in * fan_out];

            trace.wt.clear();
            trace.wt.resize(fan_in * fan_out, 0.0);
            transpose_into(weights, fan_out, fan_in, &mut trace.wt);

            let (done, rest) = trace.activations.split_at_mut(layer + 1);
            let prev = done.last().unwrap();
            let z = &mut rest[0];
            z.clear();
            if self.bias {
                let biases = &block[fan_in * fan_out..fan_in * fan_out + fan_out];
                for _ in 0..batch {
                    z.extend_from_slice(biases);
                }
            } else {
                z.resize(batch * fan_out, 0.0);
            }
            accumulate_weighted_rows(prev, fan_in, &trace.wt, z, batch, fan_out);

            let last = layer + 1 == self.num_layers();
            match (last, self.hidden, self.output) {
                (false, HiddenActivation::Relu, _) => z.iter_mut().for_each(|v| *v = v.max(0.0)),
                (false, HiddenActivation::Tanh, _) => z.iter_mut().for_each(|v| *v = v.tanh()),
                (true, _, OutputActivation::Tanh) => z.iter_mut().for_each(|v| *v = v.tanh()),
                (true, _, OutputActivation::Linear) => {}
            }
        }
        Ok(())
    }

    /// Reverse-mode gradients for a traced batch.
    ///
    /// `upstream` is the row-major `(batch, output_dim)` gradient of some
    /// scalar objective with respect to the network outputs. Returns the
    /// gradient with respect to the flat parameters (summed over the batch)
    /// and with respect to the inputs.
    pub fn backward_batch(
        &self,
        params: &[f64],
        trace: &ForwardTrace,
        upstream: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut param_grad = Vec::new();
        let mut input_grad = Vec::new();
        self.backward_batch_into(
            params,
            trace,
            upstream,
            &mut param_grad,
            &mut input_grad,
            &mut GradScratch::default(),
        )?;
        Ok((param_grad, input_grad))
    }

    /// Like [`MlpSpec::backward_batch`], reusing all output and scratch
    /// storage.
    pub fn backward_batch_into(
        &self,
        params: &[f64],
        trace: &ForwardTrace,
        upstream: &[f64],
        param_grad: &mut Vec<f64>,
        input_grad: &mut Vec<f64>,
        scratch: &mut GradScratch,
    ) -> Result<()> {
        self.check_params(params)?;
        let batch = trace.batch;
        if trace.activations.len() != self.layer_sizes.len()
            || trace
                .activations
                .iter()
                .zip(&self.layer_sizes)
                .any(|(a, &s)| a.len() != batch * s)
        {
            return Err(Error::invalid_input("trace does not match this spec"));
        }
        if upstream.len() != batch * self.output_dim() {
            return Err(Error::invalid_input(format!(
                "upstream gradient has {} values, expected {} x {}",
                upstream.len(),
                batch,
                self.output_dim()
            )));
        }

        param_grad.clear();
        param_grad.resize(self.param_count(), 0.0);
        // Gradient w.r.t. the current layer's post-activation output.
        let delta = &mut scratch.delta;
        delta.clear();
        delta.extend_from_slice(upstream);
        for layer in (0..self.num_layers()).rev() {
            let (fan_in, fan_out) = (self.layer_sizes[layer], self.layer_sizes[layer + 1]);
            let out_act = &trace.activations[layer + 1];
            let in_act = &trace.activations[layer];
            let last = layer + 1 == self.num_layers();

            // Through the activation: post-activation values determine the
            // local derivative for relu (indicator) and tanh (1 - y^2).
            match (last, self.hidden, self.output) {
                (true, _, OutputActivation::Linear) => {}
                (true, _, OutputActivation::Tanh) | (false, HiddenActivation::Tanh, _) => {
                    for (d, &y) in delta.iter_mut().zip(out_act) {
                        *d *= 1.0 - y * y;
                    }
                }
                (false, HiddenActivation::Relu, _) => {
                    for (d, &y) in delta.iter_mut().zip(out_act) {
                        if y <= 0.0 {
                            *d = 0.0;
                        }
                    }
                }
            }

            let offset = self.layer_offset(layer);
            let weights = &params[offset..offset + fan_in * fan_out];
            let (wgrad, rest) = param_grad[offset..].split_at_mut(fan_in * fan_out);
            // dW[o] = sum_b delta[b][o] * x[b]; db[o] = sum_b delta[b][o].
            let delta_t = &mut scratch.delta_t;
            delta_t.clear();
            delta_t.resize(batch * fan_out, 0.0);
            transpose_into(delta, batch, fan_out, delta_t);
            accumulate_weighted_rows(delta_t, batch, in_act, wgrad, fan_out, fan_in);
            if self.bias {
                for (o, g) in rest[..fan_out].iter_mut().enumerate() {
                    *g += delta_t[o * batch..(o + 1) * batch].iter().sum::<f64>();
                }
            }

            // dX[b] = sum_o delta[b][o] * W[o].
            let next_delta = &mut scratch.next_delta;
            next_delta.clear();
            next_delta.resize(batch * fan_in, 0.0);
            accumulate_weighted_rows(delta, fan_out, weights, next_delta, batch, fan_in);
            std::mem::swap(delta, next_delta);
        }
        input_grad.clear();
        input_grad.extend_from_slice(delta);
        Ok(())
    }

    /// Single-input convenience wrapper: forward, then backward.
    pub fn backward(
        &self,
        params: &[f64],
        input: &[f64],
        upstream: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let trace = self.forward_batch(params, input, 1)?;
        self.backward_batch(params, &trace, upstream)
    }
}

/// Row-major transpose of an `(rows, cols)` matrix into preallocated storage.
fn transpose_into(m: &[f64], rows: usize, cols: usize, t: &mut [f64]) {
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = m[r * cols + c];
        }
    }
}

/// Reusable scratch storage for [`MlpSpec::backward_batch_into`].
#[derive(Debug, Clone, Default)]
pub struct GradScratch {
    delta: Vec<f64>,
    delta_t: Vec<f64>,
    next_delta: Vec<f64>,
}

/// The one matrix kernel behind the forward pass and both gradient passes:
/// for each of `n_rows` output rows,
/// `out[r] += sum_j coeffs[r][j] * rows[j]`, where every row has width
/// `width` and `coeffs` is row-major `(n_rows, k)`.
///
/// Zero coefficients are skipped; relu masking upstream makes them common.
fn accumulate_weighted_rows(
    coeffs: &[f64],
    k: usize,
    rows: &[f64],
    out: &mut [f64],
    n_rows: usize,
    width: usize,
) {
    // The width the project's hidden layers actually use gets a fixed-size
    // accumulator that the optimizer keeps in registers across the j loop;
    // the generic path is identical arithmetic in the same order.
    if width == 64 {
        accumulate_fixed::<64>(coeffs, k, rows, out, n_rows);
    } else {
        for r in 0..n_rows {
            let crow = &coeffs[r * k..(r + 1) * k];
            let orow = &mut out[r * width..(r + 1) * width];
            for (j, &c) in crow.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let row = &rows[j * width..(j + 1) * width];
                for (o, &v) in orow.iter_mut().zip(row) {
                    *o += c * v;
                }
            }
        }
    }
}

fn accumulate_fixed<const W: usize>(coeffs: &[f64], k: usize, rows: &[f64], out: &mut [f64], n_rows: usize) {
    for r in 0..n_rows {
        let crow = &coeffs[r * k..(r + 1) * k];
        let orow = &mut out[r * W..(r + 1) * W];
        let mut acc = [0.0f64; W];
        acc.copy_from_slice(orow);
        for (j, &c) in crow.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row: &[f64; W] = (&rows[j * W..(j + 1) * W]).try_into().unwrap();
            for w in 0..W {
                acc[w] += c * row[w];
            }
        }
        orow.copy_from_slice(&acc);
    }
}

/// Activations recorded by a forward pass, consumed by the backward pass.
/// Reusable across calls via [`MlpSpec::forward_batch_into`].
#[derive(Debug, Clone, Default)]
pub struct ForwardTrace {
    batch: usize,
    /// `activations[0]` is the input matrix; `activations[l]` the
    /// post-activation output of layer `l`.
    activations: Vec<Vec<f64>>,
    wt: Vec<f64>,
}

impl ForwardTrace {
    pub fn batch(&self) -> usize {
        self.batch
    }

    /// The network output, row-major `(batch, output_dim)`.
    pub fn output(&self) -> &[f64] {
        self.activations.last().unwrap()
    }
}
