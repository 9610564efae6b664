//! A small dense network producing one raw score per input, with exact
//! reverse-mode gradients with respect to every parameter.
//!
//! The hidden nonlinearity is tanh: smooth everywhere, so analytic
//! gradients can be checked against central finite differences.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::risk::sigmoid;
use crate::rng::sub_rng;

/// Hidden-layer nonlinearity tag. The output layer is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::invalid("activation", format!("unknown `{other}`"))),
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// Layer weights and biases. Weight matrices are `(out, in)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    layer_dims: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    activation: Activation,
}

/// One real per parameter, shape-congruent with the owning [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Self {
        Self {
            weights: params.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: params.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    /// Flat view in layer order: weights row-major, then biases.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
            .copied()
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights
            .iter_mut()
            .zip(&mut self.biases)
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }
}

/// Cached activations from a batch forward pass; `activations[0]` is the
/// input and `activations[L]` the raw output column.
pub struct ForwardTrace {
    activations: Vec<Array2<f64>>,
}

fn validate_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(Error::invalid(
            "layer_dims",
            "need at least input and output dimensions",
        ));
    }
    if layer_dims.contains(&0) {
        return Err(Error::invalid("layer_dims", "all dimensions must be >= 1"));
    }
    if *layer_dims.last().unwrap() != 1 {
        return Err(Error::invalid("layer_dims", "output dimension must be 1"));
    }
    Ok(())
}

/// Initialize an MLP with `N(0, 1/sqrt(fan_in))` weights and zero biases;
/// deterministic given the seed.
pub fn init_mlp(layer_dims: &[usize], seed: u64) -> Result<ModelParams> {
    validate_dims(layer_dims)?;
    let mut rng = sub_rng(seed, "init-mlp", 0);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..layer_dims.len() - 1 {
        let (fan_in, fan_out) = (layer_dims[l], layer_dims[l + 1]);
        let scale = 1.0 / (fan_in as f64).sqrt();
        let w = Array2::from_shape_fn((fan_out, fan_in), |_| {
            let z: f64 = rng.sample(StandardNormal);
            scale * z
        });
        weights.push(w);
        biases.push(Array1::zeros(fan_out));
    }
    Ok(ModelParams {
        layer_dims: layer_dims.to_vec(),
        weights,
        biases,
        activation: Activation::Tanh,
    })
}

impl ModelParams {
    /// Build from explicit layer contents, validating the shape chain.
    pub fn from_layers(
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
        activation: Activation,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::Shape(format!(
                "{} weight matrices vs {} bias vectors",
                weights.len(),
                biases.len()
            )));
        }
        let mut layer_dims = vec![weights[0].ncols()];
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.ncols() != layer_dims[l] {
                return Err(Error::Shape(format!(
                    "layer {l} expects {} inputs, previous layer emits {}",
                    w.ncols(),
                    layer_dims[l]
                )));
            }
            if b.len() != w.nrows() {
                return Err(Error::Shape(format!(
                    "layer {l} has {} rows but bias of length {}",
                    w.nrows(),
                    b.len()
                )));
            }
            layer_dims.push(w.nrows());
        }
        validate_dims(&layer_dims)?;
        if !weights.iter().flat_map(|w| w.iter()).all(|v| v.is_finite())
            || !biases.iter().flat_map(|b| b.iter()).all(|v| v.is_finite())
        {
            return Err(Error::invalid("ModelParams", "non-finite parameter"));
        }
        Ok(Self {
            layer_dims,
            weights,
            biases,
            activation: Activation::Tanh,
        })
        .map(|mut p| {
            p.activation = activation;
            p
        })
    }

    /// Single linear layer `w . x + b`.
    pub fn linear(w: &[f64], b: f64) -> Result<Self> {
        let weights = vec![Array2::from_shape_vec((1, w.len()), w.to_vec())
            .expect("1-row matrix from slice")];
        let biases = vec![Array1::from_vec(vec![b])];
        Self::from_layers(weights, biases, Activation::Tanh)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    fn n_layers(&self) -> usize {
        self.weights.len()
    }

    /// Raw (unsquashed) score for one input.
    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input of length {} for model expecting {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut a = x.to_owned();
        for l in 0..self.n_layers() {
            let mut z = self.weights[l].dot(&a) + &self.biases[l];
            if l + 1 < self.n_layers() {
                z.mapv_inplace(|v| self.activation.apply(v));
            }
            a = z;
        }
        Ok(a[0])
    }

    /// Raw scores for a batch, plus the activation trace for backprop.
    pub fn forward_batch(&self, xs: ArrayView2<'_, f64>) -> Result<(Array1<f64>, ForwardTrace)> {
        if xs.ncols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch of width {} for model expecting {}",
                xs.ncols(),
                self.input_dim()
            )));
        }
        let mut activations = Vec::with_capacity(self.n_layers() + 1);
        activations.push(xs.to_owned());
        for l in 0..self.n_layers() {
            let mut z = activations[l].dot(&self.weights[l].t()) + &self.biases[l];
            if l + 1 < self.n_layers() {
                z.mapv_inplace(|v| self.activation.apply(v));
            }
            activations.push(z);
        }
        let scores = activations.last().unwrap().column(0).to_owned();
        Ok((scores, ForwardTrace { activations }))
    }

    /// Sigmoid of the raw score, capped at `clamp_hi`.
    pub fn predict_prob(&self, x: ArrayView1<'_, f64>, clamp_hi: f64) -> Result<f64> {
        if !(clamp_hi > 0.5 && clamp_hi < 1.0) {
            return Err(Error::invalid(
                "clamp_hi",
                format!("{clamp_hi} outside (0.5, 1)"),
            ));
        }
        Ok(sigmoid(self.forward(x)?).min(clamp_hi))
    }

    /// Sum over the batch of per-sample parameter gradients, given the
    /// per-sample derivative of the loss with respect to the raw score.
    pub fn backward(
        &self,
        batch_inputs: ArrayView2<'_, f64>,
        dloss_dscore: ArrayView1<'_, f64>,
    ) -> Result<Gradients> {
        let (_, trace) = self.forward_batch(batch_inputs)?;
        self.backward_from_trace(&trace, dloss_dscore)
    }

    /// As [`backward`](Self::backward), reusing a forward trace.
    pub fn backward_from_trace(
        &self,
        trace: &ForwardTrace,
        dloss_dscore: ArrayView1<'_, f64>,
    ) -> Result<Gradients> {
        let n = trace.activations[0].nrows();
        if dloss_dscore.len() != n {
            return Err(Error::Shape(format!(
                "{} upstream derivatives for batch of {n}",
                dloss_dscore.len()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        // delta: (n, out) derivative of the scalar objective wrt layer output.
        let mut delta = dloss_dscore
            .to_owned()
            .into_shape_with_order((n, 1))
            .expect("column reshape");
        for l in (0..self.n_layers()).rev() {
            grads.weights[l] = delta.t().dot(&trace.activations[l]);
            grads.biases[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l]);
                back.zip_mut_with(&trace.activations[l], |d, &a| {
                    *d *= self.activation.derivative_from_output(a);
                });
                delta = back;
            }
        }
        Ok(grads)
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Flat parameter view matching [`Gradients::values`] ordering.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
            .copied()
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights
            .iter_mut()
            .zip(&mut self.biases)
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    /// Copy with one flat-indexed parameter shifted by `delta`; used by
    /// finite-difference checks.
    pub fn with_param_shifted(&self, index: usize, delta: f64) -> Result<Self> {
        if index >= self.param_count() {
            return Err(Error::invalid(
                "param index",
                format!("{index} out of range for {} parameters", self.param_count()),
            ));
        }
        let mut copy = self.clone();
        if let Some(v) = copy.values_mut().nth(index) {
            *v += delta;
        }
        Ok(copy)
    }
}

const CHECKPOINT_MAGIC: &str = "ocrisk-mlp v1";

/// Write a text checkpoint: magic line, activation, dims, optional
/// `meta key value` lines, then row-major `W{l}` / `b{l}` lines.
pub fn save_checkpoint(
    params: &ModelParams,
    path: impl AsRef<Path>,
    meta: &[(String, String)],
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{CHECKPOINT_MAGIC}");
    let _ = writeln!(out, "activation {}", params.activation.name());
    let dims: Vec<String> = params.layer_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "dims {}", dims.join(" "));
    for (k, v) in meta {
        let _ = writeln!(out, "meta {k} {v}");
    }
    for l in 0..params.weights.len() {
        let w: Vec<String> = params.weights[l].iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "W{l} {}", w.join(" "));
        let b: Vec<String> = params.biases[l].iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "b{l} {}", b.join(" "));
    }
    let _ = writeln!(out, "end");
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(ModelParams, Vec<(String, String)>)> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));

    let (line_no, magic) = lines
        .next()
        .ok_or_else(|| Error::parse(&origin, 1, "empty checkpoint"))?;
    if magic.trim() != CHECKPOINT_MAGIC {
        return Err(Error::parse(
            &origin,
            line_no,
            format!("unsupported checkpoint format `{}`", magic.trim()),
        ));
    }

    let mut activation = Activation::Tanh;
    let mut dims: Vec<usize> = Vec::new();
    let mut meta = Vec::new();
    let mut weights: Vec<Array2<f64>> = Vec::new();
    let mut biases: Vec<Array1<f64>> = Vec::new();

    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "end" {
            break;
        }
        let (tag, rest) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(&origin, line_no, format!("unreadable line `{line}`")))?;
        match tag {
            "activation" => activation = Activation::from_name(rest.trim())?,
            "dims" => {
                dims = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<usize>().map_err(|_| {
                            Error::parse(&origin, line_no, format!("bad dimension `{t}`"))
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            "meta" => {
                let (k, v) = rest
                    .split_once(' ')
                    .ok_or_else(|| Error::parse(&origin, line_no, "meta needs key and value"))?;
                meta.push((k.to_string(), v.to_string()));
            }
            t if t.starts_with('W') || t.starts_with('b') => {
                let vals: Vec<f64> = rest
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>().map_err(|_| {
                            Error::parse(&origin, line_no, format!("bad parameter `{tok}`"))
                        })
                    })
                    .collect::<Result<_>>()?;
                let l: usize = t[1..].parse().map_err(|_| {
                    Error::parse(&origin, line_no, format!("bad layer tag `{t}`"))
                })?;
                if dims.len() < l + 2 {
                    return Err(Error::parse(
                        &origin,
                        line_no,
                        format!("layer {l} exceeds dims line"),
                    ));
                }
                if t.starts_with('W') {
                    let (rows, cols) = (dims[l + 1], dims[l]);
                    if vals.len() != rows * cols {
                        return Err(Error::parse(
                            &origin,
                            line_no,
                            format!("W{l} has {} values, expected {}", vals.len(), rows * cols),
                        ));
                    }
                    weights.push(
                        Array2::from_shape_vec((rows, cols), vals)
                            .expect("checked length above"),
                    );
                } else {
                    if vals.len() != dims[l + 1] {
                        return Err(Error::parse(
                            &origin,
                            line_no,
                            format!("b{l} has {} values, expected {}", vals.len(), dims[l + 1]),
                        ));
                    }
                    biases.push(Array1::from_vec(vals));
                }
            }
            other => {
                return Err(Error::parse(
                    &origin,
                    line_no,
                    format!("unknown tag `{other}`"),
                ))
            }
        }
    }
    let params = ModelParams::from_layers(weights, biases, activation)?;
    if params.layer_dims != dims {
        return Err(Error::parse(
            &origin,
            0,
            "dims line disagrees with parameter shapes",
        ));
    }
    Ok((params, meta))
}
