//! Fully connected network: ReLU hidden layers, softmax output,
//! cross-entropy loss, mini-batch Adam.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::LabeledSet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    /// Hidden layer widths. The output layer width is the number of classes.
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without a training-loss improvement.
    pub early_stop_patience: Option<usize>,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self::stew()
    }
}

impl MlpConfig {
    /// 200-150-100-75 hidden units. The second layer reads 13150 in the
    /// published table, which is out of scale with its neighbors.
    pub fn stew() -> Self {
        Self {
            hidden_layers: vec![200, 150, 100, 75],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 1000,
            batch_size: 32,
            early_stop_patience: None,
            seed: 0,
        }
    }

    /// 200-120-70 hidden units.
    pub fn alpha() -> Self {
        Self {
            hidden_layers: vec![200, 120, 70],
            ..Self::stew()
        }
    }

    pub fn layer_sizes(&self, n_classes: usize) -> Vec<usize> {
        let mut sizes = self.hidden_layers.clone();
        sizes.push(n_classes);
        sizes
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("mlp: {m}")));
        if self.hidden_layers.iter().any(|&n| n == 0) {
            return bad("layer sizes must be >= 1");
        }
        if !(self.learning_rate > 0.0) || !(self.epsilon > 0.0) {
            return bad("learning_rate and epsilon must be > 0");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("beta1 and beta2 must be in [0, 1)");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        Ok(())
    }
}

/// `out = W x + b` with `W` stored row-major as `outputs × inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    fn forward(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, &b)) in out.iter_mut().zip(self.w.chunks_exact(self.inputs).zip(&self.b)) {
            *o = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Per-layer parameter gradients, same shapes as the layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub w: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl MlpGradients {
    fn zeros(net: &Mlp) -> Self {
        Self {
            w: net.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            b: net.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }

    fn fill(&mut self, v: f64) {
        self.w.iter_mut().chain(self.b.iter_mut()).for_each(|g| g.fill(v));
    }

    fn scale(&mut self, s: f64) {
        self.w
            .iter_mut()
            .chain(self.b.iter_mut())
            .for_each(|g| g.iter_mut().for_each(|v| *v *= s));
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

/// `logsumexp(z) - z[label]`
fn cross_entropy_from_logits(z: &[f64], label: usize) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - z[label]
}

struct Scratch {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`
    /// (post-ReLU for hidden layers, logits for the last one).
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Scratch {
    fn new(net: &Mlp) -> Self {
        let mut acts = vec![vec![0.0; net.input_dim()]];
        acts.extend(net.layers.iter().map(|l| vec![0.0; l.outputs]));
        let widest = net.layers.iter().map(|l| l.outputs.max(l.inputs)).max().unwrap_or(0);
        Self {
            acts,
            delta: vec![0.0; widest],
            delta_prev: vec![0.0; widest],
        }
    }
}

impl Mlp {
    /// He-normal weights, zero biases.
    pub fn initialized(input_dim: usize, layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if input_dim == 0 || layer_sizes.is_empty() || layer_sizes.iter().any(|&n| n == 0) {
            return Err(Error::invalid("network layer sizes must all be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inputs = input_dim;
        let mut layers = Vec::with_capacity(layer_sizes.len());
        for &outputs in layer_sizes {
            let normal = Normal::new(0.0, (2.0 / inputs as f64).sqrt()).expect("valid std");
            layers.push(Dense {
                inputs,
                outputs,
                w: (0..inputs * outputs).map(|_| normal.sample(&mut rng)).collect(),
                b: vec![0.0; outputs],
            });
            inputs = outputs;
        }
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for l in &layers {
            if l.w.len() != l.inputs * l.outputs || l.b.len() != l.outputs {
                return Err(Error::invalid("layer parameter shapes do not match"));
            }
        }
        for pair in layers.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::invalid("consecutive layer widths do not chain"));
            }
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    fn forward_into(&self, x: &[f64], s: &mut Scratch) {
        s.acts[0].copy_from_slice(x);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let (before, after) = s.acts.split_at_mut(l + 1);
            let out = &mut after[0];
            layer.forward(&before[l], out);
            if l < last {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut s = Scratch::new(self);
        self.forward_into(x, &mut s);
        s.acts.pop().unwrap_or_default()
    }

    /// Softmax class probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.logits(x);
        softmax_in_place(&mut z);
        z
    }

    pub fn predict_one(&self, x: &[f64]) -> usize {
        argmax(&self.logits(x))
    }

    /// Adds the gradient of one sample's loss into `grads`; returns the loss.
    fn accumulate(&self, x: &[f64], label: usize, grads: &mut MlpGradients, s: &mut Scratch) -> f64 {
        self.forward_into(x, s);
        let n_layers = self.layers.len();
        let logits = &s.acts[n_layers];
        let loss = cross_entropy_from_logits(logits, label);
        let k = logits.len();
        s.delta[..k].copy_from_slice(logits);
        softmax_in_place(&mut s.delta[..k]);
        s.delta[label] -= 1.0;

        for l in (0..n_layers).rev() {
            let layer = &self.layers[l];
            let input = &s.acts[l];
            let delta = &s.delta[..layer.outputs];
            for (o, &d) in delta.iter().enumerate() {
                grads.b[l][o] += d;
                if d != 0.0 {
                    let gw = &mut grads.w[l][o * layer.inputs..(o + 1) * layer.inputs];
                    gw.iter_mut().zip(input).for_each(|(g, &a)| *g += d * a);
                }
            }
            if l == 0 {
                break;
            }
            let prev = &mut s.delta_prev[..layer.inputs];
            prev.fill(0.0);
            for (o, &d) in delta.iter().enumerate() {
                if d != 0.0 {
                    let row = &layer.w[o * layer.inputs..(o + 1) * layer.inputs];
                    prev.iter_mut().zip(row).for_each(|(p, &w)| *p += w * d);
                }
            }
            // ReLU derivative from the post-activation value
            prev.iter_mut().zip(input).for_each(|(p, &a)| {
                if a <= 0.0 {
                    *p = 0.0;
                }
            });
            std::mem::swap(&mut s.delta, &mut s.delta_prev);
        }
        loss
    }

    /// Mean cross-entropy over `set`.
    pub fn loss(&self, set: &LabeledSet) -> f64 {
        let mut s = Scratch::new(self);
        let total: f64 = (0..set.len())
            .map(|i| {
                self.forward_into(set.row(i), &mut s);
                cross_entropy_from_logits(&s.acts[self.layers.len()], set.y[i])
            })
            .sum();
        total / set.len() as f64
    }

    /// Gradient of the mean cross-entropy over `set`.
    pub fn gradients(&self, set: &LabeledSet) -> MlpGradients {
        let mut grads = MlpGradients::zeros(self);
        let mut s = Scratch::new(self);
        for i in 0..set.len() {
            self.accumulate(set.row(i), set.y[i], &mut grads, &mut s);
        }
        grads.scale(1.0 / set.len() as f64);
        grads
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.w.iter_mut().chain(l.b.iter_mut()))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

struct Adam {
    m: MlpGradients,
    v: MlpGradients,
    t: i32,
}

impl Adam {
    fn step(&mut self, net: &mut Mlp, g: &MlpGradients, cfg: &MlpConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
            }
        };
        for (l, layer) in net.layers.iter_mut().enumerate() {
            update(&mut layer.w, &g.w[l], &mut self.m.w[l], &mut self.v.w[l]);
            update(&mut layer.b, &g.b[l], &mut self.m.b[l], &mut self.v.b[l]);
        }
    }
}

/// Trains a freshly initialized network on `train`.
pub fn train_mlp(train: &LabeledSet, config: &MlpConfig) -> Result<Mlp> {
    config.validate()?;
    let net = Mlp::initialized(train.dim, &config.layer_sizes(train.n_classes()), config.seed)?;
    train_from(net, train, config)
}

/// Trains `net` in place from its current weights. Batches are reshuffled
/// every epoch with an RNG seeded from `config.seed`.
pub fn train_from(mut net: Mlp, train: &LabeledSet, config: &MlpConfig) -> Result<Mlp> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if net.input_dim() != train.dim {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            got: train.dim,
        });
    }
    if net.n_outputs() != train.n_classes() {
        return Err(Error::invalid(format!(
            "output layer has {} units for {} classes",
            net.n_outputs(),
            train.n_classes()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5EED_0F_BA7C4E5);
    let mut grads = MlpGradients::zeros(&net);
    let mut adam = Adam {
        m: MlpGradients::zeros(&net),
        v: MlpGradients::zeros(&net),
        t: 0,
    };
    let mut scratch = Scratch::new(&net);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut best_loss = f64::INFINITY;
    let mut stale = 0usize;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            grads.fill(0.0);
            for &i in batch {
                epoch_loss += net.accumulate(train.row(i), train.y[i], &mut grads, &mut scratch);
            }
            grads.scale(1.0 / batch.len() as f64);
            adam.step(&mut net, &grads, config);
        }
        if !epoch_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        if let Some(patience) = config.early_stop_patience {
            if epoch_loss < best_loss - 1e-9 {
                best_loss = epoch_loss;
                stale = 0;
            } else {
                stale += 1;
                if stale >= patience {
                    log::debug!("mlp early stop at epoch {epoch}");
                    break;
                }
            }
        }
    }
    Ok(net)
}

const GRAD_CHECK_STEP: f64 = 1e-5;
/// Gradients below this magnitude are compared in absolute terms.
const GRAD_CHECK_FLOOR: f64 = 1e-6;

/// Largest relative difference between back-propagated gradients and
/// central finite differences (step 1e-5) of the mean loss, over every
/// parameter of a freshly initialized network.
pub fn mlp_gradient_check(config: &MlpConfig, data: &LabeledSet) -> Result<f64> {
    let sizes = config.layer_sizes(data.n_classes());
    if sizes.iter().any(|&n| n > 10) || data.dim > 10 || data.len() > 20 || data.is_empty() {
        return Err(Error::invalid(
            "gradient check expects at most 10 units per layer and 1..=20 samples",
        ));
    }
    let net = Mlp::initialized(data.dim, &sizes, config.seed)?;
    Ok(gradient_check_of(&net, data))
}

pub(crate) fn gradient_check_of(net: &Mlp, data: &LabeledSet) -> f64 {
    let analytic = net.gradients(data);
    let flat: Vec<f64> = net
        .layers
        .iter()
        .enumerate()
        .flat_map(|(l, _)| analytic.w[l].iter().chain(analytic.b[l].iter()).copied().collect::<Vec<_>>())
        .collect();
    let mut probe = net.clone();
    let n_params = flat.len();
    let mut worst = 0.0f64;
    for p in 0..n_params {
        let original = *probe.params_mut().nth(p).expect("param index");
        *probe.params_mut().nth(p).expect("param index") = original + GRAD_CHECK_STEP;
        let up = probe.loss(data);
        *probe.params_mut().nth(p).expect("param index") = original - GRAD_CHECK_STEP;
        let down = probe.loss(data);
        *probe.params_mut().nth(p).expect("param index") = original;
        let numeric = (up - down) / (2.0 * GRAD_CHECK_STEP);
        let a = flat[p];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRAD_CHECK_FLOOR);
        worst = worst.max(rel);
    }
    worst
}
