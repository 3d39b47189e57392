//! Small fully connected classifier: ReLU hidden layers, two-way softmax
//! output, softmax cross-entropy loss, mini-batch SGD.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities are floored here before the log so a confident wrong
/// prediction gives a large finite loss.
const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `outputs × inputs`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layers: Vec<Layer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetConfig {
    pub hidden: Vec<usize>,
    pub init_seed: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            hidden: vec![16],
            init_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 0.05,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&EpochStats> {
        self.epochs.last()
    }
}

/// Gradients with the same shapes as the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl DenseNet {
    /// Xavier-uniform weights, zero biases. `sizes` runs input to output and
    /// must end in 2.
    pub fn new(sizes: &[usize], seed: u64) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidConfig(
                "a net needs at least two layer sizes".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "zero-width layer in {sizes:?}"
            )));
        }
        if *sizes.last().unwrap() != 2 {
            return Err(Error::InvalidConfig(format!(
                "output layer must have 2 units, got {}",
                sizes.last().unwrap()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let limit = (6.0 / (inputs + outputs) as f64).sqrt();
                Layer {
                    inputs,
                    outputs,
                    weights: (0..inputs * outputs)
                        .map(|_| rng.random_range(-limit..limit))
                        .collect(),
                    biases: vec![0.0; outputs],
                }
            })
            .collect();
        Ok(DenseNet { layers })
    }

    pub fn from_config(input: usize, config: &NetConfig) -> Result<Self> {
        let mut sizes = vec![input];
        sizes.extend_from_slice(&config.hidden);
        sizes.push(2);
        DenseNet::new(&sizes, config.init_seed)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Flattened parameters, weights then biases, layer by layer.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                got: p.len(),
            });
        }
        let mut k = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&p[k..k + nw]);
            k += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&p[k..k + nb]);
            k += nb;
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_width() {
            return Err(Error::DimensionMismatch {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Activations of every layer; the last entry is the softmax output.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.layers.len() - 1;
        for (k, l) in self.layers.iter().enumerate() {
            let a = &acts[k];
            let mut z: Vec<f64> = (0..l.outputs)
                .map(|o| {
                    let w = &l.weights[o * l.inputs..(o + 1) * l.inputs];
                    l.biases[o] + w.iter().zip(a).map(|(w, a)| w * a).sum::<f64>()
                })
                .collect();
            if k == last {
                softmax_in_place(&mut z);
            } else {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }

    /// Pre-activation values of every hidden unit, layer by layer.
    pub fn hidden_pre_activations(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_input(x)?;
        let acts = self.activations(x);
        Ok(self.layers[..self.layers.len() - 1]
            .iter()
            .enumerate()
            .map(|(k, l)| {
                (0..l.outputs)
                    .map(|o| {
                        let w = &l.weights[o * l.inputs..(o + 1) * l.inputs];
                        l.biases[o] + w.iter().zip(&acts[k]).map(|(w, a)| w * a).sum::<f64>()
                    })
                    .collect()
            })
            .collect())
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check_input(x)?;
        let out = self.activations(x).pop().unwrap();
        Ok([out[0], out[1]])
    }

    /// Argmax class; an exact tie goes to class 0.
    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        let p = self.predict_proba(x)?;
        Ok(u8::from(p[1] > p[0]))
    }

    /// Mean cross-entropy and accuracy.
    pub fn evaluate(&self, x: &[Vec<f64>], y: &[u8]) -> Result<(f64, f64)> {
        check_shapes(x, y, self.input_width())?;
        if x.is_empty() {
            return Ok((0.0, 0.0));
        }
        let mut loss = 0.0;
        let mut correct = 0usize;
        for (row, &label) in x.iter().zip(y) {
            let p = self.predict_proba(row)?;
            loss += cross_entropy(&p, label);
            correct += usize::from(u8::from(p[1] > p[0]) == label);
        }
        Ok((loss / x.len() as f64, correct as f64 / x.len() as f64))
    }

    /// Mean cross-entropy over the given rows and its gradient.
    pub fn loss_and_gradients(&self, x: &[Vec<f64>], y: &[u8]) -> Result<(f64, Gradients)> {
        check_shapes(x, y, self.input_width())?;
        if x.is_empty() {
            return Err(Error::Empty("gradient batch"));
        }
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = self
            .layers
            .iter()
            .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
            .collect();
        let mut loss = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let acts = self.activations(row);
            let out = acts.last().unwrap();
            loss += cross_entropy(&[out[0], out[1]], label);
            // softmax + cross-entropy: dL/dz = p − onehot
            let mut delta = out.clone();
            delta[usize::from(label)] -= 1.0;
            for k in (0..self.layers.len()).rev() {
                let l = &self.layers[k];
                let a = &acts[k];
                let (gw, gb) = &mut grads[k];
                for o in 0..l.outputs {
                    gb[o] += delta[o];
                    for i in 0..l.inputs {
                        gw[o * l.inputs + i] += delta[o] * a[i];
                    }
                }
                if k > 0 {
                    delta = (0..l.inputs)
                        .map(|i| {
                            if a[i] > 0.0 {
                                (0..l.outputs)
                                    .map(|o| l.weights[o * l.inputs + i] * delta[o])
                                    .sum()
                            } else {
                                0.0
                            }
                        })
                        .collect();
                }
            }
        }
        let scale = 1.0 / x.len() as f64;
        for (gw, gb) in &mut grads {
            gw.iter_mut().chain(gb.iter_mut()).for_each(|g| *g *= scale);
        }
        Ok((loss * scale, Gradients { layers: grads }))
    }

    fn step(&mut self, grads: &Gradients, lr: f64) {
        for (l, (gw, gb)) in self.layers.iter_mut().zip(&grads.layers) {
            l.weights.iter_mut().zip(gw).for_each(|(w, g)| *w -= lr * g);
            l.biases.iter_mut().zip(gb).for_each(|(b, g)| *b -= lr * g);
        }
    }
}

impl Gradients {
    /// Flattened in the same order as [`DenseNet::params`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|(w, b)| w.iter().chain(b).copied())
            .collect()
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    z.iter_mut().for_each(|v| *v = (*v - m).exp());
    let s: f64 = z.iter().sum();
    z.iter_mut().for_each(|v| *v /= s);
}

fn cross_entropy(p: &[f64; 2], label: u8) -> f64 {
    -p[usize::from(label)].max(PROB_FLOOR).ln()
}

fn check_shapes(x: &[Vec<f64>], y: &[u8], width: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::NonBinaryLabel(bad));
    }
    Ok(())
}

/// Seeded mini-batch SGD. When `val` is given its loss and accuracy are
/// recorded each epoch; otherwise those columns repeat the training values.
pub fn train_dense(
    mut net: DenseNet,
    x: &[Vec<f64>],
    y: &[u8],
    val: Option<(&[Vec<f64>], &[u8])>,
    config: &TrainConfig,
) -> Result<(DenseNet, TrainHistory)> {
    config.validate()?;
    check_shapes(x, y, net.input_width())?;
    if x.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if let Some((vx, vy)) = val {
        check_shapes(vx, vy, net.input_width())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut history = TrainHistory::default();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let bx: Vec<Vec<f64>> = chunk.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<u8> = chunk.iter().map(|&i| y[i]).collect();
            let (loss, grads) = net.loss_and_gradients(&bx, &by)?;
            if !loss.is_finite() || grads.flatten().iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged(format!(
                    "non-finite loss or gradient in epoch {} (learning rate {})",
                    epoch + 1,
                    config.learning_rate
                )));
            }
            net.step(&grads, config.learning_rate);
        }
        let (train_loss, train_accuracy) = net.evaluate(x, y)?;
        if !train_loss.is_finite() {
            return Err(Error::Diverged(format!(
                "training loss is {train_loss} after epoch {}",
                epoch + 1
            )));
        }
        let (val_loss, val_accuracy) = match val {
            Some((vx, vy)) => net.evaluate(vx, vy)?,
            None => (train_loss, train_accuracy),
        };
        log::debug!(
            "epoch {}: loss {train_loss:.4} acc {train_accuracy:.3} val_loss {val_loss:.4} val_acc {val_accuracy:.3}",
            epoch + 1
        );
        history.epochs.push(EpochStats {
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
    }
    Ok((net, history))
}
