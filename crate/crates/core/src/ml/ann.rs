//! Feedforward network: one ReLU hidden layer, softmax output, trained by
//! mini-batch RMSprop on categorical cross-entropy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dataset::Dataset;

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnConfig {
    pub input_dim: usize,
    pub hidden_units: usize,
    pub epochs: usize,
    pub batch: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for AnnConfig {
    fn default() -> Self {
        AnnConfig {
            input_dim: 2,
            hidden_units: 32,
            epochs: 30,
            batch: 32,
            learning_rate: 5e-3,
            seed: 1,
        }
    }
}

const RMSPROP_DECAY: f64 = 0.9;
const RMSPROP_EPS: f64 = 1e-8;

/// Weights of the two-layer network: hidden = ReLU(w1 x + b1),
/// output = Softmax(w2 hidden + b2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnModel {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

impl AnnModel {
    pub fn input_dim(&self) -> usize {
        self.w1.first().map_or(0, Vec::len)
    }

    pub fn hidden_units(&self) -> usize {
        self.w1.len()
    }

    pub fn n_classes(&self) -> usize {
        self.w2.len()
    }

    fn zeros(input_dim: usize, hidden: usize, classes: usize) -> Self {
        AnnModel {
            w1: vec![vec![0.0; input_dim]; hidden],
            b1: vec![0.0; hidden],
            w2: vec![vec![0.0; hidden]; classes],
            b2: vec![0.0; classes],
        }
    }

    fn glorot(input_dim: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layer = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-limit..limit)).collect())
                .collect()
        };
        AnnModel {
            w1: layer(hidden, input_dim),
            b1: vec![0.0; hidden],
            w2: layer(classes, hidden),
            b2: vec![0.0; classes],
        }
    }

    fn check_finite(&self) -> bool {
        let finite = |m: &[Vec<f64>]| m.iter().flatten().all(|v| v.is_finite());
        finite(&self.w1)
            && finite(&self.w2)
            && self.b1.iter().all(|v| v.is_finite())
            && self.b2.iter().all(|v| v.is_finite())
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

fn hidden_activations(model: &AnnModel, x: &[f64]) -> Vec<f64> {
    model
        .w1
        .iter()
        .zip(&model.b1)
        .map(|(row, b)| {
            let z: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b;
            z.max(0.0)
        })
        .collect()
}

fn logits_from_hidden(model: &AnnModel, hidden: &[f64]) -> Vec<f64> {
    model
        .w2
        .iter()
        .zip(&model.b2)
        .map(|(row, b)| row.iter().zip(hidden).map(|(w, h)| w * h).sum::<f64>() + b)
        .collect()
}

/// Class probabilities for one input.
pub fn ann_forward(model: &AnnModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "network expects {} inputs, got {}",
            model.input_dim(),
            x.len()
        )));
    }
    let hidden = hidden_activations(model, x);
    Ok(softmax(&logits_from_hidden(model, &hidden)))
}

/// Per-parameter gradient accumulator shaped like the model.
#[derive(Debug, Clone)]
pub struct AnnGradients {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

/// Mean cross-entropy over a batch and its gradient by backpropagation.
/// The output-layer error is the textbook softmax + cross-entropy form,
/// predicted probabilities minus the one-hot target.
pub fn ann_loss_and_gradients(
    model: &AnnModel,
    features: &[&[f64]],
    labels: &[usize],
) -> Result<(f64, AnnGradients)> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::BadDataset("empty or mismatched batch".into()));
    }
    let classes = model.n_classes();
    let mut grads = AnnGradients {
        w1: vec![vec![0.0; model.input_dim()]; model.hidden_units()],
        b1: vec![0.0; model.hidden_units()],
        w2: vec![vec![0.0; model.hidden_units()]; classes],
        b2: vec![0.0; classes],
    };
    let mut loss = 0.0;
    let scale = 1.0 / features.len() as f64;
    for (&x, &label) in features.iter().zip(labels) {
        if label >= classes {
            return Err(Error::BadDataset(format!(
                "label {label} outside {classes}-class output"
            )));
        }
        let hidden = hidden_activations(model, x);
        let probs = softmax(&logits_from_hidden(model, &hidden));
        loss -= probs[label].ln() * scale;

        let dlogits: Vec<f64> = probs
            .iter()
            .enumerate()
            .map(|(k, &pk)| (pk - f64::from(u8::from(k == label))) * scale)
            .collect();
        for (k, &dz) in dlogits.iter().enumerate() {
            for (j, &h) in hidden.iter().enumerate() {
                grads.w2[k][j] += dz * h;
            }
            grads.b2[k] += dz;
        }
        for (j, &h) in hidden.iter().enumerate() {
            if h <= 0.0 {
                continue;
            }
            let dh: f64 = dlogits
                .iter()
                .enumerate()
                .map(|(k, &dz)| dz * model.w2[k][j])
                .sum();
            for (i, &xi) in x.iter().enumerate() {
                grads.w1[j][i] += dh * xi;
            }
            grads.b1[j] += dh;
        }
    }
    Ok((loss, grads))
}

/// Mean cross-entropy of the model over a whole dataset.
pub fn ann_loss(model: &AnnModel, data: &Dataset) -> Result<f64> {
    let mut loss = 0.0;
    for (x, &label) in data.features().iter().zip(data.labels()) {
        let probs = ann_forward(model, x)?;
        loss -= probs[label].ln();
    }
    Ok(loss / data.len() as f64)
}

/// Trains the network; deterministic for a given config seed.
pub fn ann_train(data: &Dataset, config: &AnnConfig) -> Result<AnnModel> {
    if data.input_dim() != config.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "dataset has {} features, config expects {}",
            data.input_dim(),
            config.input_dim
        )));
    }
    if data.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Training("need at least two classes".into()));
    }
    if config.batch == 0 || config.epochs == 0 || config.hidden_units == 0 {
        return Err(Error::InvalidParameter(
            "epochs, batch, and hidden_units must be positive".into(),
        ));
    }
    let classes = data.n_classes();
    let mut model = AnnModel::glorot(config.input_dim, config.hidden_units, classes, config.seed);
    let mut cache = AnnModel::zeros(config.input_dim, config.hidden_units, classes);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch) {
            let feats: Vec<&[f64]> = chunk.iter().map(|&i| data.features()[i].as_slice()).collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| data.labels()[i]).collect();
            let (loss, grads) = ann_loss_and_gradients(&model, &feats, &labels)?;
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss at epoch {epoch}; reduce the learning rate"
                )));
            }
            let update = |w: &mut f64, c: &mut f64, g: f64| {
                *c = RMSPROP_DECAY * *c + (1.0 - RMSPROP_DECAY) * g * g;
                *w -= config.learning_rate * g / (c.sqrt() + RMSPROP_EPS);
            };
            for (wrow, (crow, grow)) in model
                .w1
                .iter_mut()
                .zip(cache.w1.iter_mut().zip(&grads.w1))
            {
                for (w, (c, &g)) in wrow.iter_mut().zip(crow.iter_mut().zip(grow)) {
                    update(w, c, g);
                }
            }
            for (w, (c, &g)) in model.b1.iter_mut().zip(cache.b1.iter_mut().zip(&grads.b1)) {
                update(w, c, g);
            }
            for (wrow, (crow, grow)) in model
                .w2
                .iter_mut()
                .zip(cache.w2.iter_mut().zip(&grads.w2))
            {
                for (w, (c, &g)) in wrow.iter_mut().zip(crow.iter_mut().zip(grow)) {
                    update(w, c, g);
                }
            }
            for (w, (c, &g)) in model.b2.iter_mut().zip(cache.b2.iter_mut().zip(&grads.b2)) {
                update(w, c, g);
            }
        }
        if !model.check_finite() {
            return Err(Error::Training(format!(
                "weights diverged at epoch {epoch}; reduce the learning rate"
            )));
        }
    }
    Ok(model)
}
