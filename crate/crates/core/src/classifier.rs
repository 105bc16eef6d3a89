//! Linear softmax head over a trajectory set.
//!
//! Each mode gets one row of weights; its logit is the dot product with the
//! agent feature vector. Training minimizes cross-entropy against the mode
//! closest to the ground truth.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::PredictionResult;
use crate::traj::{closest_index, AgentState, DistanceKind, Trajectory, TrajectorySet};

/// Length of [`FeatureVector::from_state`].
pub const DEFAULT_FEATURE_DIM: usize = 4;
/// Position of the constant bias feature in [`FeatureVector::from_state`].
pub const BIAS_INDEX: usize = 3;

/// Central-difference step used by [`gradient_check`].
pub const GRADIENT_CHECK_STEP: f64 = 1e-5;
// Denominator floor for relative errors. Entries below it are compared in
// absolute terms, since finite differences cannot resolve them.
const GRADIENT_CHECK_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature vector must be non-empty and finite"));
        }
        Ok(FeatureVector(values))
    }

    /// `(speed, accel, yaw_rate, 1.0)`.
    pub fn from_state(state: &AgentState) -> Self {
        FeatureVector(vec![state.speed, state.accel, state.yaw_rate, 1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[derive(Debug, Clone)]
pub struct SoftmaxModel {
    feature_dim: usize,
    /// Row-major, one row per mode.
    weights: Vec<f64>,
    set: Arc<TrajectorySet>,
}

impl SoftmaxModel {
    pub fn zeros(set: Arc<TrajectorySet>, feature_dim: usize) -> Self {
        SoftmaxModel {
            feature_dim,
            weights: vec![0.0; set.len() * feature_dim],
            set,
        }
    }

    pub fn from_weights(set: Arc<TrajectorySet>, feature_dim: usize, weights: Vec<f64>) -> Result<Self> {
        if feature_dim == 0 || weights.len() != set.len() * feature_dim {
            return Err(Error::DimensionMismatch {
                expected: set.len() * feature_dim,
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights must be finite"));
        }
        Ok(SoftmaxModel { feature_dim, weights, set })
    }

    pub fn num_modes(&self) -> usize {
        self.set.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn row(&self, mode: usize) -> &[f64] {
        &self.weights[mode * self.feature_dim..(mode + 1) * self.feature_dim]
    }

    pub fn set(&self) -> &Arc<TrajectorySet> {
        &self.set
    }

    fn check_features(&self, features: &FeatureVector) -> Result<()> {
        if features.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                got: features.len(),
            });
        }
        Ok(())
    }

    pub fn logits(&self, features: &FeatureVector) -> Result<Vec<f64>> {
        self.check_features(features)?;
        Ok(self
            .weights
            .chunks_exact(self.feature_dim)
            .map(|row| row.iter().zip(features.values()).map(|(w, x)| w * x).sum())
            .collect())
    }

    pub fn probabilities(&self, features: &FeatureVector) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(features)?))
    }

    /// Content hash of the bound trajectory set.
    pub fn set_fingerprint(&self) -> String {
        set_fingerprint(&self.set)
    }
}

/// SHA-256 over the set's provenance, profiles and mode coordinates.
pub fn set_fingerprint(set: &TrajectorySet) -> String {
    let mut hasher = Sha256::new();
    hasher.update(set.provenance().to_string().as_bytes());
    hasher.update((set.len() as u64).to_le_bytes());
    hasher.update(set.dt().to_bits().to_le_bytes());
    for p in set.profiles().unwrap_or_default() {
        hasher.update(p.a_lat.to_bits().to_le_bytes());
        hasher.update(p.a_lon.to_bits().to_le_bytes());
    }
    for mode in set.modes() {
        for p in mode.points() {
            hasher.update(p[0].to_bits().to_le_bytes());
            hasher.update(p[1].to_bits().to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

/// Softmax probabilities over the model's set.
pub fn predict(model: &SoftmaxModel, features: &FeatureVector) -> Result<PredictionResult> {
    PredictionResult::new(model.set.clone(), model.probabilities(features)?)
}

/// Training label: the mode closest to `truth` in average point-wise distance.
pub fn label(truth: &Trajectory, set: &TrajectorySet) -> Result<usize> {
    label_with(truth, set, DistanceKind::AvgL2)
}

pub fn label_with(truth: &Trajectory, set: &TrajectorySet, kind: DistanceKind) -> Result<usize> {
    Ok(closest_index(truth, set, kind)?.0)
}

/// Cross-entropy of `label` and its gradient with respect to the weights
/// (row-major, same layout as [`SoftmaxModel::weights`]).
pub fn loss_and_gradient(model: &SoftmaxModel, features: &FeatureVector, label: usize) -> Result<(f64, Vec<f64>)> {
    if label >= model.num_modes() {
        return Err(Error::invalid(format!("label {label} out of range")));
    }
    let probs = model.probabilities(features)?;
    let loss = cross_entropy_from_probs(&model.logits(features)?, label);
    let mut grad = Vec::with_capacity(model.weights.len());
    for (mode, &p) in probs.iter().enumerate() {
        let coeff = p - if mode == label { 1.0 } else { 0.0 };
        grad.extend(features.values().iter().map(|x| coeff * x));
    }
    Ok((loss, grad))
}

// log-sum-exp form keeps the loss finite when the label probability underflows
fn cross_entropy_from_probs(logits: &[f64], label: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
    lse - logits[label]
}

pub fn cross_entropy(model: &SoftmaxModel, features: &FeatureVector, label: usize) -> Result<f64> {
    Ok(cross_entropy_from_probs(&model.logits(features)?, label))
}

/// Largest relative discrepancy between the analytic gradient and central
/// finite differences.
pub fn gradient_check(model: &SoftmaxModel, features: &FeatureVector, label: usize) -> Result<f64> {
    let (_, analytic) = loss_and_gradient(model, features, label)?;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let w = model.weights[i];
        probe.weights[i] = w + GRADIENT_CHECK_STEP;
        let up = cross_entropy(&probe, features, label)?;
        probe.weights[i] = w - GRADIENT_CHECK_STEP;
        let down = cross_entropy(&probe, features, label)?;
        probe.weights[i] = w;
        let numeric = (up - down) / (2.0 * GRADIENT_CHECK_STEP);
        let scale = a.abs().max(numeric.abs()).max(GRADIENT_CHECK_FLOOR);
        worst = worst.max((a - numeric).abs() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            lr: 1e-2,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SoftmaxModel,
    /// Mean training cross-entropy before training and after each epoch.
    pub loss_curve: Vec<f64>,
}

/// Label every example against `set` and train.
pub fn train(dataset: &[(FeatureVector, Trajectory)], set: Arc<TrajectorySet>, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let examples = dataset
        .iter()
        .map(|(features, truth)| {
            Ok(LabeledExample {
                features: features.clone(),
                label: label(truth, &set)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    train_labeled(&examples, set, cfg)
}

/// Mini-batch gradient descent on mean cross-entropy from zero weights.
/// Batches are reshuffled every epoch from a generator seeded by `cfg.seed`.
pub fn train_labeled(examples: &[LabeledExample], set: Arc<TrajectorySet>, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let first = examples.first().ok_or(Error::EmptyDataset)?;
    if cfg.batch_size == 0 || !(cfg.lr.is_finite() && cfg.lr > 0.0) {
        return Err(Error::invalid("batch size and learning rate must be positive"));
    }
    let dim = first.features.len();
    let mut model = SoftmaxModel::zeros(set, dim);
    for ex in examples {
        model.check_features(&ex.features)?;
        if ex.label >= model.num_modes() {
            return Err(Error::invalid(format!("label {} out of range", ex.label)));
        }
    }

    let mean_loss = |model: &SoftmaxModel| -> Result<f64> {
        let total = examples
            .iter()
            .map(|ex| cross_entropy(model, &ex.features, ex.label))
            .sum::<Result<f64>>()?;
        Ok(total / examples.len() as f64)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut loss_curve = vec![mean_loss(&model)?];
    let mut grad_sum = vec![0.0; model.weights.len()];
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grad_sum.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let ex = &examples[i];
                let probs = model.probabilities(&ex.features)?;
                for (mode, &p) in probs.iter().enumerate() {
                    let coeff = p - if mode == ex.label { 1.0 } else { 0.0 };
                    let row = &mut grad_sum[mode * dim..(mode + 1) * dim];
                    for (g, x) in row.iter_mut().zip(ex.features.values()) {
                        *g += coeff * x;
                    }
                }
            }
            let step = cfg.lr / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&grad_sum) {
                *w -= step * g;
            }
        }
        loss_curve.push(mean_loss(&model)?);
    }
    Ok(TrainOutcome { model, loss_curve })
}

/// Fraction of examples whose most likely mode is their label.
pub fn accuracy(model: &SoftmaxModel, examples: &[LabeledExample]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0;
    for ex in examples {
        if predict(model, &ex.features)?.most_likely() == ex.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / examples.len() as f64)
}
