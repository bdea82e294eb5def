//! Per-video histogram features and a deterministic linear max-margin
//! classifier (one-vs-rest hinge loss, Pegasos-style stochastic subgradient
//! schedule).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::mix_seeds;

/// Per-video activation-frequency feature vector: counts of column
/// activations across a video's frames divided by the frame count.
#[derive(Debug, Clone, PartialEq)]
pub struct SdrHistogram {
    counts: Vec<f64>,
    label: Option<String>,
}

impl SdrHistogram {
    pub fn new(counts: Vec<f64>) -> Self {
        SdrHistogram {
            counts,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Concatenates several histograms into one feature vector (used by the
    /// multi-pooler mode).
    pub fn concat(parts: &[SdrHistogram]) -> SdrHistogram {
        let mut counts = Vec::with_capacity(parts.iter().map(|p| p.counts.len()).sum());
        for p in parts {
            counts.extend_from_slice(&p.counts);
        }
        SdrHistogram {
            counts,
            label: parts.iter().find_map(|p| p.label.clone()),
        }
    }
}

/// Accumulates per-frame active column sets into a normalized histogram:
/// `counts[c] = (#frames where column c is active) / frames`.
pub fn accumulate_histogram(
    active_sets: &[Vec<usize>],
    num_columns: usize,
    frames: usize,
) -> Result<SdrHistogram> {
    if frames == 0 {
        return Err(Error::input("histogram needs at least one frame"));
    }
    let mut hits = vec![0u32; num_columns];
    for set in active_sets {
        for &c in set {
            if c >= num_columns {
                return Err(Error::input(format!(
                    "active column index {c} out of range {num_columns}"
                )));
            }
            hits[c] += 1;
        }
    }
    let counts = hits.iter().map(|&h| h as f64 / frames as f64).collect();
    Ok(SdrHistogram::new(counts))
}

/// One-vs-rest linear model: one weight vector and bias per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    classes: Vec<String>,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl LinearModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Per-class decision scores `w . x + b`.
    pub fn scores(&self, feature: &[f64]) -> Result<Vec<f64>> {
        if self.weights.is_empty() || feature.len() != self.weights[0].len() {
            return Err(Error::input(format!(
                "feature has dimension {}, model expects {}",
                feature.len(),
                self.weights.first().map_or(0, Vec::len)
            )));
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, feature) + b)
            .collect())
    }

    /// Argmax class; score ties break toward the earlier class in order.
    pub fn predict(&self, feature: &SdrHistogram) -> Result<&str> {
        let scores = self.scores(feature.counts())?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = i;
            }
        }
        Ok(&self.classes[best])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    /// Regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            lambda: 1e-4,
            epochs: 50,
            seed: 1,
        }
    }
}

/// Trains one-vs-rest hinge-loss linear classifiers with the Pegasos
/// schedule: at global step `t` the learning rate is `1 / (lambda * t)`,
/// weights decay by `1 - 1/t` and margin violations add `eta * y * x`.
/// Sample order is a per-epoch seeded shuffle, so training is reproducible.
pub fn train_classifier(features: &[SdrHistogram], params: &TrainParams) -> Result<LinearModel> {
    if features.is_empty() {
        return Err(Error::config("training set is empty"));
    }
    let dim = features[0].counts().len();
    let mut classes: Vec<String> = Vec::new();
    for f in features {
        if f.counts().len() != dim {
            return Err(Error::input(format!(
                "feature dimensions differ: {} vs {dim}",
                f.counts().len()
            )));
        }
        let label = f
            .label()
            .ok_or_else(|| Error::input("training histogram is missing its label"))?;
        if !classes.iter().any(|c| c == label) {
            classes.push(label.to_string());
        }
    }
    if classes.len() < 2 {
        return Err(Error::config(
            "training needs at least two distinct classes",
        ));
    }

    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for (k, class) in classes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seeds(params.seed, k as u64));
        let labels: Vec<f64> = features
            .iter()
            .map(|f| if f.label() == Some(class) { 1.0 } else { -1.0 })
            .collect();
        let mut w = vec![0.0f64; dim];
        let mut b = 0.0f64;
        let mut order: Vec<usize> = (0..features.len()).collect();
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let x = features[i].counts();
                let y = labels[i];
                let eta = 1.0 / (params.lambda * t as f64);
                let margin = y * (dot(&w, x) + b);
                let decay = 1.0 - 1.0 / t as f64;
                for wj in w.iter_mut() {
                    *wj *= decay;
                }
                if margin < 1.0 {
                    let step = eta * y;
                    for (wj, xj) in w.iter_mut().zip(x) {
                        *wj += step * xj;
                    }
                    b += step;
                }
            }
        }
        weights.push(w);
        biases.push(b);
    }

    Ok(LinearModel {
        classes,
        weights,
        biases,
    })
}
