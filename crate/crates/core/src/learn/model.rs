//! Uniform train/predict interface over the native classifiers, plus
//! versioned model serialization.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::derive_seed;
use crate::types::Label;

use super::forest::{Forest, ForestConfig};
use super::simple::{DummyModel, GaussianNbModel, KnnModel, LogisticModel};
use super::tree::{DecisionTree, TreeConfig};

pub const MODEL_IDS: [&str; 7] = [
    "random_forest",
    "extra_trees",
    "decision_tree",
    "knn",
    "gaussian_nb",
    "logistic_regression",
    "dummy_majority",
];

/// Hyperparameters shared by the model family, with library-style defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    pub knn_k: usize,
    pub logistic_lr: f64,
    pub logistic_l2: f64,
    pub logistic_epochs: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
            knn_k: 5,
            logistic_lr: 0.1,
            logistic_l2: 1e-4,
            logistic_epochs: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum ModelKind {
    Forest(Forest),
    Tree(DecisionTree),
    Knn(KnnModel),
    Nb(GaussianNbModel),
    Logistic(LogisticModel),
    Dummy(DummyModel),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model_id: String,
    pub feature_names: Vec<String>,
    pub seed: u64,
    kind: ModelKind,
}

fn to_binary(labels: &[Label]) -> Result<Vec<u8>> {
    let y: Vec<u8> = labels.iter().map(|l| l.as_u8()).collect();
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::DegenerateLabels);
    }
    Ok(y)
}

/// Train one model, deterministic given the seed.
pub fn train(
    model_id: &str,
    x: &Matrix,
    labels: &[Label],
    feature_names: &[String],
    hyper: &Hyperparams,
    seed: u64,
) -> Result<TrainedModel> {
    let y = to_binary(labels)?;
    let kind = match model_id {
        "random_forest" => ModelKind::Forest(Forest::fit(
            x,
            &y,
            &ForestConfig {
                n_trees: hyper.n_trees,
                max_depth: hyper.max_depth,
                min_samples_leaf: hyper.min_samples_leaf,
                min_samples_split: hyper.min_samples_split,
                ..ForestConfig::default()
            },
            seed,
        )),
        "extra_trees" => ModelKind::Forest(Forest::fit(
            x,
            &y,
            &ForestConfig {
                max_depth: hyper.max_depth,
                min_samples_leaf: hyper.min_samples_leaf,
                min_samples_split: hyper.min_samples_split,
                ..ForestConfig::extra_trees(hyper.n_trees)
            },
            seed,
        )),
        "decision_tree" => {
            let cfg = TreeConfig {
                max_depth: hyper.max_depth,
                min_samples_leaf: hyper.min_samples_leaf,
                min_samples_split: hyper.min_samples_split,
                ..TreeConfig::default()
            };
            let mut rng = crate::rng::unit_rng(derive_seed(seed, "tree", 0), "grow", 0);
            ModelKind::Tree(DecisionTree::fit(x, &y, &cfg, &mut rng))
        }
        "knn" => ModelKind::Knn(KnnModel::fit(x, &y, hyper.knn_k)),
        "gaussian_nb" => ModelKind::Nb(GaussianNbModel::fit(x, &y)),
        "logistic_regression" => ModelKind::Logistic(LogisticModel::fit(
            x,
            &y,
            hyper.logistic_lr,
            hyper.logistic_l2,
            hyper.logistic_epochs,
        )),
        "dummy_majority" => ModelKind::Dummy(DummyModel::fit(&y)),
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    Ok(TrainedModel {
        model_id: model_id.to_string(),
        feature_names: feature_names.to_vec(),
        seed,
        kind,
    })
}

/// Class-1 probabilities and thresholded labels (score >= 0.5 means bot).
pub fn predict(model: &TrainedModel, x: &Matrix) -> Result<(Vec<Label>, Vec<f64>)> {
    if x.cols() != model.feature_names.len() {
        return Err(Error::SchemaMismatch {
            expected: format!("{} feature columns", model.feature_names.len()),
            found: format!("{} feature columns", x.cols()),
        });
    }
    let scores: Vec<f64> = (0..x.rows())
        .map(|r| {
            let row = x.row(r);
            match &model.kind {
                ModelKind::Forest(f) => f.score(row),
                ModelKind::Tree(t) => t.predict_prob(row),
                ModelKind::Knn(k) => k.score(row),
                ModelKind::Nb(nb) => nb.score(row),
                ModelKind::Logistic(l) => l.score(row),
                ModelKind::Dummy(d) => d.score(),
            }
        })
        .collect();
    let labels = scores
        .iter()
        .map(|&s| if s >= 0.5 { Label::Bot } else { Label::Human })
        .collect();
    Ok((labels, scores))
}

const MODEL_FORMAT: &str = "botminer-model/v1";

#[derive(Serialize, Deserialize)]
struct ModelEnvelope {
    format: String,
    model: TrainedModel,
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let envelope = ModelEnvelope {
        format: MODEL_FORMAT.to_string(),
        model: model.clone(),
    };
    let data = serde_json::to_vec_pretty(&envelope)
        .map_err(|e| Error::InvalidConfig(format!("model serialization: {e}")))?;
    fs::write(path, data).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let data = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let envelope: ModelEnvelope = serde_json::from_slice(&data).map_err(|e| {
        Error::SchemaMismatch {
            expected: MODEL_FORMAT.to_string(),
            found: format!("unparseable model file: {e}"),
        }
    })?;
    if envelope.format != MODEL_FORMAT {
        return Err(Error::SchemaMismatch {
            expected: MODEL_FORMAT.to_string(),
            found: envelope.format,
        });
    }
    Ok(envelope.model)
}
