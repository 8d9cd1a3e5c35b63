//! Bagged forests of CART trees (random forest) and randomized-threshold
//! ensembles without bagging (extra trees).
//!
//! Trees grow in parallel; every tree draws from its own seeded generator so
//! parallel and serial runs produce identical forests.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::rng::unit_rng;

use super::tree::{DecisionTree, TreeConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Bootstrap-resample the training rows per tree (random forest); extra
    /// trees set this to false and use random thresholds instead.
    pub bootstrap: bool,
    pub random_thresholds: bool,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            bootstrap: true,
            random_thresholds: false,
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }
}

impl ForestConfig {
    pub fn extra_trees(n_trees: usize) -> Self {
        ForestConfig {
            n_trees,
            bootstrap: false,
            random_thresholds: true,
            ..ForestConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<DecisionTree>,
    importances: Vec<f64>,
    n_features: usize,
}

impl Forest {
    pub fn fit(x: &Matrix, y: &[u8], cfg: &ForestConfig, seed: u64) -> Forest {
        let n = x.rows();
        let d = x.cols();
        let max_features = ((d as f64).sqrt().ceil() as usize).clamp(1, d);
        let tree_cfg = TreeConfig {
            max_depth: cfg.max_depth,
            min_samples_split: cfg.min_samples_split,
            min_samples_leaf: cfg.min_samples_leaf,
            max_features: Some(max_features),
            random_thresholds: cfg.random_thresholds,
        };

        let grown: Vec<(DecisionTree, Vec<f64>)> = (0..cfg.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = unit_rng(seed, "tree", t as u64);
                let sample: Vec<usize> = if cfg.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_indices(x, y, sample, &tree_cfg, &mut rng)
            })
            .collect();

        // Per-tree importances normalized to sum 1, averaged, renormalized.
        let mut importances = vec![0.0; d];
        for (_, imp) in &grown {
            let total: f64 = imp.iter().sum();
            if total > 0.0 {
                for (acc, v) in importances.iter_mut().zip(imp) {
                    *acc += v / total;
                }
            }
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            for v in &mut importances {
                *v /= total;
            }
        }

        Forest {
            trees: grown.into_iter().map(|(t, _)| t).collect(),
            importances,
            n_features: d,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Mean Gini impurity decrease per feature, normalized to sum to 1.
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    /// Fraction of trees voting the positive class.
    pub fn score(&self, row: &[f64]) -> f64 {
        let votes: u32 = self.trees.iter().map(|t| u32::from(t.predict_vote(row))).sum();
        f64::from(votes) / self.trees.len() as f64
    }
}
