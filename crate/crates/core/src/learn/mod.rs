//! Normalization, native classifiers, stratified cross-validation and the
//! confusion-matrix metric suite.

mod cv;
mod forest;
mod metrics;
mod model;
mod simple;
mod tree;

pub use cv::{
    cross_validate, cross_validate_with_folds, fingerprint, stratified_folds, CvData, CvSpec,
    EvaluationReport, FitAudit, FitEvent, FitTrace, FoldFit, MetricSummary,
};
pub use forest::{Forest, ForestConfig};
pub use metrics::{auc_score, metrics, ConfusionMatrix, Metrics, UndefinedFlags};
pub use model::{load_model, predict, save_model, train, Hyperparams, TrainedModel, MODEL_IDS};
pub use tree::{DecisionTree, TreeConfig};

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

/// Per-feature min-max scaler. Fit on training rows only; application clamps
/// out-of-range values to [0, 1] and maps constant features to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl Scaler {
    pub fn fit(matrix: &Matrix) -> Scaler {
        let cols = matrix.cols();
        let mut mins = vec![f64::INFINITY; cols];
        let mut maxs = vec![f64::NEG_INFINITY; cols];
        for r in 0..matrix.rows() {
            for (c, &v) in matrix.row(r).iter().enumerate() {
                mins[c] = mins[c].min(v);
                maxs[c] = maxs[c].max(v);
            }
        }
        Scaler { mins, maxs }
    }

    pub fn apply(&self, matrix: &mut Matrix) {
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                let (lo, hi) = (self.mins[c], self.maxs[c]);
                let v = matrix.get(r, c);
                let scaled = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
                matrix.set(r, c, scaled);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_to_unit_interval() {
        let mut m = Matrix::from_rows(vec![vec![0.0], vec![5.0], vec![10.0]]);
        let s = Scaler::fit(&m);
        s.apply(&mut m);
        assert_eq!(m.column(0), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let mut m = Matrix::from_rows(vec![vec![7.0], vec![7.0]]);
        let s = Scaler::fit(&m);
        s.apply(&mut m);
        assert_eq!(m.column(0), vec![0.0, 0.0]);
    }

    #[test]
    fn out_of_range_test_values_clamp() {
        let train = Matrix::from_rows(vec![vec![0.0], vec![10.0]]);
        let s = Scaler::fit(&train);
        let mut test = Matrix::from_rows(vec![vec![12.0], vec![-3.0]]);
        s.apply(&mut test);
        assert_eq!(test.column(0), vec![1.0, 0.0]);
    }
}
