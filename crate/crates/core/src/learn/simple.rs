//! k-nearest-neighbours, Gaussian naive Bayes, logistic regression and the
//! majority-class dummy baseline.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    train: Matrix,
    y: Vec<u8>,
}

impl KnnModel {
    pub fn fit(x: &Matrix, y: &[u8], k: usize) -> KnnModel {
        KnnModel {
            k: k.clamp(1, x.rows()),
            train: x.clone(),
            y: y.to_vec(),
        }
    }

    /// Fraction of positive labels among the k nearest neighbours
    /// (Euclidean; distance ties broken by training index).
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut dists: Vec<(f64, usize)> = (0..self.train.rows())
            .map(|i| {
                let d = self
                    .train
                    .row(i)
                    .iter()
                    .zip(row)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let pos: usize = dists[..self.k].iter().map(|&(_, i)| usize::from(self.y[i] == 1)).sum();
        pos as f64 / self.k as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianNbModel {
    log_prior: [f64; 2],
    mean: [Vec<f64>; 2],
    var: [Vec<f64>; 2],
}

impl GaussianNbModel {
    pub fn fit(x: &Matrix, y: &[u8]) -> GaussianNbModel {
        let d = x.cols();
        let n = x.rows() as f64;
        let mut count = [0.0f64; 2];
        let mut mean = [vec![0.0; d], vec![0.0; d]];
        let mut var = [vec![0.0; d], vec![0.0; d]];
        for r in 0..x.rows() {
            let c = y[r] as usize;
            count[c] += 1.0;
            for (m, v) in mean[c].iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        for c in 0..2 {
            for m in &mut mean[c] {
                *m /= count[c].max(1.0);
            }
        }
        let mut max_var = 0.0f64;
        for r in 0..x.rows() {
            let c = y[r] as usize;
            for j in 0..d {
                let diff = x.get(r, j) - mean[c][j];
                var[c][j] += diff * diff;
            }
        }
        for c in 0..2 {
            for v in &mut var[c] {
                *v /= count[c].max(1.0);
                max_var = max_var.max(*v);
            }
        }
        // Variance smoothing keeps degenerate features finite.
        let eps = 1e-9 * max_var.max(1e-12);
        for c in 0..2 {
            for v in &mut var[c] {
                *v += eps;
            }
        }
        GaussianNbModel {
            log_prior: [(count[0] / n).max(1e-300).ln(), (count[1] / n).max(1e-300).ln()],
            mean,
            var,
        }
    }

    /// Posterior probability of the positive class.
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut log_like = [0.0f64; 2];
        for c in 0..2 {
            log_like[c] = self.log_prior[c];
            for (j, &v) in row.iter().enumerate() {
                let var = self.var[c][j];
                let diff = v - self.mean[c][j];
                log_like[c] +=
                    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - diff * diff / (2.0 * var);
            }
        }
        let max = log_like[0].max(log_like[1]);
        let e0 = (log_like[0] - max).exp();
        let e1 = (log_like[1] - max).exp();
        e1 / (e0 + e1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    weights: Vec<f64>,
    bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LogisticModel {
    /// Full-batch gradient descent from zero weights with L2 regularization.
    pub fn fit(x: &Matrix, y: &[u8], lr: f64, l2: f64, epochs: usize) -> LogisticModel {
        let n = x.rows();
        let d = x.cols();
        let mut w = vec![0.0f64; d];
        let mut b = 0.0f64;
        for _ in 0..epochs {
            let mut grad_w = vec![0.0f64; d];
            let mut grad_b = 0.0f64;
            for r in 0..n {
                let row = x.row(r);
                let z = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b;
                let err = sigmoid(z) - f64::from(y[r]);
                for (g, &v) in grad_w.iter_mut().zip(row) {
                    *g += err * v;
                }
                grad_b += err;
            }
            let inv_n = 1.0 / n as f64;
            for (wi, g) in w.iter_mut().zip(&grad_w) {
                *wi -= lr * (g * inv_n + l2 * *wi);
            }
            b -= lr * grad_b * inv_n;
        }
        LogisticModel { weights: w, bias: b }
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        let z = row.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DummyModel {
    /// Training fraction of the positive class; the constant score.
    pos_fraction: f64,
}

impl DummyModel {
    pub fn fit(y: &[u8]) -> DummyModel {
        let pos = y.iter().filter(|&&v| v == 1).count() as f64;
        DummyModel {
            pos_fraction: pos / y.len().max(1) as f64,
        }
    }

    pub fn score(&self) -> f64 {
        self.pos_fraction
    }
}
