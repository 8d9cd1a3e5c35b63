//! Stratified cross-validation with per-fold refitting of every
//! fold-dependent transform (scaler, color-binning model), plus an audit
//! trace proving that no fit ever touched a test row.

use std::sync::Mutex;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, unit_rng};
use crate::types::Label;

use super::metrics::{metrics, ConfusionMatrix, Metrics};
use super::model::{predict, train, Hyperparams};
use super::Scaler;

/// Cross-validation layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvSpec {
    pub folds: usize,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        CvSpec {
            folds: 10,
            stratified: true,
            seed: 0,
        }
    }
}

/// Hook for columns whose values depend on the training split. The
/// implementation must fit on `train_rows` only and then rewrite its columns
/// for every row of `matrix`.
pub trait FoldFit: Sync {
    fn refit(&self, train_rows: &[usize], matrix: &mut Matrix, audit: Option<FitAudit<'_>>);
}

/// Everything cross-validation needs to evaluate a model on one dataset.
#[derive(Clone, Copy)]
pub struct CvData<'a> {
    pub matrix: &'a Matrix,
    pub labels: &'a [Label],
    pub fold_fit: Option<&'a dyn FoldFit>,
}

impl<'a> CvData<'a> {
    pub fn plain(matrix: &'a Matrix, labels: &'a [Label]) -> Self {
        CvData {
            matrix,
            labels,
            fold_fit: None,
        }
    }
}

/// One recorded fit event: which rows the fit consumed and a fingerprint of
/// what it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitEvent {
    pub fold: usize,
    pub what: String,
    pub rows: Vec<usize>,
    pub fingerprint: u64,
}

/// Thread-safe recorder for fit events, used by leakage audits.
#[derive(Debug, Default)]
pub struct FitTrace {
    events: Mutex<Vec<FitEvent>>,
}

/// Order-insensitive fingerprint of a serializable fitted artifact.
pub fn fingerprint<T: Serialize>(value: &T) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    serde_json::to_vec(value).unwrap_or_default().hash(&mut h);
    h.finish()
}

impl FitTrace {
    pub fn new() -> Self {
        FitTrace::default()
    }

    pub fn record(&self, fold: usize, what: &str, rows: &[usize], fingerprint: u64) {
        self.events.lock().unwrap().push(FitEvent {
            fold,
            what: what.to_string(),
            rows: rows.to_vec(),
            fingerprint,
        });
    }

    pub fn events(&self) -> Vec<FitEvent> {
        let mut events = self.events.lock().unwrap().clone();
        events.sort_by(|a, b| a.fold.cmp(&b.fold).then_with(|| a.what.cmp(&b.what)));
        events
    }
}

/// Borrowed view handed to fit implementations so they can attribute their
/// row usage to the right fold.
#[derive(Clone, Copy)]
pub struct FitAudit<'a> {
    pub trace: &'a FitTrace,
    pub fold: usize,
}

/// Test-row index sets, one per fold. Stratified assignment keeps fold sizes
/// within one sample of each other and class proportions within one sample.
pub fn stratified_folds(labels: &[Label], spec: &CvSpec) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if spec.folds < 2 || spec.folds > n {
        return Err(Error::InvalidConfig(format!(
            "folds must be in [2, {n}], got {}",
            spec.folds
        )));
    }
    let mut folds = vec![Vec::new(); spec.folds];
    if spec.stratified {
        let mut offset = 0usize;
        for (class_idx, class) in [Label::Human, Label::Bot].into_iter().enumerate() {
            let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if idx.is_empty() {
                return Err(Error::DegenerateLabels);
            }
            if idx.len() < spec.folds {
                return Err(Error::StratificationFailure(format!(
                    "class {class} has {} samples for {} folds",
                    idx.len(),
                    spec.folds
                )));
            }
            idx.shuffle(&mut unit_rng(spec.seed, "stratify", class_idx as u64));
            // Deal cyclically, continuing where the previous class stopped,
            // so per-fold totals stay within one sample.
            let count = idx.len();
            for (i, sample) in idx.into_iter().enumerate() {
                folds[(offset + i) % spec.folds].push(sample);
            }
            offset = (offset + count) % spec.folds;
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut unit_rng(spec.seed, "shuffle", 0));
        for (i, sample) in idx.into_iter().enumerate() {
            folds[i % spec.folds].push(sample);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Per-model cross-validated evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MetricSummary {
        mean,
        std: var.sqrt(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_id: String,
    pub folds: usize,
    pub accuracy: MetricSummary,
    pub auc: MetricSummary,
    pub recall: MetricSummary,
    pub precision: MetricSummary,
    pub f1: MetricSummary,
    pub train_time_seconds: f64,
}

fn fold_complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut in_test = vec![false; n];
    for &t in test {
        in_test[t] = true;
    }
    (0..n).filter(|&i| !in_test[i]).collect()
}

/// Evaluate one fold: refit fold-dependent columns, fit the scaler on the
/// training rows, train, and score the held-out rows.
fn evaluate_fold(
    model_id: &str,
    data: &CvData<'_>,
    fold: usize,
    test_rows: &[usize],
    hyper: &Hyperparams,
    seed: u64,
    trace: Option<&FitTrace>,
) -> Result<(Metrics, f64)> {
    let n = data.matrix.rows();
    let train_rows = fold_complement(n, test_rows);

    let work;
    let matrix = if let Some(ff) = data.fold_fit {
        let mut m = data.matrix.clone();
        ff.refit(
            &train_rows,
            &mut m,
            trace.map(|t| FitAudit { trace: t, fold }),
        );
        work = m;
        &work
    } else {
        data.matrix
    };

    let mut x_train = matrix.select_rows(&train_rows);
    let mut x_test = matrix.select_rows(test_rows);
    let y_train: Vec<Label> = train_rows.iter().map(|&i| data.labels[i]).collect();
    let y_test: Vec<Label> = test_rows.iter().map(|&i| data.labels[i]).collect();

    let scaler = Scaler::fit(&x_train);
    if let Some(t) = trace {
        t.record(fold, "scaler", &train_rows, fingerprint(&scaler));
    }
    scaler.apply(&mut x_train);
    scaler.apply(&mut x_test);

    let started = Instant::now();
    let names: Vec<String> = (0..x_train.cols()).map(|c| format!("c{c}")).collect();
    let model = train(
        model_id,
        &x_train,
        &y_train,
        &names,
        hyper,
        derive_seed(seed, "fold", fold as u64),
    )?;
    let train_time = started.elapsed().as_secs_f64();
    if let Some(t) = trace {
        t.record(fold, "model", &train_rows, fingerprint(&model));
    }

    let (pred, scores) = predict(&model, &x_test)?;
    let cm = ConfusionMatrix::from_predictions(&pred, &y_test);
    Ok((metrics(&cm, &scores, &y_test), train_time))
}

/// Cross-validate with explicit test folds.
pub fn cross_validate_with_folds(
    model_id: &str,
    data: &CvData<'_>,
    folds: &[Vec<usize>],
    hyper: &Hyperparams,
    seed: u64,
    trace: Option<&FitTrace>,
) -> Result<EvaluationReport> {
    let per_fold: Vec<(Metrics, f64)> = folds
        .par_iter()
        .enumerate()
        .map(|(i, test)| evaluate_fold(model_id, data, i, test, hyper, seed, trace))
        .collect::<Result<_>>()?;

    let collect = |f: fn(&Metrics) -> f64| -> Vec<f64> { per_fold.iter().map(|(m, _)| f(m)).collect() };
    Ok(EvaluationReport {
        model_id: model_id.to_string(),
        folds: folds.len(),
        accuracy: summarize(&collect(|m| m.accuracy)),
        auc: summarize(&collect(|m| m.auc)),
        recall: summarize(&collect(|m| m.recall)),
        precision: summarize(&collect(|m| m.precision)),
        f1: summarize(&collect(|m| m.f1)),
        train_time_seconds: per_fold.iter().map(|(_, t)| t).sum(),
    })
}

/// Stratified cross-validation of one model over one dataset.
pub fn cross_validate(
    model_id: &str,
    data: &CvData<'_>,
    cv: &CvSpec,
    hyper: &Hyperparams,
    seed: u64,
    trace: Option<&FitTrace>,
) -> Result<EvaluationReport> {
    let folds = stratified_folds(data.labels, cv)?;
    cross_validate_with_folds(model_id, data, &folds, hyper, seed, trace)
}
