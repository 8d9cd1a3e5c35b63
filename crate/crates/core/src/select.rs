//! Feature ranking (chi-square, mutual information, Fisher score, forest
//! impurity importance) and iterative top-k selection with a
//! no-improvement-for-`patience`-steps stopping rule.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{
    cross_validate_with_folds, stratified_folds, CvData, CvSpec, Forest, ForestConfig, Hyperparams,
};
use crate::matrix::Matrix;
use crate::types::Label;

pub const RANK_METHODS: [&str; 4] = ["chi2", "mutual_info", "fisher", "rf_importance"];

/// Discretization used by the filter methods on continuous features.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BinSpec {
    pub bins: usize,
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec { bins: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankingResult {
    pub method: String,
    /// (feature name, score), sorted descending; ties keep catalog order.
    pub scores: Vec<(String, f64)>,
    pub seed: u64,
}

impl RankingResult {
    pub fn top_k(&self, k: usize) -> Vec<String> {
        self.scores.iter().take(k).map(|(n, _)| n.clone()).collect()
    }
}

/// Equal-frequency discretization. Features with no more distinct values
/// than bins keep each value as its own bin (so discrete data is passed
/// through unchanged); degenerate constant features collapse to one bin.
fn discretize(values: &[f64], bins: usize) -> Vec<usize> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let edges: Vec<f64> = if distinct.len() <= bins {
        distinct
    } else {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut e: Vec<f64> = (1..bins).map(|i| sorted[i * n / bins]).collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    };
    values
        .iter()
        .map(|v| edges.iter().filter(|e| **e < *v).count())
        .collect()
}

fn contingency(xs: &[usize], ys: &[u8]) -> BTreeMap<(usize, u8), f64> {
    let mut table = BTreeMap::new();
    for (&x, &y) in xs.iter().zip(ys) {
        *table.entry((x, y)).or_insert(0.0) += 1.0;
    }
    table
}

fn chi2_statistic(xs: &[usize], ys: &[u8]) -> f64 {
    let n = xs.len() as f64;
    let table = contingency(xs, ys);
    let mut row_tot: BTreeMap<usize, f64> = BTreeMap::new();
    let mut col_tot: BTreeMap<u8, f64> = BTreeMap::new();
    for (&(x, y), &c) in &table {
        *row_tot.entry(x).or_insert(0.0) += c;
        *col_tot.entry(y).or_insert(0.0) += c;
    }
    let mut stat = 0.0;
    for (&x, &rt) in &row_tot {
        for (&y, &ct) in &col_tot {
            let expected = rt * ct / n;
            if expected > 0.0 {
                let observed = table.get(&(x, y)).copied().unwrap_or(0.0);
                stat += (observed - expected) * (observed - expected) / expected;
            }
        }
    }
    stat
}

fn mutual_info_bits(xs: &[usize], ys: &[u8]) -> f64 {
    let n = xs.len() as f64;
    let table = contingency(xs, ys);
    let mut row_tot: BTreeMap<usize, f64> = BTreeMap::new();
    let mut col_tot: BTreeMap<u8, f64> = BTreeMap::new();
    for (&(x, y), &c) in &table {
        *row_tot.entry(x).or_insert(0.0) += c;
        *col_tot.entry(y).or_insert(0.0) += c;
    }
    let mut mi = 0.0;
    for (&(x, y), &c) in &table {
        let pxy = c / n;
        let px = row_tot[&x] / n;
        let py = col_tot[&y] / n;
        mi += pxy * (pxy / (px * py)).log2();
    }
    mi.max(0.0)
}

fn fisher_score(values: &[f64], ys: &[u8]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for class in [0u8, 1u8] {
        let class_vals: Vec<f64> = values
            .iter()
            .zip(ys)
            .filter(|(_, &y)| y == class)
            .map(|(&v, _)| v)
            .collect();
        let nc = class_vals.len() as f64;
        if nc == 0.0 {
            continue;
        }
        let mc = class_vals.iter().sum::<f64>() / nc;
        let var = class_vals.iter().map(|v| (v - mc) * (v - mc)).sum::<f64>() / nc;
        numerator += nc * (mc - mean) * (mc - mean);
        denominator += nc * var;
    }
    numerator / (denominator + 1e-12)
}

fn check_two_classes(labels: &[Label]) -> Result<Vec<u8>> {
    let y: Vec<u8> = labels.iter().map(|l| l.as_u8()).collect();
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::DegenerateLabels);
    }
    Ok(y)
}

/// Rank every feature by one method. Scores sort descending with ties broken
/// by catalog (input) order, so the result is a pure function of the inputs
/// and the seed.
pub fn rank(
    matrix: &Matrix,
    labels: &[Label],
    feature_names: &[String],
    method: &str,
    binning: BinSpec,
    seed: u64,
) -> Result<RankingResult> {
    if matrix.rows() == 0 || matrix.cols() == 0 {
        return Err(Error::EmptyDataset);
    }
    let y = check_two_classes(labels)?;
    debug_assert_eq!(matrix.cols(), feature_names.len());

    let raw: Vec<f64> = match method {
        "chi2" => (0..matrix.cols())
            .map(|c| chi2_statistic(&discretize(&matrix.column(c), binning.bins), &y))
            .collect(),
        "mutual_info" => (0..matrix.cols())
            .map(|c| mutual_info_bits(&discretize(&matrix.column(c), binning.bins), &y))
            .collect(),
        "fisher" => (0..matrix.cols())
            .map(|c| fisher_score(&matrix.column(c), &y))
            .collect(),
        "rf_importance" => {
            let forest = Forest::fit(matrix, &y, &ForestConfig::default(), seed);
            forest.importances().to_vec()
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown ranking method: {other}"
            )))
        }
    };

    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
    Ok(RankingResult {
        method: method.to_string(),
        scores: order
            .into_iter()
            .map(|i| (feature_names[i].clone(), raw[i]))
            .collect(),
        seed,
    })
}

/// One point of the accuracy-versus-k curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub mean_accuracy: f64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    pub ranking: RankingResult,
    pub accuracy_curve: Vec<CurvePoint>,
    pub chosen_k: usize,
    pub chosen_features: Vec<String>,
}

/// Evaluator for one prefix size; the production implementation runs a
/// cross-validated forest, tests can script the curve.
pub trait TopkEvaluator {
    fn evaluate(&mut self, k: usize) -> Result<(f64, f64)>;
}

/// Walk k = 1, 2, ... calling the evaluator, stopping after `patience`
/// consecutive values fail to beat the running maximum. Returns the curve
/// and the argmax k (smallest k on ties).
pub fn run_selection(
    evaluator: &mut dyn TopkEvaluator,
    k_max: usize,
    patience: usize,
) -> Result<(Vec<CurvePoint>, usize)> {
    let mut curve = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut chosen_k = 1;
    let mut misses = 0usize;
    for k in 1..=k_max {
        let (accuracy, seconds) = evaluator.evaluate(k)?;
        curve.push(CurvePoint {
            k,
            mean_accuracy: accuracy,
            runtime_seconds: seconds,
        });
        if accuracy > best {
            best = accuracy;
            chosen_k = k;
            misses = 0;
        } else {
            misses += 1;
            if misses >= patience {
                break;
            }
        }
    }
    Ok((curve, chosen_k))
}

struct CvEvaluator<'a> {
    data: &'a CvData<'a>,
    ranking: &'a RankingResult,
    name_to_col: BTreeMap<&'a str, usize>,
    folds: Vec<Vec<usize>>,
    hyper: &'a Hyperparams,
    seed: u64,
}

impl TopkEvaluator for CvEvaluator<'_> {
    fn evaluate(&mut self, k: usize) -> Result<(f64, f64)> {
        let cols: Vec<usize> = self
            .ranking
            .scores
            .iter()
            .take(k)
            .map(|(name, _)| self.name_to_col[name.as_str()])
            .collect();
        let sub = self.data.matrix.select_columns(&cols);
        // Fold-dependent columns (color bins) refit on the full-width matrix
        // inside each fold; the subset evaluation reuses the already-refit
        // values through the subset fold_fit when one is configured.
        let sub_fit = self.data.fold_fit.map(|ff| SubsetFoldFit {
            inner: ff,
            full_width: self.data.matrix.cols(),
            base: self.data.matrix,
            cols: cols.clone(),
        });
        let data = CvData {
            matrix: &sub,
            labels: self.data.labels,
            fold_fit: sub_fit.as_ref().map(|f| f as &dyn crate::learn::FoldFit),
        };
        let started = Instant::now();
        let report = cross_validate_with_folds(
            "random_forest",
            &data,
            &self.folds,
            self.hyper,
            self.seed,
            None,
        )?;
        Ok((report.accuracy.mean, started.elapsed().as_secs_f64()))
    }
}

/// Adapts a full-matrix [`FoldFit`] to a column subset: refits on a clone of
/// the full matrix, then copies the selected columns over.
struct SubsetFoldFit<'a> {
    inner: &'a dyn crate::learn::FoldFit,
    full_width: usize,
    base: &'a Matrix,
    cols: Vec<usize>,
}

impl crate::learn::FoldFit for SubsetFoldFit<'_> {
    fn refit(
        &self,
        train_rows: &[usize],
        matrix: &mut Matrix,
        audit: Option<crate::learn::FitAudit<'_>>,
    ) {
        debug_assert_eq!(self.base.cols(), self.full_width);
        let mut full = self.base.clone();
        self.inner.refit(train_rows, &mut full, audit);
        for r in 0..matrix.rows() {
            for (j, &c) in self.cols.iter().enumerate() {
                matrix.set(r, j, full.get(r, c));
            }
        }
    }
}

/// Iterative top-k selection: evaluate a cross-validated random forest on
/// growing ranking prefixes. Folds are fixed once per selection (seeded), so
/// every k sees the same partition.
#[allow(clippy::too_many_arguments)]
pub fn select_topk(
    data: &CvData<'_>,
    feature_names: &[String],
    ranking: &RankingResult,
    k_max: usize,
    patience: usize,
    cv: &CvSpec,
    hyper: &Hyperparams,
    seed: u64,
) -> Result<SelectionResult> {
    if k_max < 1 {
        return Err(Error::InvalidConfig("k_max must be >= 1".into()));
    }
    let name_to_col: BTreeMap<&str, usize> = feature_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let folds = stratified_folds(data.labels, cv)?;
    let mut evaluator = CvEvaluator {
        data,
        ranking,
        name_to_col,
        folds,
        hyper,
        seed,
    };
    let limit = k_max.min(feature_names.len());
    let (curve, chosen_k) = run_selection(&mut evaluator, limit, patience)?;
    Ok(SelectionResult {
        ranking: ranking.clone(),
        accuracy_curve: curve,
        chosen_k,
        chosen_features: ranking.top_k(chosen_k),
    })
}
