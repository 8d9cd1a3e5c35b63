//! Confusion-matrix metrics and rank-based AUC. Bot is the positive class.

use serde::{Deserialize, Serialize};

use crate::types::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn from_predictions(predicted: &[Label], truth: &[Label]) -> Self {
        debug_assert_eq!(predicted.len(), truth.len());
        let mut cm = ConfusionMatrix::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (Label::Bot, Label::Bot) => cm.true_pos += 1,
                (Label::Human, Label::Human) => cm.true_neg += 1,
                (Label::Bot, Label::Human) => cm.false_pos += 1,
                (Label::Human, Label::Bot) => cm.false_neg += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// Which ratios hit a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndefinedFlags {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
    pub auc: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub undefined: UndefinedFlags,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Area under the ROC curve via the Mann-Whitney rank statistic, with
/// average ranks on score ties. Returns `(0.0, true)` when either class is
/// absent.
pub fn auc_score(scores: &[f64], truth: &[Label]) -> (f64, bool) {
    let n_pos = truth.iter().filter(|l| **l == Label::Bot).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return (0.0, true);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j, averaged over the tie group.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if truth[idx] == Label::Bot {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let np = n_pos as f64;
    let nn = n_neg as f64;
    ((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn), false)
}

/// Accuracy, precision, recall (TP / (TP + FN)), F1 and AUC. Ratios with a
/// zero denominator come back as 0 with the matching flag set.
pub fn metrics(cm: &ConfusionMatrix, scores: &[f64], truth: &[Label]) -> Metrics {
    let mut flags = UndefinedFlags::default();
    let accuracy = (cm.true_pos + cm.true_neg) as f64 / cm.total() as f64;
    let precision = ratio(cm.true_pos, cm.true_pos + cm.false_pos, &mut flags.precision);
    let recall = ratio(cm.true_pos, cm.true_pos + cm.false_neg, &mut flags.recall);
    // Harmonic mean 2pr/(p+r), in its simplified single-division form so the
    // result is correctly rounded.
    let f1 = if precision + recall == 0.0 {
        flags.f1 = true;
        0.0
    } else {
        2.0 * cm.true_pos as f64 / (2 * cm.true_pos + cm.false_pos + cm.false_neg) as f64
    };
    let (auc, auc_undefined) = auc_score(scores, truth);
    flags.auc = auc_undefined;
    Metrics {
        accuracy,
        precision,
        recall,
        f1,
        auc,
        undefined: flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(tp: u64, tn: u64, fp: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            true_pos: tp,
            true_neg: tn,
            false_pos: fp,
            false_neg: fn_,
        }
    }

    #[test]
    fn accuracy_example() {
        let m = metrics(&cm(8, 2, 0, 0), &[], &[]);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn precision_example() {
        let m = metrics(&cm(8, 0, 2, 0), &[], &[]);
        assert!((m.precision - 0.8).abs() < 1e-15);
    }

    #[test]
    fn f1_fixed_point() {
        // precision = recall = 0.5 -> f1 = 0.5
        let m = metrics(&cm(1, 0, 1, 1), &[], &[]);
        assert!((m.precision - 0.5).abs() < 1e-15);
        assert!((m.recall - 0.5).abs() < 1e-15);
        assert!((m.f1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_denominators_flagged() {
        let m = metrics(&cm(0, 5, 0, 0), &[], &[]);
        assert_eq!(m.precision, 0.0);
        assert!(m.undefined.precision);
        assert!(m.undefined.recall);
        assert!(m.undefined.f1);
    }

    #[test]
    fn auc_perfect_separation() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let truth = [Label::Bot, Label::Bot, Label::Human, Label::Human];
        assert_eq!(auc_score(&scores, &truth), (1.0, false));
    }

    #[test]
    fn auc_constant_scores() {
        let scores = [0.5; 6];
        let truth = [
            Label::Bot,
            Label::Human,
            Label::Bot,
            Label::Human,
            Label::Bot,
            Label::Human,
        ];
        let (auc, undef) = auc_score(&scores, &truth);
        assert!((auc - 0.5).abs() < 1e-12);
        assert!(!undef);
    }

    #[test]
    fn auc_single_class_is_undefined() {
        let (auc, undef) = auc_score(&[0.1, 0.2], &[Label::Bot, Label::Bot]);
        assert_eq!(auc, 0.0);
        assert!(undef);
    }

    #[test]
    fn metric_identities_hold() {
        for seed in 0..50u64 {
            let mut rng = crate::rng::unit_rng(seed, "cm", 0);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| rand::Rng::gen_range(rng, 0..500u64);
            let m = cm(draw(&mut rng) + 1, draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let got = metrics(&m, &[], &[]);
            let total = m.total() as f64;
            assert!((got.accuracy * total - (m.true_pos + m.true_neg) as f64).abs() < 1e-9);
            if got.precision + got.recall > 0.0 {
                let harmonic =
                    2.0 * got.precision * got.recall / (got.precision + got.recall);
                assert!((got.f1 - harmonic).abs() < 1e-12);
            }
        }
    }
}
