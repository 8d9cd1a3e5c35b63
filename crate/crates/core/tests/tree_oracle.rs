//! Depth-2 trees checked against an independent exhaustive search over all
//! Gini splits, on small random datasets.

use botminer_core::learn::{DecisionTree, TreeConfig};
use botminer_core::matrix::Matrix;
use botminer_core::rng::unit_rng;
use rand::Rng;

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p = pos / total;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Best (feature, threshold) by exhaustive enumeration of every midpoint,
/// ties resolved like the implementation: first feature, lowest threshold,
/// strictly-better gain to replace.
fn best_split(x: &Matrix, y: &[u8], idx: &[usize]) -> Option<(usize, f64)> {
    let total = idx.len() as f64;
    let total_pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    let parent = gini(total_pos, total);
    if parent == 0.0 || idx.len() < 2 {
        return None;
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for feature in 0..x.cols() {
        let mut values: Vec<f64> = idx.iter().map(|&i| x.get(i, feature)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let mut left = 0.0;
            let mut left_pos = 0.0;
            for &i in idx {
                if x.get(i, feature) <= threshold {
                    left += 1.0;
                    left_pos += f64::from(y[i]);
                }
            }
            let right = total - left;
            let weighted =
                (left * gini(left_pos, left) + right * gini(total_pos - left_pos, right)) / total;
            let gain = parent - weighted;
            if best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((feature, threshold, gain));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

/// Exhaustive depth-2 tree prediction for one row.
fn oracle_predict(x: &Matrix, y: &[u8], row: &[f64]) -> u8 {
    let all: Vec<usize> = (0..x.rows()).collect();
    let leaf_vote = |idx: &[usize]| -> u8 {
        let pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
        u8::from(pos / idx.len() as f64 >= 0.5)
    };
    let Some((f0, t0)) = best_split(x, y, &all) else {
        return leaf_vote(&all);
    };
    let (side, rest): (Vec<usize>, Vec<usize>) =
        all.iter().partition(|&&i| x.get(i, f0) <= t0);
    let branch = if row[f0] <= t0 { side } else { rest };
    match best_split(x, y, &branch) {
        Some((f1, t1)) => {
            let leaf: Vec<usize> = branch
                .iter()
                .copied()
                .filter(|&i| (x.get(i, f1) <= t1) == (row[f1] <= t1))
                .collect();
            leaf_vote(&leaf)
        }
        None => leaf_vote(&branch),
    }
}

#[test]
fn depth_two_tree_matches_exhaustive_search() {
    let cfg = TreeConfig {
        max_depth: Some(2),
        ..TreeConfig::default()
    };
    for case in 0..40u64 {
        let mut rng = unit_rng(1234, "oracle", case);
        let n = rng.gen_range(4..=16);
        let d = rng.gen_range(1..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| f64::from(rng.gen_range(0..4))).collect())
            .collect();
        let y: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2) as u8).collect();
        if y.iter().all(|&v| v == 0) || y.iter().all(|&v| v == 1) {
            continue;
        }
        let x = Matrix::from_rows(rows);
        let tree = DecisionTree::fit(&x, &y, &cfg, &mut unit_rng(0, "t", case));
        for r in 0..x.rows() {
            let row = x.row(r);
            assert_eq!(
                tree.predict_vote(row),
                oracle_predict(&x, &y, row),
                "case {case} row {r}"
            );
        }
    }
}

#[test]
fn xor_with_depth_two_reaches_perfect_training_accuracy() {
    let x = Matrix::from_rows(vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ]);
    let y = [0u8, 1, 1, 0];
    let cfg = TreeConfig {
        max_depth: Some(2),
        ..TreeConfig::default()
    };
    let tree = DecisionTree::fit(&x, &y, &cfg, &mut unit_rng(0, "xor", 0));
    let correct = (0..4).filter(|&r| tree.predict_vote(x.row(r)) == y[r]).count();
    assert_eq!(correct, 4);
}
