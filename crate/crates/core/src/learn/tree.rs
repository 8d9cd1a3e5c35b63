//! CART decision tree with Gini splitting.
//!
//! Split ties are pinned to the first feature in scan order and the lowest
//! threshold, so a fitted tree is a pure function of (data, config, rng).

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Number of features examined per split; `None` means all.
    pub max_features: Option<usize>,
    /// Extra-trees style: one uniform random threshold per candidate feature
    /// instead of an exhaustive scan.
    pub random_thresholds: bool,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
            random_thresholds: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Fraction of positive (bot) training samples in the leaf.
        prob: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p1 = pos / total;
    let p0 = 1.0 - p1;
    1.0 - p0 * p0 - p1 * p1
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    cfg: &'a TreeConfig,
    nodes: Vec<Node>,
    importance: Vec<f64>,
    n_root: f64,
}

impl<'a> Builder<'a> {
    fn node_counts(&self, idx: &[usize]) -> (f64, f64) {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count() as f64;
        (pos, idx.len() as f64)
    }

    fn candidate_features(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let d = self.x.cols();
        match self.cfg.max_features {
            Some(k) if k < d => {
                // Partial Fisher-Yates, then ascending order so the scan
                // (and its tie-breaking) is canonical.
                let mut pool: Vec<usize> = (0..d).collect();
                for i in 0..k {
                    let j = i + rand::Rng::gen_range(rng, 0..d - i);
                    pool.swap(i, j);
                }
                let mut chosen = pool[..k].to_vec();
                chosen.sort_unstable();
                chosen
            }
            _ => (0..d).collect(),
        }
    }

    fn scan_split(&self, idx: &[usize], feature: usize, parent_gini: f64) -> Option<BestSplit> {
        let mut vals: Vec<(f64, u8)> = idx.iter().map(|&i| (self.x.get(i, feature), self.y[i])).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = vals.len() as f64;
        let total_pos: f64 = vals.iter().filter(|v| v.1 == 1).count() as f64;

        let mut best: Option<BestSplit> = None;
        let mut left_n = 0.0;
        let mut left_pos = 0.0;
        for w in 0..vals.len() - 1 {
            left_n += 1.0;
            left_pos += f64::from(vals[w].1);
            if vals[w].0 == vals[w + 1].0 {
                continue;
            }
            let right_n = total - left_n;
            if (left_n as usize) < self.cfg.min_samples_leaf
                || (right_n as usize) < self.cfg.min_samples_leaf
            {
                continue;
            }
            let weighted = (left_n * gini(left_pos, left_n)
                + right_n * gini(total_pos - left_pos, right_n))
                / total;
            // Zero-gain splits on impure nodes are allowed: both children
            // shrink, and the level below may separate what this one cannot
            // (the XOR pattern needs this).
            let gain = parent_gini - weighted;
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                best = Some(BestSplit {
                    feature,
                    threshold: (vals[w].0 + vals[w + 1].0) / 2.0,
                    gain,
                });
            }
        }
        best
    }

    fn random_split(
        &self,
        idx: &[usize],
        feature: usize,
        parent_gini: f64,
        rng: &mut ChaCha8Rng,
    ) -> Option<BestSplit> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in idx {
            let v = self.x.get(i, feature);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == hi {
            return None;
        }
        let threshold = lo + rand::Rng::gen::<f64>(rng) * (hi - lo);
        let mut left_n = 0.0;
        let mut left_pos = 0.0;
        let mut total_pos = 0.0;
        for &i in idx {
            let is_pos = f64::from(self.y[i]);
            total_pos += is_pos;
            if self.x.get(i, feature) <= threshold {
                left_n += 1.0;
                left_pos += is_pos;
            }
        }
        let total = idx.len() as f64;
        let right_n = total - left_n;
        if (left_n as usize) < self.cfg.min_samples_leaf
            || (right_n as usize) < self.cfg.min_samples_leaf
        {
            return None;
        }
        let weighted =
            (left_n * gini(left_pos, left_n) + right_n * gini(total_pos - left_pos, right_n)) / total;
        Some(BestSplit {
            feature,
            threshold,
            gain: parent_gini - weighted,
        })
    }

    fn build(&mut self, mut idx: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let (pos, total) = self.node_counts(&idx);
        let parent_gini = gini(pos, total);
        let depth_ok = self.cfg.max_depth.map_or(true, |m| depth < m);
        let splittable = idx.len() >= self.cfg.min_samples_split && parent_gini > 0.0 && depth_ok;

        let best = if splittable {
            let mut best: Option<BestSplit> = None;
            for feature in self.candidate_features(rng) {
                let cand = if self.cfg.random_thresholds {
                    self.random_split(&idx, feature, parent_gini, rng)
                } else {
                    self.scan_split(&idx, feature, parent_gini)
                };
                if let Some(c) = cand {
                    if best.as_ref().map_or(true, |b| c.gain > b.gain) {
                        best = Some(c);
                    }
                }
            }
            best
        } else {
            None
        };

        match best {
            None => {
                self.nodes.push(Node::Leaf { prob: pos / total });
                self.nodes.len() - 1
            }
            Some(split) => {
                self.importance[split.feature] += (total / self.n_root) * split.gain;
                let right: Vec<usize> = idx
                    .iter()
                    .copied()
                    .filter(|&i| self.x.get(i, split.feature) > split.threshold)
                    .collect();
                idx.retain(|&i| self.x.get(i, split.feature) <= split.threshold);
                let slot = self.nodes.len();
                self.nodes.push(Node::Leaf { prob: 0.0 }); // placeholder
                let left_id = self.build(idx, depth + 1, rng);
                let right_id = self.build(right, depth + 1, rng);
                self.nodes[slot] = Node::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    left: left_id,
                    right: right_id,
                };
                slot
            }
        }
    }
}

impl DecisionTree {
    /// Fit on the rows listed in `sample` (duplicates allowed, as produced by
    /// bootstrap sampling). Returns the tree and its unnormalized
    /// impurity-decrease importances.
    pub fn fit_indices(
        x: &Matrix,
        y: &[u8],
        sample: Vec<usize>,
        cfg: &TreeConfig,
        rng: &mut ChaCha8Rng,
    ) -> (DecisionTree, Vec<f64>) {
        let mut b = Builder {
            x,
            y,
            cfg,
            nodes: Vec::new(),
            importance: vec![0.0; x.cols()],
            n_root: sample.len() as f64,
        };
        b.build(sample, 0, rng);
        (
            DecisionTree {
                nodes: b.nodes,
                n_features: x.cols(),
            },
            b.importance,
        )
    }

    pub fn fit(x: &Matrix, y: &[u8], cfg: &TreeConfig, rng: &mut ChaCha8Rng) -> DecisionTree {
        DecisionTree::fit_indices(x, y, (0..x.rows()).collect(), cfg, rng).0
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Fraction of positive training samples in the reached leaf.
    pub fn predict_prob(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { prob } => return *prob,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Hard class vote; leaf ties go to the positive class.
    pub fn predict_vote(&self, row: &[f64]) -> u8 {
        u8::from(self.predict_prob(row) >= 0.5)
    }
}
