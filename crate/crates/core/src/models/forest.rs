use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_training_data, FeaturesPerSplit, TrainConfig, N_CLASSES};
use crate::error::{Error, Result};
use crate::Level;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
        impurity: f64,
        histogram: [usize; N_CLASSES],
    },
    Leaf {
        n_samples: usize,
        impurity: f64,
        histogram: [usize; N_CLASSES],
    },
}

impl Node {
    pub fn n_samples(&self) -> usize {
        match self {
            Node::Split { n_samples, .. } | Node::Leaf { n_samples, .. } => *n_samples,
        }
    }

    pub fn impurity(&self) -> f64 {
        match self {
            Node::Split { impurity, .. } | Node::Leaf { impurity, .. } => *impurity,
        }
    }

    pub fn histogram(&self) -> &[usize; N_CLASSES] {
        match self {
            Node::Split { histogram, .. } | Node::Leaf { histogram, .. } => histogram,
        }
    }
}

/// A CART tree stored as a flat node list; node 0 is the root and rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf_for(&self, x: ArrayView1<'_, f64>) -> &Node {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => idx = if x[*feature] <= *threshold { *left } else { *right },
                leaf => return leaf,
            }
        }
    }

    /// Majority class of the reached leaf; ties go to the lower level.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Level {
        let hist = self.leaf_for(x).histogram();
        let mut best = 0;
        for k in 1..N_CLASSES {
            if hist[k] > hist[best] {
                best = k;
            }
        }
        Level::ALL[best]
    }

    /// Unnormalized impurity decrease per feature, each split weighted by its
    /// share of the root's samples.
    pub fn impurity_decrease(&self, n_features: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_features];
        let Some(root) = self.nodes.first() else {
            return out;
        };
        let n_root = root.n_samples() as f64;
        for node in &self.nodes {
            if let Node::Split {
                feature,
                left,
                right,
                n_samples,
                impurity,
                ..
            } = node
            {
                let n = *n_samples as f64;
                let (l, r) = (&self.nodes[*left], &self.nodes[*right]);
                let children = (l.n_samples() as f64 * l.impurity()
                    + r.n_samples() as f64 * r.impurity())
                    / n;
                out[*feature] += (n / n_root) * (impurity - children);
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }
}

/// Fraction of trees voting for each class.
pub fn vote_fractions(trees: &[DecisionTree], x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
    let mut votes = [0.0; N_CLASSES];
    for tree in trees {
        votes[tree.predict(x).index()] += 1.0;
    }
    let n = trees.len().max(1) as f64;
    votes.map(|v| v / n)
}

fn gini(hist: &[usize; N_CLASSES], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - hist.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn histogram(rows: &[usize], y: &[usize]) -> [usize; N_CLASSES] {
    let mut h = [0; N_CLASSES];
    for &r in rows {
        h[y[r]] += 1;
    }
    h
}

struct Builder<'a> {
    x: &'a Array2<f64>,
    y: Vec<usize>,
    max_depth: usize,
    rule: FeaturesPerSplit,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let hist = histogram(&rows, &self.y);
        let n = rows.len();
        let impurity = gini(&hist, n);
        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf {
            n_samples: n,
            impurity,
            histogram: hist,
        });
        if impurity == 0.0 || depth >= self.max_depth || n < 2 {
            return idx;
        }
        let Some(best) = self.find_split(&rows) else {
            return idx;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x[[r, best.feature]] <= best.threshold);
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[idx] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            n_samples: n,
            impurity,
            histogram: hist,
        };
        idx
    }

    /// Visits features in a random order and evaluates the first `m`
    /// non-constant ones, continuing past `m` only while no split exists.
    fn find_split(&mut self, rows: &[usize]) -> Option<BestSplit> {
        let d = self.x.ncols();
        let m = match self.rule {
            FeaturesPerSplit::All => d,
            FeaturesPerSplit::Sqrt => ((d as f64).sqrt().floor() as usize).max(1),
        };
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(&mut self.rng);
        let mut best: Option<BestSplit> = None;
        let mut visited = 0;
        for f in features {
            if visited >= m && best.is_some() {
                break;
            }
            if let Some(candidate) = self.best_threshold(rows, f) {
                visited += 1;
                if best.as_ref().is_none_or(|b| candidate.score < b.score) {
                    best = Some(candidate);
                }
            }
        }
        best
    }

    fn best_threshold(&self, rows: &[usize], feature: usize) -> Option<BestSplit> {
        let mut sorted: Vec<(f64, usize)> = rows
            .iter()
            .map(|&r| (self.x[[r, feature]], self.y[r]))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let n = sorted.len();
        let mut right = [0usize; N_CLASSES];
        for &(_, c) in &sorted {
            right[c] += 1;
        }
        let mut left = [0usize; N_CLASSES];
        let mut best: Option<BestSplit> = None;
        for i in 0..n - 1 {
            let c = sorted[i].1;
            left[c] += 1;
            right[c] -= 1;
            let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
            if lo == hi {
                continue;
            }
            let nl = i + 1;
            let nr = n - nl;
            let score = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
            if best.as_ref().is_none_or(|b| score < b.score) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(BestSplit {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }
}

fn fit_tree(x: &Array2<f64>, y: &[usize], cfg: &TrainConfig, tree_index: usize) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(tree_index as u64));
    let n = x.nrows();
    let rows: Vec<usize> = if cfg.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut builder = Builder {
        x,
        y: y.to_vec(),
        max_depth: cfg.max_depth,
        rule: cfg.features_per_split,
        rng,
        nodes: Vec::new(),
    };
    builder.build(rows, 0);
    DecisionTree {
        nodes: builder.nodes,
    }
}

/// Trees are grown in parallel; each owns the seed `seed + tree_index`, so the
/// result does not depend on scheduling.
pub(super) fn fit_forest(x: &Array2<f64>, y: &[Level], cfg: &TrainConfig) -> Result<Vec<DecisionTree>> {
    if cfg.n_trees == 0 {
        return Err(Error::InvalidConfig("n_trees must be at least 1".into()));
    }
    check_training_data(x, y)?;
    let y: Vec<usize> = y.iter().map(|l| l.index()).collect();
    Ok((0..cfg.n_trees)
        .into_par_iter()
        .map(|t| fit_tree(x, &y, cfg, t))
        .collect())
}
