//! Random forest of entropy-split decision trees.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::rng::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `ceil(sqrt(d))`.
    Sqrt,
    Fixed(usize),
    All,
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => (d as f64).sqrt().ceil() as usize,
            MaxFeatures::Fixed(k) => k,
            MaxFeatures::All => d,
        }
        .clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub min_leaf: usize,
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            min_leaf: 1,
            max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
        gain: f64,
    },
    /// `[FALSE, TRUE]` training counts.
    Leaf { counts: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
    pub n_samples: usize,
}

impl DecisionTree {
    pub fn predict_row(&self, row: &[f64]) -> bool {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf { counts } => return counts[1] > counts[0],
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    /// Per-feature sum of (node share of samples x information gain).
    pub fn importance(&self, n_features: usize) -> Vec<f64> {
        let mut imp = vec![0.0; n_features];
        for node in &self.nodes {
            if let Node::Split {
                feature,
                n_samples,
                gain,
                ..
            } = node
            {
                imp[*feature] += *n_samples as f64 / self.n_samples as f64 * gain;
            }
        }
        imp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub config: ForestConfig,
    pub n_features: usize,
    /// Rows left out of each tree's bootstrap sample.
    #[serde(skip)]
    pub oob_indices: Vec<Vec<usize>>,
}

impl ForestModel {
    /// Majority vote; a tie is FALSE.
    pub fn predict_row(&self, row: &[f64]) -> bool {
        let yes = self.trees.iter().filter(|t| t.predict_row(row)).count();
        2 * yes > self.trees.len()
    }
}

/// Shannon entropy in bits of a two-class count.
pub fn entropy(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Trees are grown in parallel, each from its own `(seed, tree)` stream.
pub fn train_forest(d: &Dataset, cfg: &ForestConfig) -> ForestModel {
    let grown: Vec<(DecisionTree, Vec<usize>)> = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(cfg.seed, domain::TREE, t as u64);
            grow_tree(d, cfg, &mut rng)
        })
        .collect();
    let (trees, oob_indices) = grown.into_iter().unzip();
    ForestModel {
        trees,
        config: *cfg,
        n_features: d.n_features(),
        oob_indices,
    }
}

fn grow_tree(d: &Dataset, cfg: &ForestConfig, rng: &mut ChaCha8Rng) -> (DecisionTree, Vec<usize>) {
    let n = d.n_rows();
    let mut sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut drawn = vec![false; n];
    sample.iter().for_each(|&i| drawn[i] = true);
    let oob = (0..n).filter(|&i| !drawn[i]).collect();

    let mut builder = TreeBuilder {
        d,
        cfg,
        max_features: cfg.max_features.resolve(d.n_features()),
        nodes: Vec::new(),
        features: (0..d.n_features()).collect(),
        scratch: Vec::with_capacity(n),
    };
    builder.build(&mut sample, 0, rng);
    (
        DecisionTree {
            nodes: builder.nodes,
            n_samples: n,
        },
        oob,
    )
}

struct TreeBuilder<'a> {
    d: &'a Dataset,
    cfg: &'a ForestConfig,
    max_features: usize,
    nodes: Vec<Node>,
    features: Vec<usize>,
    scratch: Vec<(f64, bool)>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Candidate {
    /// Higher gain wins; ties go to the lower feature index, then the lower
    /// threshold.
    fn beats(&self, other: &Candidate) -> bool {
        self.gain > other.gain
            || (self.gain == other.gain && (self.feature, self.threshold) < (other.feature, other.threshold))
    }
}

impl TreeBuilder<'_> {
    fn counts(&self, rows: &[usize]) -> [usize; 2] {
        let pos = rows.iter().filter(|&&i| self.d.y[i]).count();
        [rows.len() - pos, pos]
    }

    fn build(&mut self, rows: &mut [usize], depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let counts = self.counts(rows);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });

        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_capped = self.cfg.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || rows.len() < 2 * self.cfg.min_leaf.max(1) {
            return at;
        }
        let Some(best) = self.best_split(rows, counts, rng) else {
            return at;
        };

        // partition in place: left block first
        let (feature, threshold) = (best.feature, best.threshold);
        let mut split = 0;
        for i in 0..rows.len() {
            if self.d.value(rows[i], feature) <= threshold {
                rows.swap(i, split);
                split += 1;
            }
        }
        let n_samples = rows.len();
        let (left_rows, right_rows) = rows.split_at_mut(split);
        let left = self.build(left_rows, depth + 1, rng);
        let right = self.build(right_rows, depth + 1, rng);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
            n_samples,
            gain: best.gain,
        };
        at
    }

    /// Visit features in random order until `max_features` non-constant ones
    /// have been examined.
    fn best_split(&mut self, rows: &[usize], counts: [usize; 2], rng: &mut ChaCha8Rng) -> Option<Candidate> {
        self.features.shuffle(rng);
        let parent = entropy(counts);
        let mut best: Option<Candidate> = None;
        let mut visited = 0;
        for fi in 0..self.features.len() {
            if visited == self.max_features {
                break;
            }
            let feature = self.features[fi];
            self.scratch.clear();
            self.scratch
                .extend(rows.iter().map(|&i| (self.d.value(i, feature), self.d.y[i])));
            self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            if self.scratch[0].0 == self.scratch[self.scratch.len() - 1].0 {
                continue;
            }
            visited += 1;
            if let Some(c) = best_threshold(&self.scratch, parent, counts, self.cfg.min_leaf, feature) {
                if best.as_ref().is_none_or(|b| c.beats(b)) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

/// Best midpoint threshold for one feature over value-sorted `(x, y)` pairs.
fn best_threshold(
    sorted: &[(f64, bool)],
    parent: f64,
    total: [usize; 2],
    min_leaf: usize,
    feature: usize,
) -> Option<Candidate> {
    let n = sorted.len();
    let mut left = [0usize; 2];
    let mut best: Option<Candidate> = None;
    for i in 0..n - 1 {
        left[usize::from(sorted[i].1)] += 1;
        let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
        if lo == hi {
            continue;
        }
        let nl = i + 1;
        let nr = n - nl;
        if nl < min_leaf || nr < min_leaf {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let gain = parent - (nl as f64 / n as f64) * entropy(left) - (nr as f64 / n as f64) * entropy(right);
        let mut threshold = lo + (hi - lo) / 2.0;
        if threshold >= hi {
            threshold = lo;
        }
        let c = Candidate {
            feature,
            threshold,
            gain,
        };
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    best
}

/// Mean over trees of each tree's importance vector.
pub fn feature_importance(m: &ForestModel) -> Vec<f64> {
    let mut total = vec![0.0; m.n_features];
    for t in &m.trees {
        for (acc, v) in total.iter_mut().zip(t.importance(m.n_features)) {
            *acc += v;
        }
    }
    let k = m.trees.len().max(1) as f64;
    total.iter_mut().for_each(|v| *v /= k);
    total
}

/// `(feature name, importance)` sorted descending; equal values keep
/// feature order.
pub fn ranked_importance(m: &ForestModel, d: &Dataset) -> Vec<(String, f64)> {
    assert_eq!(m.n_features, d.n_features(), "model/dataset feature mismatch");
    let mut ranked: Vec<(String, f64)> = d
        .feature_names
        .iter()
        .cloned()
        .zip(feature_importance(m))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    ranked
}
