//! Greedy top-down binary decision tree with information-gain splits.
//!
//! Numeric splits sit at midpoints between consecutive distinct values; the
//! split criterion is information gain (entropy, base 2). Rows missing the
//! split feature go to the child that received more non-missing training
//! rows, at training and at prediction time alike. Ties break toward the
//! lower feature index, then the lower threshold; zero-gain splits are still
//! taken while a node is impure, which is what lets a greedy tree solve
//! XOR-shaped data. Growth stops at a pure node, the depth limit, or when no
//! candidate split satisfies `min_leaf`.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;
use crate::model::Label;
use crate::Result;

use super::{labeled_rows, prior_of, Model, ModelKind, ModelParams, TrainParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        malicious: u64,
        benign: u64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Where rows missing this feature are routed.
        missing_left: bool,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
}

impl TreeModel {
    /// Class counts of the single leaf this vector descends to.
    pub(crate) fn leaf_counts(&self, values: &[Option<f64>]) -> (u64, u64) {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { malicious, benign } => return (*malicious, *benign),
                TreeNode::Split {
                    feature,
                    threshold,
                    missing_left,
                    left,
                    right,
                } => {
                    let go_left = match values[*feature] {
                        Some(x) => x <= *threshold,
                        None => *missing_left,
                    };
                    node = if go_left { left } else { right };
                }
            }
        }
    }

    pub(crate) fn malicious_fraction(&self, values: &[Option<f64>]) -> f64 {
        let (m, b) = self.leaf_counts(values);
        m as f64 / (m + b) as f64
    }

    /// Discrete vote; leaf ties go to malicious.
    pub(crate) fn vote(&self, values: &[Option<f64>]) -> Label {
        let (m, b) = self.leaf_counts(values);
        if m >= b {
            Label::Malicious
        } else {
            Label::Benign
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn leaf_count(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }
}

/// Entropy in bits of a two-class count pair.
pub(crate) fn entropy2(malicious: f64, benign: f64) -> f64 {
    let n = malicious + benign;
    if n <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for c in [malicious, benign] {
        if c > 0.0 {
            let p = c / n;
            h -= p * p.log2();
        }
    }
    h
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitChoice {
    pub gain: f64,
    pub feature: usize,
    pub threshold: f64,
    pub missing_left: bool,
}

pub(crate) struct TreeBuilder<'a> {
    pub matrix: &'a FeatureMatrix,
    pub labels: &'a [Label],
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl TreeBuilder<'_> {
    fn class_counts(&self, rows: &[usize]) -> (u64, u64) {
        let mal = rows
            .iter()
            .filter(|&&r| self.labels[r] == Label::Malicious)
            .count() as u64;
        (mal, rows.len() as u64 - mal)
    }

    /// Best (feature, threshold) among the candidates by information gain;
    /// scanned in ascending feature then threshold order, replaced only on
    /// strictly greater gain, so ties keep the earliest candidate.
    pub(crate) fn best_split(&self, rows: &[usize], candidates: &[usize]) -> Option<SplitChoice> {
        let (mal, ben) = self.class_counts(rows);
        let total = rows.len() as f64;
        let parent_h = entropy2(mal as f64, ben as f64);
        let mut best: Option<SplitChoice> = None;

        for &feature in candidates {
            let mut present: Vec<(f64, Label)> = Vec::with_capacity(rows.len());
            let mut miss_mal = 0u64;
            let mut miss_ben = 0u64;
            for &r in rows {
                match self.matrix.value(r, feature) {
                    Some(x) => present.push((x, self.labels[r])),
                    None => match self.labels[r] {
                        Label::Malicious => miss_mal += 1,
                        Label::Benign => miss_ben += 1,
                    },
                }
            }
            if present.len() < 2 {
                continue;
            }
            present.sort_by(|a, b| a.0.total_cmp(&b.0));

            let present_mal = present
                .iter()
                .filter(|(_, l)| *l == Label::Malicious)
                .count() as u64;
            let present_ben = present.len() as u64 - present_mal;
            let mut left_mal = 0u64;
            let mut left_ben = 0u64;

            for i in 0..present.len() - 1 {
                match present[i].1 {
                    Label::Malicious => left_mal += 1,
                    Label::Benign => left_ben += 1,
                }
                let (lo, hi) = (present[i].0, present[i + 1].0);
                if lo == hi {
                    continue;
                }
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    // Adjacent floats: keep lo <= threshold < hi so the
                    // routing test matches the counted partition.
                    threshold = lo;
                }
                let left_present = (i + 1) as u64;
                let right_present = present.len() as u64 - left_present;
                let missing_left = left_present >= right_present;
                let (right_mal, right_ben) = (present_mal - left_mal, present_ben - left_ben);
                let (mut lm, mut lb, mut rm, mut rb) = (left_mal, left_ben, right_mal, right_ben);
                if missing_left {
                    lm += miss_mal;
                    lb += miss_ben;
                } else {
                    rm += miss_mal;
                    rb += miss_ben;
                }
                let left_n = lm + lb;
                let right_n = rm + rb;
                if (left_n as usize) < self.min_leaf || (right_n as usize) < self.min_leaf {
                    continue;
                }
                let child_h = (left_n as f64 / total) * entropy2(lm as f64, lb as f64)
                    + (right_n as f64 / total) * entropy2(rm as f64, rb as f64);
                let gain = parent_h - child_h;
                if best.is_none_or(|b| gain > b.gain) {
                    best = Some(SplitChoice {
                        gain,
                        feature,
                        threshold,
                        missing_left,
                    });
                }
            }
        }
        best
    }

    fn partition(&self, rows: &[usize], split: &SplitChoice) -> (Vec<usize>, Vec<usize>) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &r in rows {
            let go_left = match self.matrix.value(r, split.feature) {
                Some(x) => x <= split.threshold,
                None => split.missing_left,
            };
            if go_left {
                left.push(r);
            } else {
                right.push(r);
            }
        }
        (left, right)
    }

    /// Grows a subtree. `rng` is only consulted when `per_split` is smaller
    /// than the feature count, so a full-width forest tree draws nothing and
    /// matches the plain tree exactly.
    pub(crate) fn grow(
        &self,
        rows: &[usize],
        depth: usize,
        mut rng: Option<&mut ChaCha8Rng>,
        per_split: usize,
    ) -> TreeNode {
        let (mal, ben) = self.class_counts(rows);
        let leaf = TreeNode::Leaf {
            malicious: mal,
            benign: ben,
        };
        if mal == 0 || ben == 0 {
            return leaf;
        }
        if self.max_depth.is_some_and(|limit| depth >= limit) {
            return leaf;
        }
        let n_features = self.matrix.feature_count();
        let candidates: Vec<usize> = match rng.as_deref_mut() {
            Some(r) if per_split < n_features => {
                let mut picked = rand::seq::index::sample(r, n_features, per_split).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..n_features).collect(),
        };
        let Some(split) = self.best_split(rows, &candidates) else {
            return leaf;
        };
        let (left_rows, right_rows) = self.partition(rows, &split);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            missing_left: split.missing_left,
            left: Box::new(self.grow(&left_rows, depth + 1, rng.as_deref_mut(), per_split)),
            right: Box::new(self.grow(&right_rows, depth + 1, rng, per_split)),
        }
    }
}

pub fn train_decision_tree(m: &FeatureMatrix, params: &TrainParams) -> Result<Model> {
    params.validate()?;
    let labels = labeled_rows(m)?;
    let builder = TreeBuilder {
        matrix: m,
        labels: &labels,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
    };
    let rows: Vec<usize> = (0..m.len()).collect();
    let root = builder.grow(&rows, 0, None, m.feature_count());
    Ok(Model {
        kind: ModelKind::DecisionTree,
        feature_names: m.feature_names.clone(),
        train_seed: params.seed,
        class_prior: prior_of(m, &labels),
        params: ModelParams::DecisionTree(TreeModel { root }),
    })
}
