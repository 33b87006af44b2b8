//! Random forest: bootstrapped entropy trees with per-split feature
//! subsampling, majority vote, vote ties to malicious.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;
use crate::model::Label;
use crate::Result;

use super::tree::{TreeBuilder, TreeModel};
use super::{derive_seed, labeled_rows, prior_of, Model, ModelKind, ModelParams, TrainParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    /// Seed each tree's RNG stream was derived from; position = tree index.
    pub tree_seeds: Vec<u64>,
    pub features_per_split: usize,
    pub bootstrap: bool,
}

impl ForestModel {
    /// Fraction of trees voting malicious; always a multiple of 1/T.
    pub(crate) fn malicious_vote_fraction(&self, values: &[Option<f64>]) -> f64 {
        let malicious = self
            .trees
            .iter()
            .filter(|t| t.vote(values) == Label::Malicious)
            .count();
        malicious as f64 / self.trees.len() as f64
    }
}

pub fn train_random_forest(m: &FeatureMatrix, params: &TrainParams) -> Result<Model> {
    train_random_forest_with_oob(m, params).map(|(model, _)| model)
}

/// Trains a forest and, when bootstrapping, reports out-of-bag accuracy:
/// each training row voted on only by trees whose sample excluded it.
pub fn train_random_forest_with_oob(
    m: &FeatureMatrix,
    params: &TrainParams,
) -> Result<(Model, Option<f64>)> {
    params.validate()?;
    let labels = labeled_rows(m)?;
    let n = m.len();
    let n_features = m.feature_count();
    let per_split = params
        .features_per_split
        .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
        .min(n_features);
    let builder = TreeBuilder {
        matrix: m,
        labels: &labels,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
    };

    let tree_seeds: Vec<u64> = (0..params.tree_count)
        .map(|i| derive_seed(params.seed, i as u64))
        .collect();

    // Each tree owns an RNG keyed by its derived seed, so the result is
    // independent of how rayon schedules the work.
    let grown: Vec<(TreeModel, Vec<bool>)> = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let (rows, in_bag) = if params.bootstrap {
                let mut in_bag = vec![false; n];
                let rows: Vec<usize> = (0..n)
                    .map(|_| {
                        let r = rng.random_range(0..n);
                        in_bag[r] = true;
                        r
                    })
                    .collect();
                (rows, in_bag)
            } else {
                ((0..n).collect(), vec![true; n])
            };
            let root = builder.grow(&rows, 0, Some(&mut rng), per_split);
            (TreeModel { root }, in_bag)
        })
        .collect();

    let oob_accuracy = if params.bootstrap {
        let mut voted = 0usize;
        let mut correct = 0usize;
        for (r, row) in m.rows.iter().enumerate() {
            let mut mal_votes = 0usize;
            let mut total = 0usize;
            for (tree, in_bag) in &grown {
                if !in_bag[r] {
                    total += 1;
                    if tree.vote(&row.values) == Label::Malicious {
                        mal_votes += 1;
                    }
                }
            }
            if total == 0 {
                continue;
            }
            voted += 1;
            let predicted = if 2 * mal_votes >= total {
                Label::Malicious
            } else {
                Label::Benign
            };
            if predicted == labels[r] {
                correct += 1;
            }
        }
        (voted > 0).then(|| correct as f64 / voted as f64)
    } else {
        None
    };

    let trees = grown.into_iter().map(|(tree, _)| tree).collect();
    let model = Model {
        kind: ModelKind::RandomForest,
        feature_names: m.feature_names.clone(),
        train_seed: params.seed,
        class_prior: prior_of(m, &labels),
        params: ModelParams::RandomForest(ForestModel {
            trees,
            tree_seeds,
            features_per_split: per_split,
            bootstrap: params.bootstrap,
        }),
    };
    Ok((model, oob_accuracy))
}
