//! The three classifiers: gaussian naive Bayes, an entropy decision tree,
//! and a random forest built on that tree.
//!
//! All training is deterministic: (matrix, params, seed) fully determine the
//! model regardless of thread count. Missing feature values are handled
//! natively — naive Bayes skips the feature, trees route the row to the
//! child that saw more training rows — so no sentinel imputation ever
//! touches the data. Every tie (split gain, leaf class, forest vote) breaks
//! deterministically, and class ties break toward malicious.

mod forest;
mod naive_bayes;
mod tree;

pub use forest::{train_random_forest, train_random_forest_with_oob, ForestModel};
pub use naive_bayes::{train_naive_bayes, FeatureStats, GaussianStat, NaiveBayesModel};
pub use tree::{train_decision_tree, TreeModel, TreeNode};

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, FeatureVector};
use crate::model::Label;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Kind-independent training knobs. The paper-era defaults: 100 trees,
/// ceil(sqrt(F)) features per split, unlimited depth, single-row leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    /// Number of trees in a forest.
    pub tree_count: usize,
    /// None = unlimited.
    pub max_depth: Option<usize>,
    /// Minimum rows per leaf.
    pub min_leaf: usize,
    /// Features considered per split in a forest; None = ceil(sqrt(F)).
    pub features_per_split: Option<usize>,
    pub seed: u64,
    /// Draw a bootstrap sample per tree. Disabling it (with one tree and all
    /// features per split) makes a forest degenerate to the plain tree.
    pub bootstrap: bool,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            tree_count: 100,
            max_depth: None,
            min_leaf: 1,
            features_per_split: None,
            seed: crate::DEFAULT_SEED,
            bootstrap: true,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.tree_count < 1 {
            return Err(Error::InvalidParam("tree_count must be >= 1".into()));
        }
        if self.min_leaf < 1 {
            return Err(Error::InvalidParam("min_leaf must be >= 1".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::InvalidParam("features_per_split must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    NaiveBayes,
    DecisionTree,
    RandomForest,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive_bayes" => Ok(ModelKind::NaiveBayes),
            "decision_tree" => Ok(ModelKind::DecisionTree),
            "random_forest" => Ok(ModelKind::RandomForest),
            other => Err(Error::InvalidParam(format!(
                "unknown classifier kind {other:?} (expected naive_bayes, decision_tree, or random_forest)"
            ))),
        }
    }
}

/// Training-set class frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassPrior {
    pub malicious: f64,
    pub benign: f64,
}

impl ClassPrior {
    fn from_labels(labels: &[Label]) -> Self {
        let malicious = labels.iter().filter(|&&l| l == Label::Malicious).count();
        ClassPrior {
            malicious: malicious as f64 / labels.len() as f64,
            benign: (labels.len() - malicious) as f64 / labels.len() as f64,
        }
    }
}

/// Kind-specific learned structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayesModel),
    DecisionTree(TreeModel),
    RandomForest(ForestModel),
}

/// A trained classifier. Serialization round-trips reproduce bit-identical
/// predictions; prediction never fails on a vector with matching features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub kind: ModelKind,
    pub feature_names: Vec<String>,
    /// Seed the training run was keyed by (0 where training draws nothing).
    pub train_seed: u64,
    pub class_prior: ClassPrior,
    pub params: ModelParams,
}

impl Model {
    /// Errors unless `names` matches the training columns exactly.
    pub fn check_features(&self, names: &[String]) -> Result<()> {
        if self.feature_names == names {
            Ok(())
        } else {
            Err(Error::FeatureMismatch {
                expected: self.feature_names.join(","),
                got: names.join(","),
            })
        }
    }
}

/// A predicted label plus the malicious-probability score behind it:
/// posterior for naive Bayes, leaf class fraction for a tree, vote fraction
/// for a forest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// Anything that can classify a feature row. Implemented by [`Model`]; test
/// harnesses substitute oracles.
pub trait Classifier: Sync {
    fn classify(&self, v: &FeatureVector) -> Result<Prediction>;
}

impl Classifier for Model {
    fn classify(&self, v: &FeatureVector) -> Result<Prediction> {
        predict(self, v)
    }
}

/// Classifies one row. The score is the malicious probability; scores of
/// exactly 0.5 resolve to malicious (fail toward flagging).
pub fn predict(model: &Model, v: &FeatureVector) -> Result<Prediction> {
    if v.values.len() != model.feature_names.len() {
        return Err(Error::FeatureMismatch {
            expected: model.feature_names.join(","),
            got: format!("{} positional values", v.values.len()),
        });
    }
    let score = match &model.params {
        ModelParams::NaiveBayes(nb) => nb.malicious_posterior(&model.class_prior, &v.values),
        ModelParams::DecisionTree(t) => t.malicious_fraction(&v.values),
        ModelParams::RandomForest(f) => f.malicious_vote_fraction(&v.values),
    };
    let label = if score >= 0.5 {
        Label::Malicious
    } else {
        Label::Benign
    };
    Ok(Prediction { label, score })
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format_version: u64,
    model: &'a Model,
}


/// Writes a versioned model file (JSON; floats keep full round-trip
/// precision).
pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(
        &mut w,
        &ModelFileRef {
            format_version: MODEL_FORMAT_VERSION,
            model,
        },
    )
    .map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::CorruptModel {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::CorruptModel {
            path: path.to_path_buf(),
            reason: "missing format_version".into(),
        })?;
    if found != MODEL_FORMAT_VERSION {
        return Err(Error::ModelVersion {
            path: path.to_path_buf(),
            found,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let model_value = value.get("model").cloned().ok_or_else(|| Error::CorruptModel {
        path: path.to_path_buf(),
        reason: "missing model".into(),
    })?;
    serde_json::from_value(model_value).map_err(|e| Error::CorruptModel {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Per-index seed derivation (splitmix64 finalizer), so per-tree RNG streams
/// are independent of execution order.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Resolves each row's label, requiring both classes to be present.
pub(crate) fn labeled_rows(m: &FeatureMatrix) -> Result<Vec<Label>> {
    let mut labels = Vec::with_capacity(m.len());
    for row in &m.rows {
        labels.push(row.label.ok_or_else(|| Error::UnlabeledRow {
            global_hash: row.global_hash.clone(),
        })?);
    }
    if !labels.contains(&Label::Malicious) {
        return Err(Error::ClassAbsent { label: "malicious" });
    }
    if !labels.contains(&Label::Benign) {
        return Err(Error::ClassAbsent { label: "benign" });
    }
    Ok(labels)
}

pub(crate) fn prior_of(m: &FeatureMatrix, labels: &[Label]) -> ClassPrior {
    debug_assert_eq!(m.len(), labels.len());
    ClassPrior::from_labels(labels)
}
