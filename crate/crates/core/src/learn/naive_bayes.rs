//! Gaussian naive Bayes: per-class, per-feature normal likelihoods over the
//! non-missing training values, class priors from frequency.

use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;
use crate::model::Label;
use crate::Result;

use super::{labeled_rows, prior_of, ClassPrior, Model, ModelKind, ModelParams};

/// Variances are floored here so a constant feature cannot produce a
/// degenerate likelihood.
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianStat {
    pub mean: f64,
    pub var: f64,
    pub count: u64,
}

/// Per-feature class statistics. `None` means the class had no non-missing
/// training value for the feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub malicious: Option<GaussianStat>,
    pub benign: Option<GaussianStat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub features: Vec<FeatureStats>,
}

fn gaussian_of(values: &[f64]) -> Option<GaussianStat> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some(GaussianStat {
        mean,
        var: var.max(VARIANCE_FLOOR),
        count: values.len() as u64,
    })
}

pub fn train_naive_bayes(m: &FeatureMatrix) -> Result<Model> {
    let labels = labeled_rows(m)?;
    let mut features = Vec::with_capacity(m.feature_count());
    for j in 0..m.feature_count() {
        let class_values = |class: Label| -> Vec<f64> {
            m.rows
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == class)
                .filter_map(|(row, _)| row.values[j])
                .collect()
        };
        features.push(FeatureStats {
            malicious: gaussian_of(&class_values(Label::Malicious)),
            benign: gaussian_of(&class_values(Label::Benign)),
        });
    }
    Ok(Model {
        kind: ModelKind::NaiveBayes,
        feature_names: m.feature_names.clone(),
        train_seed: 0,
        class_prior: prior_of(m, &labels),
        params: ModelParams::NaiveBayes(NaiveBayesModel { features }),
    })
}

fn log_gaussian(x: f64, stat: &GaussianStat) -> f64 {
    -0.5 * (std::f64::consts::TAU * stat.var).ln() - (x - stat.mean).powi(2) / (2.0 * stat.var)
}

impl NaiveBayesModel {
    /// Posterior P(malicious | values) in log space. A feature contributes
    /// only when the vector has a value for it AND both classes carry stats;
    /// one-sided stats would make the class log-likelihoods incomparable.
    pub(crate) fn malicious_posterior(&self, prior: &ClassPrior, values: &[Option<f64>]) -> f64 {
        let mut log_mal = prior.malicious.ln();
        let mut log_ben = prior.benign.ln();
        for (value, stats) in values.iter().zip(&self.features) {
            let Some(x) = value else { continue };
            let (Some(sm), Some(sb)) = (&stats.malicious, &stats.benign) else {
                continue;
            };
            log_mal += log_gaussian(*x, sm);
            log_ben += log_gaussian(*x, sb);
        }
        // Logistic of the log-odds; exp(+inf)/exp(-inf) saturate correctly.
        1.0 / (1.0 + (log_ben - log_mal).exp())
    }
}
