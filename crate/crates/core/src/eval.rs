//! Evaluation protocol: stratified holdout and k-fold cross-validation,
//! precision/recall/F-measure/accuracy from confusion counts, and
//! information-gain feature ranking.
//!
//! Malicious is the positive class throughout; benign metrics come from the
//! transposed confusion matrix. Fold training and evaluation parallelize
//! over folds, and aggregation is integer count summation, so reports are
//! identical for any worker count.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;
use crate::learn::Classifier;
use crate::model::Label;
use crate::{Error, Result};

/// Two-class confusion counts; malicious = positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn new(true_pos: u64, false_pos: u64, true_neg: u64, false_neg: u64) -> Self {
        ConfusionMatrix {
            true_pos,
            false_pos,
            true_neg,
            false_neg,
        }
    }

    pub fn record(&mut self, actual: Label, predicted: Label) {
        match (actual, predicted) {
            (Label::Malicious, Label::Malicious) => self.true_pos += 1,
            (Label::Malicious, Label::Benign) => self.false_neg += 1,
            (Label::Benign, Label::Malicious) => self.false_pos += 1,
            (Label::Benign, Label::Benign) => self.true_neg += 1,
        }
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
        self.false_neg += other.false_neg;
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    /// Actual-class supports: (malicious, benign).
    pub fn supports(&self) -> (u64, u64) {
        (
            self.true_pos + self.false_neg,
            self.false_pos + self.true_neg,
        )
    }
}

/// Precision/recall/F for one class. `degenerate` marks metrics forced to 0
/// by a zero denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub degenerate: bool,
}

fn class_metrics(tp: u64, fp: u64, fn_: u64) -> ClassMetrics {
    let mut degenerate = false;
    let mut ratio = |num: u64, den: u64| -> f64 {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f_measure = if precision + recall == 0.0 {
        degenerate = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        precision,
        recall,
        f_measure,
        degenerate,
    }
}

/// Metrics for one evaluation run (or one CV fold, or a CV aggregate, in
/// which case `fold_reports` carries the per-fold breakdowns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub malicious: ClassMetrics,
    pub benign: ClassMetrics,
    pub weighted_f_measure: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_reports: Option<Vec<EvalReport>>,
}

/// Derives every metric from confusion counts. Precision = TP/(TP+FP),
/// recall = TP/(TP+FN), F = their harmonic mean, accuracy =
/// (TP+TN)/total; the benign class reads the matrix transposed. The
/// weighted F-measure weights each class by its actual support.
pub fn metrics(c: &ConfusionMatrix) -> EvalReport {
    let malicious = class_metrics(c.true_pos, c.false_pos, c.false_neg);
    let benign = class_metrics(c.true_neg, c.false_neg, c.false_pos);
    let total = c.total();
    let accuracy = if total == 0 {
        0.0
    } else {
        (c.true_pos + c.true_neg) as f64 / total as f64
    };
    let (support_mal, support_ben) = c.supports();
    let weighted_f_measure = if total == 0 {
        0.0
    } else {
        (malicious.f_measure * support_mal as f64 + benign.f_measure * support_ben as f64)
            / (support_mal + support_ben) as f64
    };
    EvalReport {
        confusion: *c,
        accuracy,
        malicious,
        benign,
        weighted_f_measure,
        fold_reports: None,
    }
}

/// Per-class row indices, in row order.
fn class_indices(m: &FeatureMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut malicious = Vec::new();
    let mut benign = Vec::new();
    for i in 0..m.len() {
        match m.label_of(i)? {
            Label::Malicious => malicious.push(i),
            Label::Benign => benign.push(i),
        }
    }
    Ok((malicious, benign))
}

/// Stratified holdout split. Each class contributes round(n * fraction)
/// test rows (clamped so both sides keep at least one row per class), which
/// keeps every class within one row of the exact fraction.
pub fn split_holdout(
    m: &FeatureMatrix,
    test_fraction: f64,
    seed: u64,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParam(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let (malicious, benign) = class_indices(m)?;
    for (name, class) in [("malicious", &malicious), ("benign", &benign)] {
        if class.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "class {name} has {} rows; need at least 2 to split",
                class.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [malicious, benign] {
        let mut order = class;
        order.shuffle(&mut rng);
        let want = (order.len() as f64 * test_fraction).round() as usize;
        let take = want.clamp(1, order.len() - 1);
        test.extend_from_slice(&order[..take]);
        train.extend_from_slice(&order[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((m.subset(&train), m.subset(&test)))
}

/// Stratified k-fold partition: per class, shuffled indices are dealt
/// round-robin, so per-class fold sizes differ by at most one and every row
/// lands in exactly one fold. Returns the k test-index sets, each sorted.
pub fn stratified_folds(m: &FeatureMatrix, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParam(format!("k must be >= 2, got {k}")));
    }
    let (malicious, benign) = class_indices(m)?;
    for (name, class) in [("malicious", &malicious), ("benign", &benign)] {
        if class.len() < k {
            return Err(Error::InvalidParam(format!(
                "class {name} has {} rows; need at least k = {k}",
                class.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for class in [malicious, benign] {
        let mut order = class;
        order.shuffle(&mut rng);
        for (i, row) in order.into_iter().enumerate() {
            folds[i % k].push(row);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Evaluates a classifier on labeled rows.
pub fn evaluate<C: Classifier>(classifier: &C, test: &FeatureMatrix) -> Result<EvalReport> {
    let mut confusion = ConfusionMatrix::default();
    for i in 0..test.len() {
        let actual = test.label_of(i)?;
        let predicted = classifier.classify(&test.rows[i])?.label;
        confusion.record(actual, predicted);
    }
    Ok(metrics(&confusion))
}

/// Stratified k-fold cross-validation. Each row is tested exactly once; the
/// aggregate confusion matrix is the sum over folds and the returned report
/// carries the per-fold reports.
pub fn cross_validate<C, F>(
    trainer: F,
    m: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<EvalReport>
where
    C: Classifier,
    F: Fn(&FeatureMatrix) -> Result<C> + Sync,
{
    let folds = stratified_folds(m, k, seed)?;
    let fold_reports: Vec<EvalReport> = folds
        .par_iter()
        .map(|test_rows| {
            let in_test = {
                let mut mask = vec![false; m.len()];
                for &r in test_rows {
                    mask[r] = true;
                }
                mask
            };
            let train_rows: Vec<usize> = (0..m.len()).filter(|&r| !in_test[r]).collect();
            let model = trainer(&m.subset(&train_rows))?;
            evaluate(&model, &m.subset(test_rows))
        })
        .collect::<Result<_>>()?;
    let mut total = ConfusionMatrix::default();
    for fold in &fold_reports {
        total.add(&fold.confusion);
    }
    let mut report = metrics(&total);
    report.fold_reports = Some(fold_reports);
    Ok(report)
}

/// One feature's information gain against the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub info_gain: f64,
}

/// Features ordered by non-increasing information gain; ties keep the
/// original column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
    pub bins: usize,
    /// Entropy of the label distribution — the ceiling for any gain.
    pub label_entropy: f64,
}

fn entropy_of_counts(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// Ranks features by information gain after equal-width discretization into
/// `bins` bins over each feature's observed range; missing values form their
/// own bin. Constant features gain zero. Equal-width binning is sensitive to
/// monotone transforms of a feature; rankings are comparable only between
/// matrices binned the same way.
pub fn info_gain_rank(m: &FeatureMatrix, bins: usize) -> Result<FeatureRanking> {
    if bins < 2 {
        return Err(Error::InvalidParam(format!("bins must be >= 2, got {bins}")));
    }
    let mut labels = Vec::with_capacity(m.len());
    for i in 0..m.len() {
        labels.push(m.label_of(i)?);
    }
    let label_counts = |rows: &[Label]| -> [u64; 2] {
        let mal = rows.iter().filter(|&&l| l == Label::Malicious).count() as u64;
        [mal, rows.len() as u64 - mal]
    };
    let label_entropy = entropy_of_counts(&label_counts(&labels));

    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(m.feature_count());
    for j in 0..m.feature_count() {
        let values: Vec<Option<f64>> = (0..m.len()).map(|i| m.value(i, j)).collect();
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let gain = if present.is_empty() {
            0.0
        } else {
            let min = present.iter().copied().fold(f64::INFINITY, f64::min);
            let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (max - min) / bins as f64;
            // bin `bins` holds the missing values.
            let mut counts = vec![[0u64; 2]; bins + 1];
            for (value, label) in values.iter().zip(&labels) {
                let bin = match value {
                    None => bins,
                    Some(_) if width == 0.0 => 0,
                    Some(x) => (((x - min) / width) as usize).min(bins - 1),
                };
                counts[bin][usize::from(*label == Label::Benign)] += 1;
            }
            let n = m.len() as f64;
            let conditional: f64 = counts
                .iter()
                .map(|c| {
                    let size = (c[0] + c[1]) as f64;
                    (size / n) * entropy_of_counts(c)
                })
                .sum();
            label_entropy - conditional
        };
        scored.push((j, gain));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(FeatureRanking {
        entries: scored
            .into_iter()
            .map(|(j, info_gain)| RankedFeature {
                feature: m.feature_names[j].clone(),
                info_gain,
            })
            .collect(),
        bins,
        label_entropy,
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

/// Plain-text report in the classic layout: one metric per row, plus the
/// confusion matrix as counts and row-normalized percentages.
pub fn render_report_text(report: &EvalReport, title: &str) -> String {
    let mut out = String::new();
    let c = &report.confusion;
    let (support_mal, support_ben) = c.supports();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:-<width$}", "", width = title.len());
    let rows = [
        ("Accuracy", report.accuracy),
        ("Recall (malicious)", report.malicious.recall),
        ("Recall (benign)", report.benign.recall),
        ("Precision (malicious)", report.malicious.precision),
        ("Precision (benign)", report.benign.precision),
        ("F-measure (malicious)", report.malicious.f_measure),
        ("F-measure (benign)", report.benign.f_measure),
        ("Weighted F-measure", report.weighted_f_measure),
    ];
    for (name, value) in rows {
        let _ = writeln!(out, "{name:<24} {:>8}", pct(value));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Confusion matrix (rows = actual):");
    let _ = writeln!(
        out,
        "{:<18} {:>22} {:>22}",
        "", "predicted malicious", "predicted benign"
    );
    let row_line = |name: &str, a: u64, b: u64, support: u64| {
        let p = |x: u64| {
            if support == 0 {
                "-".to_string()
            } else {
                format!("{x} ({})", pct(x as f64 / support as f64))
            }
        };
        format!("{name:<18} {:>22} {:>22}", p(a), p(b))
    };
    let _ = writeln!(
        out,
        "{}",
        row_line("actual malicious", c.true_pos, c.false_neg, support_mal)
    );
    let _ = writeln!(
        out,
        "{}",
        row_line("actual benign", c.false_pos, c.true_neg, support_ben)
    );
    if let Some(folds) = &report.fold_reports {
        let _ = writeln!(out);
        let _ = writeln!(out, "Per-fold accuracy:");
        for (i, fold) in folds.iter().enumerate() {
            let _ = writeln!(out, "  fold {:>2}: {}", i + 1, pct(fold.accuracy));
        }
    }
    out
}

/// Plain-text ranking table.
pub fn render_ranking_text(ranking: &FeatureRanking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:<32} {:>12}", "Rank", "Feature", "Info gain");
    for (i, entry) in ranking.entries.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<6} {:<32} {:>12.6}",
            i + 1,
            entry.feature,
            entry.info_gain
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use crate::learn::Prediction;
    use crate::model::Label::{Benign, Malicious};

    fn labeled_matrix(labels: &[Label]) -> FeatureMatrix {
        let mut m = FeatureMatrix::new(vec!["x".into()]);
        for (i, &label) in labels.iter().enumerate() {
            m.rows.push(FeatureVector::new(
                format!("r{i}"),
                vec![Some(i as f64)],
                Some(label),
            ));
        }
        m
    }

    /// Predicts the stored label (optionally inverted).
    struct LabelOracle {
        invert: bool,
    }

    impl Classifier for LabelOracle {
        fn classify(&self, v: &FeatureVector) -> Result<Prediction> {
            let stored = v.label.expect("oracle needs labeled rows");
            let label = match (stored, self.invert) {
                (l, false) => l,
                (Malicious, true) => Benign,
                (Benign, true) => Malicious,
            };
            Ok(Prediction {
                label,
                score: if label == Malicious { 1.0 } else { 0.0 },
            })
        }
    }

    #[test]
    fn symmetric_counts_give_one_half_everywhere() {
        let r = metrics(&ConfusionMatrix::new(1, 1, 1, 1));
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.malicious.precision, 0.5);
        assert_eq!(r.malicious.recall, 0.5);
        assert_eq!(r.malicious.f_measure, 0.5);
        assert_eq!(r.benign.f_measure, 0.5);
        assert_eq!(r.weighted_f_measure, 0.5);
        assert!(!r.malicious.degenerate);
    }

    #[test]
    fn metrics_are_scale_free() {
        let base = ConfusionMatrix::new(16, 5, 22, 7);
        let a = metrics(&base);
        for factor in [2u64, 10, 1000] {
            let scaled = ConfusionMatrix::new(
                base.true_pos * factor,
                base.false_pos * factor,
                base.true_neg * factor,
                base.false_neg * factor,
            );
            let b = metrics(&scaled);
            assert!((a.accuracy - b.accuracy).abs() < 1e-12);
            assert!((a.malicious.f_measure - b.malicious.f_measure).abs() < 1e-12);
            assert!((a.benign.precision - b.benign.precision).abs() < 1e-12);
            assert!((a.weighted_f_measure - b.weighted_f_measure).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_denominators_flag_degenerate() {
        // Nothing predicted malicious: malicious precision denominator is 0.
        let r = metrics(&ConfusionMatrix::new(0, 0, 5, 5));
        assert_eq!(r.malicious.precision, 0.0);
        assert!(r.malicious.degenerate);
        assert!(!r.benign.degenerate);
    }

    #[test]
    fn f_measure_sits_between_precision_and_recall() {
        for (tp, fp, fn_) in [(10, 3, 7), (50, 1, 20), (4, 4, 1), (9, 0, 0)] {
            let m = class_metrics(tp, fp, fn_);
            if m.precision > 0.0 && m.recall > 0.0 {
                let lo = m.precision.min(m.recall);
                let hi = m.precision.max(m.recall);
                assert!(m.f_measure >= lo - 1e-12 && m.f_measure <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn holdout_is_stratified_and_seeded() {
        let labels: Vec<Label> = (0..16)
            .map(|i| if i < 8 { Malicious } else { Benign })
            .collect();
        let m = labeled_matrix(&labels);
        let (train, test) = split_holdout(&m, 0.25, 9).unwrap();
        assert_eq!(test.label_counts(), (2, 2));
        assert_eq!(train.label_counts(), (6, 6));

        let (train2, test2) = split_holdout(&m, 0.25, 9).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
    }

    #[test]
    fn holdout_rejects_tiny_classes_and_bad_fractions() {
        let m = labeled_matrix(&[Malicious, Benign, Benign]);
        assert!(split_holdout(&m, 0.25, 1).is_err());
        let ok = labeled_matrix(&[Malicious, Malicious, Benign, Benign]);
        assert!(split_holdout(&ok, 0.0, 1).is_err());
        assert!(split_holdout(&ok, 1.0, 1).is_err());
    }

    #[test]
    fn folds_partition_every_row_exactly_once() {
        let labels: Vec<Label> = (0..100)
            .map(|i| if i % 3 == 0 { Malicious } else { Benign })
            .collect();
        let m = labeled_matrix(&labels);
        let folds = stratified_folds(&m, 10, 5).unwrap();
        assert_eq!(folds.len(), 10);
        let mut seen = vec![0usize; m.len()];
        for fold in &folds {
            assert!(fold.len() == 10 || fold.len() == 9 || fold.len() == 11);
            for &r in fold {
                seen[r] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        // Per-class sizes within one row of each other.
        for class in [Malicious, Benign] {
            let sizes: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&r| labels[r] == class).count())
                .collect();
            let lo = sizes.iter().min().unwrap();
            let hi = sizes.iter().max().unwrap();
            assert!(hi - lo <= 1, "{class:?} fold sizes {sizes:?}");
        }
    }

    #[test]
    fn perfect_and_inverted_oracles_bound_cv_accuracy() {
        let labels: Vec<Label> = (0..40)
            .map(|i| if i % 2 == 0 { Malicious } else { Benign })
            .collect();
        let m = labeled_matrix(&labels);
        let perfect = cross_validate(
            |_: &FeatureMatrix| Ok(LabelOracle { invert: false }),
            &m,
            10,
            1,
        )
        .unwrap();
        assert_eq!(perfect.accuracy, 1.0);
        assert_eq!(perfect.confusion.total(), 40);

        let inverted = cross_validate(
            |_: &FeatureMatrix| Ok(LabelOracle { invert: true }),
            &m,
            10,
            1,
        )
        .unwrap();
        assert_eq!(inverted.accuracy, 0.0);

        let folds = perfect.fold_reports.as_ref().unwrap();
        assert_eq!(folds.len(), 10);
        let summed: u64 = folds.iter().map(|f| f.confusion.total()).sum();
        assert_eq!(summed, 40);
    }

    #[test]
    fn perfect_predictor_feature_gains_the_label_entropy() {
        let labels: Vec<Label> = (0..20)
            .map(|i| if i < 10 { Malicious } else { Benign })
            .collect();
        let mut m = FeatureMatrix::new(vec!["mirror".into(), "noise".into()]);
        for (i, &label) in labels.iter().enumerate() {
            let mirror = if label == Malicious { 1.0 } else { 0.0 };
            m.rows.push(FeatureVector::new(
                format!("r{i}"),
                vec![Some(mirror), Some((i % 4) as f64)],
                Some(label),
            ));
        }
        let ranking = info_gain_rank(&m, 10).unwrap();
        assert_eq!(ranking.entries[0].feature, "mirror");
        assert!((ranking.entries[0].info_gain - ranking.label_entropy).abs() < 1e-12);
        assert!((ranking.label_entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_case_mmbb_0011_gains_one_bit() {
        let m = {
            let mut m = FeatureMatrix::new(vec!["f".into()]);
            for (i, (v, l)) in [
                (0.0, Malicious),
                (0.0, Malicious),
                (1.0, Benign),
                (1.0, Benign),
            ]
            .into_iter()
            .enumerate()
            {
                m.rows
                    .push(FeatureVector::new(format!("r{i}"), vec![Some(v)], Some(l)));
            }
            m
        };
        let ranking = info_gain_rank(&m, 2).unwrap();
        assert_eq!(ranking.entries[0].info_gain, 1.0);
    }

    #[test]
    fn constant_feature_gains_zero_and_missing_gets_its_own_bin() {
        let mut m = FeatureMatrix::new(vec!["constant".into(), "missingness".into()]);
        for i in 0..12 {
            let label = if i % 2 == 0 { Malicious } else { Benign };
            // missingness: malicious rows carry a value, benign rows don't —
            // perfectly informative through the missing bin alone.
            let miss = (label == Malicious).then_some(5.0);
            m.rows.push(FeatureVector::new(
                format!("r{i}"),
                vec![Some(7.0), miss],
                Some(label),
            ));
        }
        let ranking = info_gain_rank(&m, 4).unwrap();
        let by_name = |n: &str| {
            ranking
                .entries
                .iter()
                .find(|e| e.feature == n)
                .unwrap()
                .info_gain
        };
        assert_eq!(by_name("constant"), 0.0);
        assert!((by_name("missingness") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ranking_ties_keep_column_order() {
        let mut m = FeatureMatrix::new(vec!["a".into(), "b".into()]);
        for i in 0..8 {
            let label = if i < 4 { Malicious } else { Benign };
            let v = Some(if i < 4 { 0.0 } else { 1.0 });
            m.rows
                .push(FeatureVector::new(format!("r{i}"), vec![v, v], Some(label)));
        }
        let ranking = info_gain_rank(&m, 2).unwrap();
        assert_eq!(ranking.entries[0].feature, "a");
        assert_eq!(ranking.entries[0].info_gain, ranking.entries[1].info_gain);
    }

    #[test]
    fn rendered_report_mentions_every_metric_row() {
        let r = metrics(&ConfusionMatrix::new(1680, 387, 1539, 394));
        let text = render_report_text(&r, "holdout evaluation");
        for needle in [
            "Accuracy",
            "Recall (malicious)",
            "Precision (benign)",
            "F-measure (malicious)",
            "predicted malicious",
            "actual benign",
            "1680",
        ] {
            assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
        }
    }
}
