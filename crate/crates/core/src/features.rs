//! Extraction of the seven classification features from a dataset.
//!
//! Two WHOIS-based features (domain age, link/domain creation gap), three
//! non-click features (creation hour, encoder count, non-regular encoder
//! fraction), and two click features (creation-to-first-click lag, direct
//! click fraction). Extraction runs in one of two modes:
//!
//! * `full` — all seven features; links with zero clicks carry both click
//!   features as missing values.
//! * `non_click` — only the five features computable without click history.
//!
//! Features are carried positionally in a [`FeatureMatrix`] whose column
//! order is fixed and documented by [`FEATURE_NAMES_FULL`] /
//! [`FEATURE_NAMES_NON_CLICK`]; a missing value is an explicit `None`, never
//! a sentinel. Extraction is pure and per-link independent.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enrich::{lookup_whois, WhoisRecord, WhoisStore};
use crate::model::{ClickEvent, Dataset, EncoderKind, Label, ShortLink};
use crate::{Error, Result};

const SECS_PER_DAY: f64 = 86_400.0;

/// Column order of a full-mode matrix.
pub const FEATURE_NAMES_FULL: [&str; 7] = [
    "domain_age_days",
    "creation_gap_days",
    "creation_hour",
    "encoder_count",
    "nonregular_encoder_fraction",
    "creation_click_lag_secs",
    "direct_click_fraction",
];

/// Column order of a non-click-mode matrix: the first five full-mode columns.
pub const FEATURE_NAMES_NON_CLICK: [&str; 5] = [
    "domain_age_days",
    "creation_gap_days",
    "creation_hour",
    "encoder_count",
    "nonregular_encoder_fraction",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    Full,
    NonClick,
}

impl ExtractionMode {
    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            ExtractionMode::Full => &FEATURE_NAMES_FULL,
            ExtractionMode::NonClick => &FEATURE_NAMES_NON_CLICK,
        }
    }
}

impl fmt::Display for ExtractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtractionMode::Full => "full",
            ExtractionMode::NonClick => "non_click",
        })
    }
}

impl FromStr for ExtractionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ExtractionMode::Full),
            "non_click" => Ok(ExtractionMode::NonClick),
            other => Err(Error::InvalidParam(format!(
                "unknown extraction mode {other:?} (expected full or non_click)"
            ))),
        }
    }
}

/// One row of a feature matrix: positional values aligned with the matrix
/// feature names. `None` is a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub global_hash: String,
    pub values: Vec<Option<f64>>,
    pub label: Option<Label>,
}

impl FeatureVector {
    pub fn new(global_hash: impl Into<String>, values: Vec<Option<f64>>, label: Option<Label>) -> Self {
        FeatureVector {
            global_hash: global_hash.into(),
            values,
            label,
        }
    }
}

/// Feature rows plus their column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>) -> Self {
        FeatureMatrix {
            feature_names,
            rows: Vec::new(),
        }
    }

    pub fn with_mode(mode: ExtractionMode) -> Self {
        Self::new(mode.feature_names().iter().map(|s| s.to_string()).collect())
    }

    /// The canonical extraction mode these columns correspond to, if any.
    pub fn mode(&self) -> Option<ExtractionMode> {
        if self.feature_names == FEATURE_NAMES_FULL {
            Some(ExtractionMode::Full)
        } else if self.feature_names == FEATURE_NAMES_NON_CLICK {
            Some(ExtractionMode::NonClick)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn value(&self, row: usize, feature: usize) -> Option<f64> {
        self.rows[row].values[feature]
    }

    /// Rows by label; unlabeled rows are an error for training-side callers.
    pub fn label_of(&self, row: usize) -> Result<Label> {
        self.rows[row].label.ok_or_else(|| Error::UnlabeledRow {
            global_hash: self.rows[row].global_hash.clone(),
        })
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let malicious = self
            .rows
            .iter()
            .filter(|r| r.label == Some(Label::Malicious))
            .count();
        let benign = self
            .rows
            .iter()
            .filter(|r| r.label == Some(Label::Benign))
            .count();
        (malicious, benign)
    }

    /// New matrix holding clones of the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// CSV with header `feature_names..,label,global_hash`; missing values
    /// are empty cells.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push("label");
        header.push("global_hash");
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record: Vec<String> = row
                .values
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
                .collect();
            record.push(row.label.map(|l| l.to_string()).unwrap_or_default());
            record.push(row.global_hash.clone());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn read_csv(reader: impl Read) -> Result<FeatureMatrix> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 3 || cols[cols.len() - 2] != "label" || cols[cols.len() - 1] != "global_hash" {
            return Err(Error::InvalidParam(
                "feature CSV must end with label,global_hash columns".into(),
            ));
        }
        let feature_names: Vec<String> = cols[..cols.len() - 2].iter().map(|s| s.to_string()).collect();
        let n = feature_names.len();
        let mut matrix = FeatureMatrix::new(feature_names);
        for record in r.records() {
            let record = record?;
            if record.len() != n + 2 {
                return Err(Error::InvalidParam(format!(
                    "feature CSV row has {} fields, expected {}",
                    record.len(),
                    n + 2
                )));
            }
            let mut values = Vec::with_capacity(n);
            for cell in record.iter().take(n) {
                if cell.is_empty() {
                    values.push(None);
                } else {
                    let x: f64 = cell.parse().map_err(|_| {
                        Error::InvalidParam(format!("feature CSV cell {cell:?} is not numeric"))
                    })?;
                    values.push(Some(x));
                }
            }
            let label = match record.get(n).unwrap_or("") {
                "" => None,
                "malicious" => Some(Label::Malicious),
                "benign" => Some(Label::Benign),
                other => {
                    return Err(Error::InvalidParam(format!(
                        "feature CSV label {other:?} is not malicious/benign/empty"
                    )))
                }
            };
            let global_hash = record.get(n + 1).unwrap_or("").to_string();
            matrix.rows.push(FeatureVector::new(global_hash, values, label));
        }
        Ok(matrix)
    }
}

/// Days between domain registration and WHOIS resolution. Missing when the
/// registrar exposed no creation date.
pub fn domain_age_days(whois: &WhoisRecord) -> Option<f64> {
    whois
        .created_at
        .map(|created| (whois.resolved_at - created) as f64 / SECS_PER_DAY)
}

/// Days from the domain's most recent registration event (max of creation
/// and update) to link creation. Negative when the domain record was updated
/// after the link was shortened. Missing when neither date is known.
pub fn creation_gap_days(link: &ShortLink, whois: &WhoisRecord) -> Option<f64> {
    let anchor = match (whois.created_at, whois.updated_at) {
        (Some(c), Some(u)) => c.max(u),
        (Some(c), None) => c,
        (None, Some(u)) => u,
        (None, None) => return None,
    };
    Some((link.created_at - anchor) as f64 / SECS_PER_DAY)
}

/// UTC hour of day (0-23) the link was created.
pub fn creation_hour(link: &ShortLink) -> u8 {
    (link.created_at.rem_euclid(86_400) / 3_600) as u8
}

/// Number of distinct encoders that shortened this link.
pub fn encoder_count(link: &ShortLink) -> Result<usize> {
    let mut ids: Vec<&str> = link.encoder_ids.iter().map(String::as_str).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(Error::NoEncoders {
            global_hash: link.global_hash.clone(),
        });
    }
    Ok(ids.len())
}

/// Fraction of the link's distinct encoders that are anonymous or
/// third-party applications.
pub fn nonregular_encoder_fraction(link: &ShortLink, ds: &Dataset) -> Result<f64> {
    let mut ids: Vec<&str> = link.encoder_ids.iter().map(String::as_str).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(Error::NoEncoders {
            global_hash: link.global_hash.clone(),
        });
    }
    let mut nonregular = 0usize;
    for id in &ids {
        let encoder = ds.encoders.get(*id).ok_or_else(|| Error::UnknownEncoder {
            global_hash: link.global_hash.clone(),
            encoder_id: id.to_string(),
        })?;
        if !matches!(encoder.kind, EncoderKind::Regular) {
            nonregular += 1;
        }
    }
    Ok(nonregular as f64 / ids.len() as f64)
}

/// Seconds from link creation to the earliest click. Missing with zero
/// clicks. Non-negative for any dataset that passed load validation.
pub fn creation_click_lag_secs(link: &ShortLink, clicks: &[ClickEvent]) -> Option<f64> {
    clicks
        .iter()
        .map(|c| c.clicked_at)
        .min()
        .map(|first| (first - link.created_at) as f64)
}

/// Fraction of clicks arriving with no referrer domain. Missing with zero
/// clicks.
pub fn direct_click_fraction(clicks: &[ClickEvent]) -> Option<f64> {
    if clicks.is_empty() {
        return None;
    }
    let direct = clicks.iter().filter(|c| c.referrer_domain.is_empty()).count();
    Some(direct as f64 / clicks.len() as f64)
}

/// Extracts the feature row for one link.
pub fn extract_link(
    link: &ShortLink,
    ds: &Dataset,
    whois: &WhoisStore,
    mode: ExtractionMode,
) -> Result<FeatureVector> {
    let record = lookup_whois(&link.domain, whois);
    let mut values = vec![
        domain_age_days(&record),
        creation_gap_days(link, &record),
        Some(creation_hour(link) as f64),
        Some(encoder_count(link)? as f64),
        Some(nonregular_encoder_fraction(link, ds)?),
    ];
    if mode == ExtractionMode::Full {
        let clicks = ds.clicks_for(&link.global_hash);
        values.push(creation_click_lag_secs(link, clicks));
        values.push(direct_click_fraction(clicks));
    }
    Ok(FeatureVector::new(link.global_hash.clone(), values, link.label))
}

/// Extracts one feature row per link, in global-hash order.
pub fn extract(ds: &Dataset, whois: &WhoisStore, mode: ExtractionMode) -> Result<FeatureMatrix> {
    let mut matrix = FeatureMatrix::with_mode(mode);
    matrix.rows.reserve(ds.links.len());
    for link in ds.links.values() {
        matrix.rows.push(extract_link(link, ds, whois, mode)?);
    }
    Ok(matrix)
}
