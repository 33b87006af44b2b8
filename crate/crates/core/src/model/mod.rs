//! Core domain types, the dataset container, and JSONL ingestion.
//!
//! A dataset is three record kinds in one line-delimited JSON file: `link`,
//! `encoder`, and `click`. Records that violate dataset invariants are
//! dropped (never repaired) and every drop is enumerated in the
//! [`LoadReport`]; silent repair would corrupt downstream feature
//! statistics. A dataset is immutable after load and safe to share across
//! worker threads.

mod psl;

pub use psl::registrable_domain;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Classification outcome for a link. Malicious is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Malicious,
    Benign,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Malicious => "malicious",
            Label::Benign => "benign",
        })
    }
}

/// How a link creator interacts with the shortener: a signed-in account, an
/// anonymous shortening, or a third-party posting application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    Regular,
    Anonymous,
    ThirdPartyApp,
}

impl EncoderKind {
    pub fn is_regular(self) -> bool {
        matches!(self, EncoderKind::Regular)
    }
}

/// One shortened URL with its creation metadata. The unit of classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortLink {
    pub global_hash: String,
    pub long_url: String,
    /// Registrable domain of `long_url`. Derived at load; a stored value
    /// that disagrees with the derivation is an invariant violation.
    #[serde(default)]
    pub domain: String,
    /// Creation time, UTC epoch seconds.
    pub created_at: i64,
    pub encoder_ids: Vec<String>,
    /// Number of interstitial warning pages displayed for this hash.
    /// Absent means unknown, not zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning_page_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

/// A connected social-network account of an encoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectedAccount {
    pub network: String,
    pub account_id: String,
}

/// One entry of an encoder's link history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub global_hash: String,
    pub warning_flagged: bool,
}

/// A link-creator account with its collected link history.
///
/// The history length is intentionally unbounded; per-account caps seen in
/// collected data are a collection artifact, not a property of the account.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderProfile {
    pub encoder_id: String,
    pub kind: EncoderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub account_created_at: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connected_networks: Vec<ConnectedAccount>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub link_history: Vec<HistoryEntry>,
}

/// One click on a link. An empty referrer domain means a direct click
/// (mail clients, messaging apps, address bar).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub global_hash: String,
    /// UTC epoch seconds.
    pub clicked_at: i64,
    /// Bare domain, no scheme or path. Empty = direct click.
    #[serde(default)]
    pub referrer_domain: String,
}

/// Immutable, validated collection of links, encoders, and clicks.
///
/// Keys are sorted, so iteration order (and everything derived from it) is
/// deterministic regardless of input file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub links: BTreeMap<String, ShortLink>,
    pub encoders: BTreeMap<String, EncoderProfile>,
    /// Clicks grouped by global hash, sorted by (clicked_at, referrer).
    pub clicks: BTreeMap<String, Vec<ClickEvent>>,
}

impl Dataset {
    pub fn clicks_for(&self, global_hash: &str) -> &[ClickEvent] {
        self.clicks.get(global_hash).map_or(&[], Vec::as_slice)
    }

    pub fn click_count(&self) -> usize {
        self.clicks.values().map(Vec::len).sum()
    }
}

/// What the loader dropped and why. `violations` holds one line per dropped
/// record; `malformed_lines` counts lines that were not valid records at all.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LoadReport {
    pub lines: usize,
    pub loaded_links: usize,
    pub loaded_encoders: usize,
    pub loaded_clicks: usize,
    pub malformed_lines: usize,
    pub violations: Vec<String>,
}

impl LoadReport {
    pub fn dropped(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "loaded {} links, {} encoders, {} clicks from {} lines ({} malformed, {} dropped)",
            self.loaded_links,
            self.loaded_encoders,
            self.loaded_clicks,
            self.lines,
            self.malformed_lines,
            self.dropped()
        )?;
        for v in &self.violations {
            writeln!(f, "  dropped: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Record {
    Link(ShortLink),
    Encoder(EncoderProfile),
    Click(ClickEvent),
}

/// Loads and validates a dataset file.
///
/// More than 10% unparsable lines is a hard error; anything less is tolerated
/// and counted. Records violating invariants are dropped and enumerated in
/// the report.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<(Dataset, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_dataset_from(BufReader::new(file), path)
}

/// Same as [`load_dataset`] but over any reader; `origin` only labels errors.
pub fn load_dataset_from(reader: impl Read, origin: impl AsRef<Path>) -> Result<(Dataset, LoadReport)> {
    let origin = origin.as_ref();
    let mut report = LoadReport::default();
    let mut first_error = String::new();

    let mut links: Vec<ShortLink> = Vec::new();
    let mut encoders: Vec<EncoderProfile> = Vec::new();
    let mut clicks: Vec<ClickEvent> = Vec::new();

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines += 1;
        match serde_json::from_str::<Record>(&line) {
            Ok(Record::Link(l)) => links.push(l),
            Ok(Record::Encoder(e)) => encoders.push(e),
            Ok(Record::Click(c)) => clicks.push(c),
            Err(e) => {
                report.malformed_lines += 1;
                if first_error.is_empty() {
                    first_error = format!("line {}: {}", idx + 1, e);
                }
            }
        }
    }

    if report.malformed_lines * 10 > report.lines {
        return Err(Error::MalformedInput {
            path: origin.to_path_buf(),
            malformed: report.malformed_lines,
            total: report.lines,
            first: first_error,
        });
    }

    let mut ds = Dataset::default();

    for encoder in encoders {
        if encoder.encoder_id.is_empty() {
            report.violations.push("encoder with empty encoder_id".into());
            continue;
        }
        if ds.encoders.contains_key(&encoder.encoder_id) {
            report
                .violations
                .push(format!("duplicate encoder_id {}", encoder.encoder_id));
            continue;
        }
        ds.encoders.insert(encoder.encoder_id.clone(), encoder);
    }

    for mut link in links {
        if link.global_hash.is_empty() {
            report.violations.push("link with empty global_hash".into());
            continue;
        }
        if ds.links.contains_key(&link.global_hash) {
            report
                .violations
                .push(format!("duplicate global_hash {}", link.global_hash));
            continue;
        }
        let derived = match registrable_domain(&link.long_url) {
            Ok(d) => d,
            Err(e) => {
                report
                    .violations
                    .push(format!("link {}: {}", link.global_hash, e));
                continue;
            }
        };
        if !link.domain.is_empty() && link.domain != derived {
            report.violations.push(format!(
                "link {}: stored domain {} does not match derived {}",
                link.global_hash, link.domain, derived
            ));
            continue;
        }
        if let Some(bad) = link.encoder_ids.iter().find(|id| !ds.encoders.contains_key(*id)) {
            report.violations.push(format!(
                "link {}: unknown encoder {}",
                link.global_hash, bad
            ));
            continue;
        }
        link.domain = derived;
        ds.links.insert(link.global_hash.clone(), link);
    }

    for click in clicks {
        let Some(link) = ds.links.get(&click.global_hash) else {
            report.violations.push(format!(
                "click on unknown link {}",
                click.global_hash
            ));
            continue;
        };
        if click.clicked_at < 0 {
            report.violations.push(format!(
                "click on {}: negative clicked_at {}",
                click.global_hash, click.clicked_at
            ));
            continue;
        }
        if click.clicked_at < link.created_at {
            report.violations.push(format!(
                "click on {} at {} predates link creation at {}",
                click.global_hash, click.clicked_at, link.created_at
            ));
            continue;
        }
        if click.referrer_domain.contains('/') || click.referrer_domain.contains(':') {
            report.violations.push(format!(
                "click on {}: referrer {:?} carries a scheme or path",
                click.global_hash, click.referrer_domain
            ));
            continue;
        }
        ds.clicks
            .entry(click.global_hash.clone())
            .or_default()
            .push(click);
    }
    for group in ds.clicks.values_mut() {
        group.sort_by(|a, b| {
            a.clicked_at
                .cmp(&b.clicked_at)
                .then_with(|| a.referrer_domain.cmp(&b.referrer_domain))
        });
    }

    report.loaded_links = ds.links.len();
    report.loaded_encoders = ds.encoders.len();
    report.loaded_clicks = ds.click_count();
    Ok((ds, report))
}

/// Writes a dataset in the JSONL format the loader accepts. Record order and
/// key order are fixed, so identical datasets serialize to identical bytes.
pub fn write_dataset(ds: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let io_err = |e: std::io::Error| Error::io("<writer>", e);
    for link in ds.links.values() {
        serde_json::to_writer(&mut w, &Record::Link(link.clone()))
            .map_err(|e| Error::io("<writer>", e.into()))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    for encoder in ds.encoders.values() {
        serde_json::to_writer(&mut w, &Record::Encoder(encoder.clone()))
            .map_err(|e| Error::io("<writer>", e.into()))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    for group in ds.clicks.values() {
        for click in group {
            serde_json::to_writer(&mut w, &Record::Click(click.clone()))
                .map_err(|e| Error::io("<writer>", e.into()))?;
            w.write_all(b"\n").map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Convenience wrapper writing to a file path.
pub fn write_dataset_file(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(ds, file)
}
