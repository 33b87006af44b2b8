//! WHOIS record handling, blacklist-verdict aggregation, and link labeling.
//!
//! Every provider is fixture-backed: a JSONL file of subjects and verdicts
//! keyed the same way the live services key their answers (full URL or
//! registrable domain). A live HTTP adapter can sit behind the same
//! operations, but tests and batch runs stay deterministic and keyless.
//! Stores are immutable after load; all lookups are pure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{Dataset, Label, ShortLink};
use crate::{Error, Result};

/// A labeling source. The four public blacklists plus the shortener's own
/// interstitial warning page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Safebrowsing,
    Surbl,
    Phishtank,
    Virustotal,
    WarningPage,
}

impl Source {
    pub const ALL: [Source; 5] = [
        Source::Safebrowsing,
        Source::Surbl,
        Source::Phishtank,
        Source::Virustotal,
        Source::WarningPage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Source::Safebrowsing => "safebrowsing",
            Source::Surbl => "surbl",
            Source::Phishtank => "phishtank",
            Source::Virustotal => "virustotal",
            Source::WarningPage => "warning_page",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|src| src.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown verdict source {s:?}")))
    }
}

/// WHOIS data for one registrable domain. All timestamps are UTC epoch
/// seconds; absent dates mean the registrar did not expose them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhoisRecord {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub updated_at: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expires_at: Option<i64>,
    /// When the record was fetched.
    pub resolved_at: i64,
    pub alive: bool,
}

impl WhoisRecord {
    /// Record for a domain the store knows nothing about.
    pub fn unknown(domain: &str) -> Self {
        WhoisRecord {
            domain: domain.to_string(),
            created_at: None,
            updated_at: None,
            expires_at: None,
            resolved_at: 0,
            alive: false,
        }
    }
}

/// Immutable WHOIS fixture store keyed by registrable domain.
///
/// Fixture dates must be epoch integers. Free-text registrar responses are
/// normalized offline (see the repo's fixture tooling); dates of any other
/// JSON type are treated as absent rather than rejecting the record, and
/// dates violating `created <= updated` / `created <= resolved` are cleared
/// the same way. The alive flag is preserved in all these cases.
#[derive(Debug, Clone, Default)]
pub struct WhoisStore {
    records: BTreeMap<String, WhoisRecord>,
}

impl WhoisStore {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load_from(BufReader::new(file), path)
    }

    pub fn load_from(reader: impl Read, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut records = BTreeMap::new();
        for line in BufReader::new(reader).lines() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(&line)
                .map_err(|e| Error::io(origin, std::io::Error::other(e)))?;
            let Some(domain) = value.get("domain").and_then(Value::as_str) else {
                continue;
            };
            let domain = domain.to_ascii_lowercase();
            let mut record = WhoisRecord {
                domain: domain.clone(),
                created_at: value.get("created_at").and_then(Value::as_i64),
                updated_at: value.get("updated_at").and_then(Value::as_i64),
                expires_at: value.get("expires_at").and_then(Value::as_i64),
                resolved_at: value.get("resolved_at").and_then(Value::as_i64).unwrap_or(0),
                alive: value.get("alive").and_then(Value::as_bool).unwrap_or(false),
            };
            if let (Some(c), Some(u)) = (record.created_at, record.updated_at) {
                if c > u {
                    record.created_at = None;
                    record.updated_at = None;
                }
            }
            if let Some(c) = record.created_at {
                if c > record.resolved_at {
                    record.created_at = None;
                }
            }
            records.insert(domain, record);
        }
        Ok(WhoisStore { records })
    }

    pub fn from_records(records: impl IntoIterator<Item = WhoisRecord>) -> Self {
        WhoisStore {
            records: records
                .into_iter()
                .map(|r| (r.domain.to_ascii_lowercase(), r))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Looks up WHOIS data for a domain. An unknown domain is a valid answer:
/// all dates absent, `alive = false`.
pub fn lookup_whois(domain: &str, store: &WhoisStore) -> WhoisRecord {
    store
        .records
        .get(&domain.to_ascii_lowercase())
        .cloned()
        .unwrap_or_else(|| WhoisRecord::unknown(domain))
}

/// The answer one provider gave for one subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlacklistVerdict {
    pub source: Source,
    /// The URL or domain that was checked (the matched subject on a hit).
    pub subject: String,
    pub flagged: bool,
    /// Provider-specific classification ("phishing", "malware", "ok", ...).
    /// Carried for reporting; the labeling rule uses only `flagged`.
    pub detail: String,
}

/// One line of a provider fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub subject: String,
    pub flagged: bool,
    #[serde(default)]
    pub detail: String,
}

/// Subjects are matched case-insensitively; URL subjects are matched exactly
/// after trimming one trailing slash.
fn normalize_subject(subject: &str) -> String {
    let lower = subject.to_ascii_lowercase();
    if lower.contains("://") {
        lower.trim_end_matches('/').to_string()
    } else {
        lower
    }
}

/// Fixture store for a single provider.
#[derive(Debug, Clone, Default)]
pub struct VerdictStore {
    entries: BTreeMap<String, (bool, String)>,
}

impl VerdictStore {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load_from(BufReader::new(file), path)
    }

    pub fn load_from(reader: impl Read, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut entries = BTreeMap::new();
        for line in BufReader::new(reader).lines() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: VerdictEntry = serde_json::from_str(&line)
                .map_err(|e| Error::io(origin, std::io::Error::other(e)))?;
            entries.insert(normalize_subject(&entry.subject), (entry.flagged, entry.detail));
        }
        Ok(VerdictStore { entries })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = VerdictEntry>) -> Self {
        VerdictStore {
            entries: entries
                .into_iter()
                .map(|e| (normalize_subject(&e.subject), (e.flagged, e.detail)))
                .collect(),
        }
    }

    fn hit(&self, subject: &str) -> Option<(bool, &str)> {
        self.entries
            .get(&normalize_subject(subject))
            .map(|(flagged, detail)| (*flagged, detail.as_str()))
    }
}

/// Per-provider fixture stores.
#[derive(Debug, Clone, Default)]
pub struct VerdictStores {
    providers: BTreeMap<Source, VerdictStore>,
}

impl VerdictStores {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: Source, store: VerdictStore) {
        self.providers.insert(source, store);
    }

    pub fn get(&self, source: Source) -> Option<&VerdictStore> {
        self.providers.get(&source)
    }

    /// Loads `verdicts_<source>.jsonl` for every requested provider from one
    /// directory. A missing file is an error naming the provider.
    pub fn load_dir(dir: impl AsRef<Path>, providers: &BTreeSet<Source>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut stores = VerdictStores::new();
        for &source in providers {
            let path = dir.join(format!("verdicts_{}.jsonl", source.name()));
            if !path.exists() {
                return Err(Error::MissingProvider(source));
            }
            stores.insert(source, VerdictStore::load(&path)?);
        }
        Ok(stores)
    }
}

/// Queries every requested provider for one link. Both the full long URL and
/// its registrable domain are checked; the verdict is flagged if either is
/// listed as flagged. Providers answer independently: one verdict each, in
/// source order.
pub fn query_blacklists(
    link: &ShortLink,
    providers: &BTreeSet<Source>,
    stores: &VerdictStores,
) -> Result<Vec<BlacklistVerdict>> {
    let mut verdicts = Vec::with_capacity(providers.len());
    for &source in providers {
        let store = stores.get(source).ok_or(Error::MissingProvider(source))?;
        let url_hit = store.hit(&link.long_url);
        let domain_hit = store.hit(&link.domain);
        let flagged_hit = [
            (url_hit, &link.long_url),
            (domain_hit, &link.domain),
        ]
        .into_iter()
        .find_map(|(hit, subject)| match hit {
            Some((true, detail)) => Some((subject.clone(), detail.to_string())),
            _ => None,
        });
        let verdict = match flagged_hit {
            Some((subject, detail)) => BlacklistVerdict {
                source,
                subject,
                flagged: true,
                detail,
            },
            None => BlacklistVerdict {
                source,
                subject: link.long_url.clone(),
                flagged: false,
                detail: "ok".to_string(),
            },
        };
        verdicts.push(verdict);
    }
    Ok(verdicts)
}

/// The labeling rule: malicious iff at least one verdict is flagged, no
/// matter which source (the warning page counts like any blacklist). The
/// empty disjunction is benign.
pub fn label_link(verdicts: &[BlacklistVerdict]) -> Label {
    if verdicts.iter().any(|v| v.flagged) {
        Label::Malicious
    } else {
        Label::Benign
    }
}

/// Outcome of labeling a whole dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelReport {
    pub malicious: usize,
    pub benign: usize,
    /// Links that already carried a label before this run.
    pub overwritten: usize,
}

impl fmt::Display for LabelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "labeled {} malicious, {} benign ({} labels overwritten)",
            self.malicious, self.benign, self.overwritten
        )
    }
}

/// Labels every link in the dataset via [`query_blacklists`] + [`label_link`].
/// Existing labels are overwritten and counted.
pub fn label_dataset(
    ds: &mut Dataset,
    providers: &BTreeSet<Source>,
    stores: &VerdictStores,
) -> Result<LabelReport> {
    let mut report = LabelReport::default();
    // Collect first: a provider error must not leave the dataset half-labeled.
    let mut labels = Vec::with_capacity(ds.links.len());
    for link in ds.links.values() {
        let verdicts = query_blacklists(link, providers, stores)?;
        labels.push(label_link(&verdicts));
    }
    for (link, label) in ds.links.values_mut().zip(labels) {
        if link.label.is_some() {
            report.overwritten += 1;
        }
        link.label = Some(label);
        match label {
            Label::Malicious => report.malicious += 1,
            Label::Benign => report.benign += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(source: Source, flagged: bool) -> BlacklistVerdict {
        BlacklistVerdict {
            source,
            subject: "http://x.example.com".into(),
            flagged,
            detail: String::new(),
        }
    }

    fn test_link(url: &str) -> ShortLink {
        ShortLink {
            global_hash: "h1".into(),
            long_url: url.into(),
            domain: crate::model::registrable_domain(url).unwrap(),
            created_at: 0,
            encoder_ids: vec![],
            warning_page_count: None,
            label: None,
        }
    }

    #[test]
    fn whois_lookup_hit_and_miss() {
        let store = WhoisStore::from_records([WhoisRecord {
            domain: "known.com".into(),
            created_at: Some(100),
            updated_at: Some(200),
            expires_at: Some(900),
            resolved_at: 500,
            alive: true,
        }]);
        let hit = lookup_whois("Known.COM", &store);
        assert_eq!(hit.created_at, Some(100));
        assert!(hit.alive);

        let miss = lookup_whois("unknown.com", &store);
        assert_eq!(miss.created_at, None);
        assert_eq!(miss.updated_at, None);
        assert_eq!(miss.expires_at, None);
        assert!(!miss.alive);
    }

    #[test]
    fn whois_unparsable_dates_become_absent() {
        let fixture = concat!(
            r#"{"domain":"a.com","created_at":"2013-10-01","resolved_at":500,"alive":true}"#,
            "\n",
            // created > updated violates the record invariant: both cleared.
            r#"{"domain":"b.com","created_at":400,"updated_at":300,"resolved_at":500,"alive":true}"#,
            "\n",
            // created > resolved: created cleared.
            r#"{"domain":"c.com","created_at":600,"resolved_at":500,"alive":false}"#,
        );
        let store = WhoisStore::load_from(fixture.as_bytes(), "<test>").unwrap();
        let a = lookup_whois("a.com", &store);
        assert_eq!(a.created_at, None);
        assert!(a.alive);
        let b = lookup_whois("b.com", &store);
        assert_eq!((b.created_at, b.updated_at), (None, None));
        assert!(b.alive);
        let c = lookup_whois("c.com", &store);
        assert_eq!(c.created_at, None);
    }

    #[test]
    fn domain_only_listing_flags_the_url() {
        let mut stores = VerdictStores::new();
        stores.insert(
            Source::Surbl,
            VerdictStore::from_entries([VerdictEntry {
                subject: "badsite.com".into(),
                flagged: true,
                detail: "listed".into(),
            }]),
        );
        let providers = BTreeSet::from([Source::Surbl]);
        let link = test_link("http://www.badsite.com/landing?x=1");
        let verdicts = query_blacklists(&link, &providers, &stores).unwrap();
        assert_eq!(verdicts.len(), 1);
        assert!(verdicts[0].flagged);
        assert_eq!(verdicts[0].subject, "badsite.com");
    }

    #[test]
    fn clean_url_yields_unflagged_verdicts_per_provider() {
        let mut stores = VerdictStores::new();
        for source in Source::ALL {
            stores.insert(source, VerdictStore::default());
        }
        let providers: BTreeSet<_> = Source::ALL.into_iter().collect();
        let link = test_link("http://clean.example.com/ok");
        let verdicts = query_blacklists(&link, &providers, &stores).unwrap();
        assert_eq!(verdicts.len(), 5);
        assert!(verdicts.iter().all(|v| !v.flagged));
        assert!(verdicts.iter().all(|v| v.detail == "ok"));
    }

    #[test]
    fn providers_answer_independently() {
        let mut stores = VerdictStores::new();
        let listed = VerdictStore::from_entries([VerdictEntry {
            subject: "http://x.evil.org/p".into(),
            flagged: true,
            detail: "phishing".into(),
        }]);
        stores.insert(Source::Phishtank, listed.clone());
        stores.insert(Source::Virustotal, listed);
        stores.insert(Source::Safebrowsing, VerdictStore::default());
        stores.insert(Source::Surbl, VerdictStore::default());
        let providers: BTreeSet<_> = [
            Source::Safebrowsing,
            Source::Surbl,
            Source::Phishtank,
            Source::Virustotal,
        ]
        .into();
        let link = test_link("http://x.evil.org/p/");
        let verdicts = query_blacklists(&link, &providers, &stores).unwrap();
        assert_eq!(verdicts.iter().filter(|v| v.flagged).count(), 2);
    }

    #[test]
    fn missing_provider_is_an_error_naming_it() {
        let stores = VerdictStores::new();
        let providers = BTreeSet::from([Source::Surbl]);
        let link = test_link("http://x.example.com/");
        let err = query_blacklists(&link, &providers, &stores).unwrap_err();
        assert!(matches!(err, Error::MissingProvider(Source::Surbl)));
        assert!(err.to_string().contains("surbl"));
    }

    #[test]
    fn warning_page_alone_labels_malicious() {
        let verdicts = vec![
            verdict(Source::Safebrowsing, false),
            verdict(Source::Surbl, false),
            verdict(Source::Phishtank, false),
            verdict(Source::Virustotal, false),
            verdict(Source::WarningPage, true),
        ];
        assert_eq!(label_link(&verdicts), Label::Malicious);
    }

    #[test]
    fn label_is_the_disjunction() {
        let all_false: Vec<_> = Source::ALL.into_iter().map(|s| verdict(s, false)).collect();
        assert_eq!(label_link(&all_false), Label::Benign);
        let all_true: Vec<_> = Source::ALL.into_iter().map(|s| verdict(s, true)).collect();
        assert_eq!(label_link(&all_true), Label::Malicious);
        assert_eq!(label_link(&[]), Label::Benign);
    }

    #[test]
    fn subjects_match_case_insensitively_and_without_trailing_slash() {
        let store = VerdictStore::from_entries([VerdictEntry {
            subject: "HTTP://EVIL.example.COM/Path/".into(),
            flagged: true,
            detail: "malware".into(),
        }]);
        assert!(store.hit("http://evil.example.com/path").unwrap().0);
        assert!(store.hit("http://evil.example.com/PATH/").unwrap().0);
        assert!(store.hit("http://evil.example.com/path/x").is_none());
    }
}
