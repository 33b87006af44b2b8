//! Abuse forensics over a loaded dataset: per-encoder suspicion factor,
//! cross-account community detection by pairwise Jaccard similarity, domain
//! liveness, and warning-page persistence.
//!
//! All operations are pure over the immutable dataset and emit canonically
//! ordered output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enrich::{lookup_whois, WhoisStore};
use crate::model::{Dataset, EncoderProfile};
use crate::{Error, Result};

/// How suspicious one encoder's collected history is: the ratio of
/// warning-flagged links to total links collected for the account.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspicionReport {
    pub encoder_id: String,
    pub sus_fac: f64,
    pub link_total: usize,
    pub flagged_total: usize,
    /// Every collected link was flagged.
    pub highly_suspicious: bool,
}

/// Suspicion factor of one encoder. An empty history is an error: the ratio
/// is undefined.
pub fn suspicion_factor(encoder: &EncoderProfile) -> Result<SuspicionReport> {
    let link_total = encoder.link_history.len();
    if link_total == 0 {
        return Err(Error::EmptyLinkHistory {
            encoder_id: encoder.encoder_id.clone(),
        });
    }
    let flagged_total = encoder
        .link_history
        .iter()
        .filter(|h| h.warning_flagged)
        .count();
    let sus_fac = flagged_total as f64 / link_total as f64;
    Ok(SuspicionReport {
        encoder_id: encoder.encoder_id.clone(),
        sus_fac,
        link_total,
        flagged_total,
        highly_suspicious: flagged_total == link_total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusFacPoint {
    pub threshold: f64,
    /// Encoders with sus_fac <= threshold.
    pub encoders_at_or_below: usize,
}

/// Cumulative distribution of encoders by suspicion factor over a fixed
/// 0.00..=1.00 grid in steps of 0.01.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusFacDistribution {
    pub points: Vec<SusFacPoint>,
    pub evaluated_encoders: usize,
    /// Encoders skipped because their history is empty.
    pub skipped_empty: usize,
}

pub fn susfac_distribution(ds: &Dataset) -> SusFacDistribution {
    let mut factors = Vec::new();
    let mut skipped_empty = 0usize;
    for encoder in ds.encoders.values() {
        match suspicion_factor(encoder) {
            Ok(report) => factors.push(report.sus_fac),
            Err(_) => skipped_empty += 1,
        }
    }
    let points = (0..=100)
        .map(|i| {
            let threshold = i as f64 / 100.0;
            SusFacPoint {
                threshold,
                encoders_at_or_below: factors.iter().filter(|&&f| f <= threshold).count(),
            }
        })
        .collect();
    SusFacDistribution {
        points,
        evaluated_encoders: factors.len(),
        skipped_empty,
    }
}

/// Jaccard similarity |a ∩ b| / |a ∪ b|; two empty sets score 0.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Which item set represents an account in community comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunityItems {
    Domain,
    Url,
}

impl FromStr for CommunityItems {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "domain" => Ok(CommunityItems::Domain),
            "url" => Ok(CommunityItems::Url),
            other => Err(Error::InvalidParam(format!(
                "unknown community item kind {other:?} (expected domain or url)"
            ))),
        }
    }
}

/// Item set per encoder: the registrable domains (or long URLs) of the links
/// the encoder shortened. Encoders with no links map to empty sets.
pub fn account_item_sets(ds: &Dataset, items: CommunityItems) -> BTreeMap<String, BTreeSet<String>> {
    let mut sets: BTreeMap<String, BTreeSet<String>> = ds
        .encoders
        .keys()
        .map(|id| (id.clone(), BTreeSet::new()))
        .collect();
    for link in ds.links.values() {
        for encoder_id in &link.encoder_ids {
            let item = match items {
                CommunityItems::Domain => link.domain.clone(),
                CommunityItems::Url => link.long_url.clone(),
            };
            sets.entry(encoder_id.clone()).or_default().insert(item);
        }
    }
    sets
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub a: String,
    pub b: String,
    pub score: f64,
}

/// Groups of accounts whose pairwise similarity clears the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    /// Connected components of the similarity graph, size >= min_size.
    /// Members sorted; groups sorted by first member.
    pub groups: Vec<Vec<String>>,
    /// All pairwise scores (not only edges), in lexicographic pair order.
    pub pairwise_scores: Vec<PairScore>,
    /// Population variance over all pairwise scores.
    pub score_variance: f64,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Detects cross-account communities: every account pair is scored by
/// Jaccard similarity of its item sets, pairs at or above the threshold
/// become edges, and connected components of at least `min_size` are
/// reported as groups.
pub fn detect_communities(
    accounts: &BTreeMap<String, BTreeSet<String>>,
    threshold: f64,
    min_size: usize,
) -> Result<CommunityReport> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "threshold must be in (0, 1], got {threshold}"
        )));
    }
    if min_size < 2 {
        return Err(Error::InvalidParam(format!(
            "min_size must be >= 2, got {min_size}"
        )));
    }
    let ids: Vec<&String> = accounts.keys().collect();
    let sets: Vec<&BTreeSet<String>> = accounts.values().collect();
    let mut pairwise_scores = Vec::with_capacity(ids.len().saturating_sub(1) * ids.len() / 2);
    let mut uf = UnionFind::new(ids.len());
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            let score = jaccard(sets[i], sets[j]);
            if score >= threshold {
                uf.union(i, j);
            }
            pairwise_scores.push(PairScore {
                a: ids[i].clone(),
                b: ids[j].clone(),
                score,
            });
        }
    }
    let mut components: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        components.entry(uf.find(i)).or_default().push((*id).clone());
    }
    let mut groups: Vec<Vec<String>> = components
        .into_values()
        .filter(|members| members.len() >= min_size)
        .collect();
    for group in &mut groups {
        group.sort();
    }
    groups.sort();

    let score_variance = population_variance(pairwise_scores.iter().map(|p| p.score));
    Ok(CommunityReport {
        groups,
        pairwise_scores,
        score_variance,
    })
}

fn population_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n == 0 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    values.map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainStatus {
    pub domain: String,
    pub alive: bool,
    pub link_count: usize,
    /// Sum of warning_page_count over the domain's links (absent counts as 0).
    pub warning_total: u64,
}

/// Liveness of every domain appearing in the dataset, with the cumulative
/// warning-page pressure concentrated on the dead ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LivenessReport {
    pub domains: Vec<DomainStatus>,
    pub dead_fraction: f64,
    pub dead_domain_warning_total: u64,
}

pub fn domain_liveness(ds: &Dataset, whois: &WhoisStore) -> LivenessReport {
    let mut by_domain: BTreeMap<&str, (usize, u64)> = BTreeMap::new();
    for link in ds.links.values() {
        let entry = by_domain.entry(&link.domain).or_default();
        entry.0 += 1;
        entry.1 += link.warning_page_count.unwrap_or(0);
    }
    let domains: Vec<DomainStatus> = by_domain
        .into_iter()
        .map(|(domain, (link_count, warning_total))| DomainStatus {
            domain: domain.to_string(),
            alive: lookup_whois(domain, whois).alive,
            link_count,
            warning_total,
        })
        .collect();
    let dead = domains.iter().filter(|d| !d.alive).count();
    let dead_fraction = if domains.is_empty() {
        0.0
    } else {
        dead as f64 / domains.len() as f64
    };
    let dead_domain_warning_total = domains
        .iter()
        .filter(|d| !d.alive)
        .map(|d| d.warning_total)
        .sum();
    LivenessReport {
        domains,
        dead_fraction,
        dead_domain_warning_total,
    }
}

/// Do the most-flagged links keep drawing clicks after the cutoff?
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub requested: usize,
    /// Links actually examined (all of them when fewer than requested).
    pub selected: usize,
    pub clicked_after_cutoff: usize,
    pub fraction: f64,
    pub cutoff: i64,
    pub shortfall: bool,
}

/// Takes the `top_n` links by warning-page count (ties broken by global
/// hash) and reports how many still received a click at or after `cutoff`.
pub fn persistence(ds: &Dataset, top_n: usize, cutoff: i64) -> Result<PersistenceReport> {
    if top_n < 1 {
        return Err(Error::InvalidParam("top_n must be >= 1".into()));
    }
    let mut ranked: Vec<(&String, u64)> = ds
        .links
        .iter()
        .map(|(hash, link)| (hash, link.warning_page_count.unwrap_or(0)))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let selected = ranked.len().min(top_n);
    let clicked_after_cutoff = ranked[..selected]
        .iter()
        .filter(|(hash, _)| {
            ds.clicks_for(hash)
                .iter()
                .any(|click| click.clicked_at >= cutoff)
        })
        .count();
    let fraction = if selected == 0 {
        0.0
    } else {
        clicked_after_cutoff as f64 / selected as f64
    };
    Ok(PersistenceReport {
        requested: top_n,
        selected,
        clicked_after_cutoff,
        fraction,
        cutoff,
        shortfall: selected < top_n,
    })
}

/// Distribution CSV with header `threshold,encoders_at_or_below`, one row
/// per grid point, suitable for plotting the cumulative curve.
pub fn render_distribution_csv(dist: &SusFacDistribution) -> String {
    let mut out = String::from("threshold,encoders_at_or_below\n");
    for p in &dist.points {
        let _ = writeln!(out, "{:.2},{}", p.threshold, p.encoders_at_or_below);
    }
    out
}
