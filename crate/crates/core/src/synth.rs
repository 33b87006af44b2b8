//! Seeded synthetic-dataset generator.
//!
//! Produces a ground-truth-labeled population of spammer and benign links —
//! plus the WHOIS and verdict fixtures that reproduce those labels through
//! the real labeling path — so the whole pipeline can run at desk scale.
//! Class-conditional distributions are simple piecewise-uniform shapes (the
//! generator's job is pipeline exercise, not fidelity); `easy` separation
//! keeps the classes cleanly apart, `hard` overlaps every feature. Every
//! distribution bound lands in the generation manifest, and the whole output
//! is a pure function of the parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enrich::{Source, VerdictEntry, WhoisRecord};
use crate::model::{
    ClickEvent, ConnectedAccount, Dataset, EncoderKind, EncoderProfile, HistoryEntry, Label,
    ShortLink,
};
use crate::{Error, Result};

/// The fixed "WHOIS fetch" instant all synthetic records resolve against.
pub const RESOLVED_AT: i64 = 1_400_000_000;

const SECS_PER_DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Easy,
    Hard,
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separation::Easy => "easy",
            Separation::Hard => "hard",
        })
    }
}

impl FromStr for Separation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "easy" => Ok(Separation::Easy),
            "hard" => Ok(Separation::Hard),
            other => Err(Error::InvalidParam(format!(
                "unknown separation {other:?} (expected easy or hard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_links: usize,
    pub malicious_fraction: f64,
    pub zero_click_fraction_malicious: f64,
    pub zero_click_fraction_benign: f64,
    pub seed: u64,
    pub separation: Separation,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_links: 2000,
            malicious_fraction: 0.5,
            zero_click_fraction_malicious: 0.4616,
            zero_click_fraction_benign: 0.10,
            seed: crate::DEFAULT_SEED,
            separation: Separation::Easy,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        if self.n_links < 2 {
            return Err(Error::InvalidParam("n_links must be >= 2".into()));
        }
        if !(self.malicious_fraction > 0.0 && self.malicious_fraction < 1.0) {
            return Err(Error::InvalidParam(
                "malicious_fraction must be in (0, 1)".into(),
            ));
        }
        for (name, f) in [
            ("zero_click_fraction_malicious", self.zero_click_fraction_malicious),
            ("zero_click_fraction_benign", self.zero_click_fraction_benign),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParam(format!("{name} must be in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Everything needed to audit a generated dataset: the exact parameters,
/// derived counts, and the bounds of every class-conditional distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub format_version: u32,
    pub params: SynthParams,
    pub resolved_at: i64,
    pub n_malicious: usize,
    pub n_benign: usize,
    pub zero_click_malicious: usize,
    pub zero_click_benign: usize,
    pub distributions: BTreeMap<String, String>,
}

pub struct SynthOutput {
    pub dataset: Dataset,
    pub whois: Vec<WhoisRecord>,
    pub verdicts: BTreeMap<Source, Vec<VerdictEntry>>,
    pub manifest: SynthManifest,
}

/// Per-class distribution bounds for one separation level.
struct ClassShape {
    age_days: (f64, f64),
    gap_days: (f64, f64),
    hours: (i64, i64),
    extra_encoder_prob: f64,
    max_extra_encoders: usize,
    kind_weights: [(EncoderKind, f64); 3],
    click_count: (u64, u64),
    first_lag_secs: (i64, i64),
    direct_prob: (f64, f64),
    alive_prob: f64,
}

fn shapes(separation: Separation) -> (ClassShape, ClassShape) {
    match separation {
        Separation::Easy => (
            // malicious
            ClassShape {
                age_days: (1.0, 90.0),
                gap_days: (0.0, 5.0),
                hours: (0, 5),
                extra_encoder_prob: 0.3,
                max_extra_encoders: 2,
                kind_weights: [
                    (EncoderKind::Anonymous, 0.5),
                    (EncoderKind::ThirdPartyApp, 0.3),
                    (EncoderKind::Regular, 0.2),
                ],
                click_count: (1, 15),
                first_lag_secs: (SECS_PER_DAY, 30 * SECS_PER_DAY),
                direct_prob: (0.6, 1.0),
                alive_prob: 0.17,
            },
            // benign
            ClassShape {
                age_days: (200.0, 3000.0),
                gap_days: (30.0, 800.0),
                hours: (8, 20),
                extra_encoder_prob: 0.05,
                max_extra_encoders: 1,
                kind_weights: [
                    (EncoderKind::Regular, 0.9),
                    (EncoderKind::Anonymous, 0.05),
                    (EncoderKind::ThirdPartyApp, 0.05),
                ],
                click_count: (1, 30),
                first_lag_secs: (30, SECS_PER_DAY),
                direct_prob: (0.0, 0.35),
                alive_prob: 0.97,
            },
        ),
        Separation::Hard => (
            ClassShape {
                age_days: (1.0, 400.0),
                gap_days: (0.0, 60.0),
                hours: (0, 23),
                extra_encoder_prob: 0.15,
                max_extra_encoders: 2,
                kind_weights: [
                    (EncoderKind::Regular, 0.5),
                    (EncoderKind::Anonymous, 0.3),
                    (EncoderKind::ThirdPartyApp, 0.2),
                ],
                click_count: (1, 15),
                first_lag_secs: (3_600, 5 * SECS_PER_DAY),
                direct_prob: (0.2, 0.8),
                alive_prob: 0.5,
            },
            ClassShape {
                age_days: (30.0, 2000.0),
                gap_days: (5.0, 400.0),
                hours: (0, 23),
                extra_encoder_prob: 0.1,
                max_extra_encoders: 1,
                kind_weights: [
                    (EncoderKind::Regular, 0.7),
                    (EncoderKind::Anonymous, 0.2),
                    (EncoderKind::ThirdPartyApp, 0.1),
                ],
                click_count: (1, 30),
                first_lag_secs: (600, 2 * SECS_PER_DAY),
                direct_prob: (0.1, 0.6),
                alive_prob: 0.8,
            },
        ),
    }
}

fn describe(shape: &ClassShape, class: &str, out: &mut BTreeMap<String, String>) {
    let mut put = |key: &str, value: String| {
        out.insert(format!("{class}.{key}"), value);
    };
    put("domain_age_days", format!("uniform({}, {})", shape.age_days.0, shape.age_days.1));
    put("creation_gap_days", format!("uniform({}, {}) clamped to 0.8*age", shape.gap_days.0, shape.gap_days.1));
    put("creation_hour", format!("uniform_int({}, {})", shape.hours.0, shape.hours.1));
    put(
        "extra_encoders",
        format!(
            "p={} then uniform_int(1, {})",
            shape.extra_encoder_prob, shape.max_extra_encoders
        ),
    );
    put(
        "encoder_kind",
        shape
            .kind_weights
            .iter()
            .map(|(k, w)| format!("{k:?}={w}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    put("click_count", format!("uniform_int({}, {})", shape.click_count.0, shape.click_count.1));
    put(
        "first_click_lag_secs",
        format!("uniform_int({}, {})", shape.first_lag_secs.0, shape.first_lag_secs.1),
    );
    put("direct_click_prob", format!("uniform({}, {})", shape.direct_prob.0, shape.direct_prob.1));
    put("domain_alive_prob", shape.alive_prob.to_string());
}

fn pick_kind(rng: &mut ChaCha8Rng, weights: &[(EncoderKind, f64); 3]) -> EncoderKind {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for (kind, w) in weights {
        acc += w;
        if x < acc {
            return *kind;
        }
    }
    weights[2].0
}

const MAL_TLDS: [&str; 5] = ["biz", "info", "ru", "in", "cn"];
const BEN_TLDS: [&str; 5] = ["com", "org", "net", "co.uk", "de"];
const REFERRERS: [&str; 5] = [
    "twitter.com",
    "t.co",
    "facebook.com",
    "plus.url.google.com",
    "news.ycombinator.com",
];

struct DomainInfo {
    name: String,
    whois: WhoisRecord,
}

fn make_domains(
    rng: &mut ChaCha8Rng,
    count: usize,
    prefix: &str,
    tlds: &[&str],
    shape: &ClassShape,
) -> Vec<DomainInfo> {
    (0..count)
        .map(|i| {
            let name = format!("{prefix}{i:04}.{}", tlds[i % tlds.len()]);
            let age_days = rng.random_range(shape.age_days.0..=shape.age_days.1);
            let created_at = RESOLVED_AT - (age_days * SECS_PER_DAY as f64) as i64;
            // A third of domains carry an update shortly after creation.
            let updated_at = if rng.random_bool(1.0 / 3.0) {
                let bump = rng.random_range(0.0..=(age_days / 2.0).max(0.01));
                Some(created_at + (bump * SECS_PER_DAY as f64) as i64)
            } else {
                None
            };
            let registration_days = rng.random_range(180.0..=3650.0);
            let whois = WhoisRecord {
                domain: name.clone(),
                created_at: Some(created_at),
                updated_at,
                expires_at: Some(created_at + (registration_days * SECS_PER_DAY as f64) as i64),
                resolved_at: RESOLVED_AT,
                alive: rng.random_bool(shape.alive_prob),
            };
            DomainInfo { name, whois }
        })
        .collect()
}

fn make_encoders(
    rng: &mut ChaCha8Rng,
    count: usize,
    prefix: &str,
    shape: &ClassShape,
) -> Vec<EncoderProfile> {
    (0..count)
        .map(|i| {
            let encoder_id = format!("{prefix}{i:04}");
            let kind = pick_kind(rng, &shape.kind_weights);
            let connected: usize = rng.random_range(0..=3);
            EncoderProfile {
                encoder_id: encoder_id.clone(),
                kind,
                account_created_at: Some(
                    RESOLVED_AT - rng.random_range(30..=2000) * SECS_PER_DAY,
                ),
                connected_networks: (0..connected)
                    .map(|j| ConnectedAccount {
                        network: "twitter".into(),
                        account_id: format!("tw_{encoder_id}_{j}"),
                    })
                    .collect(),
                link_history: Vec::new(),
            }
        })
        .collect()
}

/// Generates the dataset, fixtures, and manifest for the given parameters.
/// Byte-identical for identical parameters.
pub fn generate(params: &SynthParams) -> Result<SynthOutput> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (mal_shape, ben_shape) = shapes(params.separation);

    let n_mal = ((params.n_links as f64 * params.malicious_fraction).round() as usize)
        .clamp(1, params.n_links - 1);
    let n_ben = params.n_links - n_mal;

    let mal_domains = make_domains(&mut rng, (n_mal / 4).max(1), "mdom", &MAL_TLDS, &mal_shape);
    let ben_domains = make_domains(&mut rng, (n_ben / 4).max(1), "site", &BEN_TLDS, &ben_shape);
    let mut mal_encoders = make_encoders(&mut rng, (n_mal / 5).max(1), "enc_m", &mal_shape);
    let mut ben_encoders = make_encoders(&mut rng, (n_ben / 5).max(1), "enc_b", &ben_shape);

    let mut dataset = Dataset::default();
    let mut verdicts: BTreeMap<Source, Vec<VerdictEntry>> =
        Source::ALL.iter().map(|&s| (s, Vec::new())).collect();

    // Zero-click membership per class: exact rounded counts, chosen by a
    // seeded shuffle of the class's link indices.
    let pick_zero = |rng: &mut ChaCha8Rng, n: usize, fraction: f64| -> Vec<bool> {
        let target = (n as f64 * fraction).round() as usize;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut zero = vec![false; n];
        for &i in order.iter().take(target.min(n)) {
            zero[i] = true;
        }
        zero
    };
    let mal_zero = pick_zero(&mut rng, n_mal, params.zero_click_fraction_malicious);
    let ben_zero = pick_zero(&mut rng, n_ben, params.zero_click_fraction_benign);

    let blacklists = [
        Source::Safebrowsing,
        Source::Surbl,
        Source::Phishtank,
        Source::Virustotal,
    ];

    for class_idx in 0..2 {
        let malicious = class_idx == 0;
        let (n_class, shape, domains, encoders, zero, hash_prefix) = if malicious {
            (n_mal, &mal_shape, &mal_domains, &mut mal_encoders, &mal_zero, "mal")
        } else {
            (n_ben, &ben_shape, &ben_domains, &mut ben_encoders, &ben_zero, "ben")
        };

        for i in 0..n_class {
            let global_hash = format!("{hash_prefix}{i:06}");
            let domain = &domains[i % domains.len()];
            let long_url = format!("http://{}/p{}", domain.name, i);

            // Link creation sits after the domain's creation (and update).
            let whois_created = domain.whois.created_at.expect("generated");
            let anchor = domain.whois.updated_at.unwrap_or(whois_created).max(whois_created);
            let age_left = (RESOLVED_AT - anchor) as f64 / SECS_PER_DAY as f64;
            let gap_cap = (age_left * 0.8).max(0.01);
            let gap_days = rng
                .random_range(shape.gap_days.0..=shape.gap_days.1)
                .min(gap_cap);
            let day_start =
                (anchor + (gap_days * SECS_PER_DAY as f64) as i64) / SECS_PER_DAY * SECS_PER_DAY;
            let hour = rng.random_range(shape.hours.0..=shape.hours.1);
            let created_at = day_start + hour * 3_600 + rng.random_range(0..3_600);

            // Primary encoder cycles the pool so every profile gets links;
            // extras are drawn at random.
            let mut encoder_ids = vec![encoders[i % encoders.len()].encoder_id.clone()];
            if rng.random_bool(shape.extra_encoder_prob) {
                let extra = rng.random_range(1..=shape.max_extra_encoders);
                for _ in 0..extra {
                    let pick = rng.random_range(0..encoders.len());
                    let id = encoders[pick].encoder_id.clone();
                    if !encoder_ids.contains(&id) {
                        encoder_ids.push(id);
                    }
                }
            }

            let warning_page_count = if malicious {
                Some(rng.random_range(1..=500))
            } else if rng.random_bool(0.9) {
                Some(0)
            } else {
                None
            };

            // Clicks.
            if !zero[i] {
                let count = rng.random_range(shape.click_count.0..=shape.click_count.1);
                let direct_prob = rng.random_range(shape.direct_prob.0..=shape.direct_prob.1);
                let mut clicked_at =
                    created_at + rng.random_range(shape.first_lag_secs.0..=shape.first_lag_secs.1);
                let mut events = Vec::with_capacity(count as usize);
                for _ in 0..count {
                    let referrer_domain = if rng.random_bool(direct_prob) {
                        String::new()
                    } else {
                        REFERRERS[rng.random_range(0..REFERRERS.len())].to_string()
                    };
                    events.push(ClickEvent {
                        global_hash: global_hash.clone(),
                        clicked_at,
                        referrer_domain,
                    });
                    clicked_at += rng.random_range(60..=12 * 3_600);
                }
                events.sort_by(|a, b| {
                    a.clicked_at
                        .cmp(&b.clicked_at)
                        .then_with(|| a.referrer_domain.cmp(&b.referrer_domain))
                });
                dataset.clicks.insert(global_hash.clone(), events);
            }

            // Verdict fixture entries: every malicious link is listed by at
            // least one source; benign links are never listed (a handful get
            // explicit clean entries).
            if malicious {
                let warning_only = rng.random_bool(0.15);
                if warning_only {
                    verdicts.get_mut(&Source::WarningPage).expect("seeded").push(VerdictEntry {
                        subject: long_url.clone(),
                        flagged: true,
                        detail: "warning page displayed".into(),
                    });
                } else {
                    let listings = if rng.random_bool(0.3) { 2 } else { 1 };
                    let picked =
                        rand::seq::index::sample(&mut rng, blacklists.len(), listings).into_vec();
                    let mut picked = picked;
                    picked.sort_unstable();
                    for p in picked {
                        let source = blacklists[p];
                        let by_domain = rng.random_bool(0.4);
                        let subject = if by_domain {
                            domain.name.clone()
                        } else {
                            long_url.clone()
                        };
                        let detail = match source {
                            Source::Safebrowsing => "phishing",
                            Source::Surbl => "listed",
                            Source::Phishtank => "phishing",
                            Source::Virustotal => "malicious",
                            Source::WarningPage => unreachable!(),
                        };
                        verdicts.get_mut(&source).expect("seeded").push(VerdictEntry {
                            subject,
                            flagged: true,
                            detail: detail.into(),
                        });
                    }
                    if rng.random_bool(0.5) {
                        verdicts.get_mut(&Source::WarningPage).expect("seeded").push(
                            VerdictEntry {
                                subject: long_url.clone(),
                                flagged: true,
                                detail: "warning page displayed".into(),
                            },
                        );
                    }
                }
            } else if rng.random_bool(0.05) {
                verdicts.get_mut(&Source::Virustotal).expect("seeded").push(VerdictEntry {
                    subject: long_url.clone(),
                    flagged: false,
                    detail: "ok".into(),
                });
            }

            for id in &encoder_ids {
                let encoder = encoders.iter_mut().find(|e| e.encoder_id == *id).expect("pool");
                encoder.link_history.push(HistoryEntry {
                    global_hash: global_hash.clone(),
                    warning_flagged: malicious,
                });
            }

            dataset.links.insert(
                global_hash.clone(),
                ShortLink {
                    global_hash,
                    long_url,
                    domain: domain.name.clone(),
                    created_at,
                    encoder_ids,
                    warning_page_count,
                    label: Some(if malicious { Label::Malicious } else { Label::Benign }),
                },
            );
        }
    }

    for encoder in mal_encoders.into_iter().chain(ben_encoders) {
        dataset.encoders.insert(encoder.encoder_id.clone(), encoder);
    }

    let whois: Vec<WhoisRecord> = mal_domains
        .iter()
        .chain(&ben_domains)
        .map(|d| d.whois.clone())
        .collect();

    let mut distributions = BTreeMap::new();
    describe(&mal_shape, "malicious", &mut distributions);
    describe(&ben_shape, "benign", &mut distributions);

    let manifest = SynthManifest {
        format_version: 1,
        params: params.clone(),
        resolved_at: RESOLVED_AT,
        n_malicious: n_mal,
        n_benign: n_ben,
        zero_click_malicious: mal_zero.iter().filter(|&&z| z).count(),
        zero_click_benign: ben_zero.iter().filter(|&&z| z).count(),
        distributions,
    };

    Ok(SynthOutput {
        dataset,
        whois,
        verdicts,
        manifest,
    })
}

/// Writes `dataset.jsonl`, `whois.jsonl`, one `verdicts_<source>.jsonl` per
/// source, and `synth_manifest.json` into `dir`. Returns the paths written.
pub fn write_output(output: &SynthOutput, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let dataset_path = dir.join("dataset.jsonl");
    crate::model::write_dataset_file(&output.dataset, &dataset_path)?;
    written.push(dataset_path);

    let whois_path = dir.join("whois.jsonl");
    let mut whois_file = fs::File::create(&whois_path).map_err(|e| Error::io(&whois_path, e))?;
    for record in &output.whois {
        serde_json::to_writer(&mut whois_file, record)
            .map_err(|e| Error::io(&whois_path, e.into()))?;
        whois_file.write_all(b"\n").map_err(|e| Error::io(&whois_path, e))?;
    }
    written.push(whois_path);

    for (source, entries) in &output.verdicts {
        let path = dir.join(format!("verdicts_{}.jsonl", source.name()));
        let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        for entry in entries {
            serde_json::to_writer(&mut file, entry).map_err(|e| Error::io(&path, e.into()))?;
            file.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
        }
        written.push(path);
    }

    let manifest_path = dir.join("synth_manifest.json");
    let manifest_json = serde_json::to_string_pretty(&output.manifest)
        .map_err(|e| Error::io(&manifest_path, e.into()))?;
    fs::write(&manifest_path, manifest_json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    written.push(manifest_path);

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_dataset_from, write_dataset};

    #[test]
    fn exact_class_counts() {
        let output = generate(&SynthParams {
            n_links: 2000,
            seed: 7,
            ..SynthParams::default()
        })
        .unwrap();
        let mal = output
            .dataset
            .links
            .values()
            .filter(|l| l.label == Some(Label::Malicious))
            .count();
        assert_eq!(mal, 1000);
        assert_eq!(output.dataset.links.len(), 2000);
        assert_eq!(output.manifest.n_malicious, 1000);
    }

    #[test]
    fn zero_click_counts_match_the_rounded_fraction() {
        let params = SynthParams {
            n_links: 400,
            zero_click_fraction_malicious: 0.46,
            zero_click_fraction_benign: 0.25,
            ..SynthParams::default()
        };
        let output = generate(&params).unwrap();
        let zero_clicked = |label: Label| {
            output
                .dataset
                .links
                .values()
                .filter(|l| l.label == Some(label))
                .filter(|l| output.dataset.clicks_for(&l.global_hash).is_empty())
                .count()
        };
        assert_eq!(zero_clicked(Label::Malicious), 92); // round(200 * 0.46)
        assert_eq!(zero_clicked(Label::Benign), 50); // round(200 * 0.25)
        assert_eq!(output.manifest.zero_click_malicious, 92);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = SynthParams {
            n_links: 120,
            ..SynthParams::default()
        };
        let a = generate(&params).unwrap();
        let b = generate(&params).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.whois, b.whois);
        assert_eq!(a.verdicts, b.verdicts);
        assert_eq!(a.manifest, b.manifest);

        let mut bytes_a = Vec::new();
        write_dataset(&a.dataset, &mut bytes_a).unwrap();
        let mut bytes_b = Vec::new();
        write_dataset(&b.dataset, &mut bytes_b).unwrap();
        assert_eq!(bytes_a, bytes_b);

        let c = generate(&SynthParams { seed: 43, ..params }).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn round_trips_through_the_loader_with_zero_drops() {
        let output = generate(&SynthParams {
            n_links: 300,
            ..SynthParams::default()
        })
        .unwrap();
        let mut bytes = Vec::new();
        write_dataset(&output.dataset, &mut bytes).unwrap();
        let (loaded, report) = load_dataset_from(bytes.as_slice(), "<synth>").unwrap();
        assert_eq!(report.dropped(), 0);
        assert_eq!(report.malformed_lines, 0);
        assert_eq!(loaded, output.dataset);
    }

    #[test]
    fn easy_mode_is_separable_by_a_shallow_tree() {
        use crate::enrich::WhoisStore;
        use crate::eval::cross_validate;
        use crate::features::{extract, ExtractionMode, FeatureMatrix};
        use crate::learn::{train_decision_tree, TrainParams};

        let output = generate(&SynthParams {
            n_links: 600,
            ..SynthParams::default()
        })
        .unwrap();
        let whois = WhoisStore::from_records(output.whois.clone());
        let matrix = extract(&output.dataset, &whois, ExtractionMode::Full).unwrap();
        let params = TrainParams {
            max_depth: Some(4),
            ..TrainParams::default()
        };
        let report = cross_validate(
            |m: &FeatureMatrix| train_decision_tree(m, &params),
            &matrix,
            10,
            crate::DEFAULT_SEED,
        )
        .unwrap();
        assert!(
            report.accuracy >= 0.95,
            "easy-mode depth-4 tree CV accuracy {:.4}",
            report.accuracy
        );
    }

    #[test]
    fn hard_mode_overlaps_the_class_distributions() {
        use crate::enrich::WhoisStore;
        use crate::features::{extract, ExtractionMode};

        let output = generate(&SynthParams {
            n_links: 600,
            separation: Separation::Hard,
            ..SynthParams::default()
        })
        .unwrap();
        let whois = WhoisStore::from_records(output.whois.clone());
        let matrix = extract(&output.dataset, &whois, ExtractionMode::Full).unwrap();
        // Empirical per-class ranges of the age, gap, and direct-fraction
        // features must intersect.
        for feature in [0usize, 1, 6] {
            let range = |label: Label| {
                let values: Vec<f64> = matrix
                    .rows
                    .iter()
                    .filter(|r| r.label == Some(label))
                    .filter_map(|r| r.values[feature])
                    .collect();
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            };
            let (mal_lo, mal_hi) = range(Label::Malicious);
            let (ben_lo, ben_hi) = range(Label::Benign);
            assert!(
                mal_hi > ben_lo && ben_hi > mal_lo,
                "feature {feature}: malicious [{mal_lo}, {mal_hi}] vs benign [{ben_lo}, {ben_hi}] do not overlap"
            );
        }
    }

    #[test]
    fn every_link_has_resolvable_encoders_and_whois() {
        let output = generate(&SynthParams {
            n_links: 150,
            ..SynthParams::default()
        })
        .unwrap();
        let whois_domains: std::collections::BTreeSet<&str> =
            output.whois.iter().map(|w| w.domain.as_str()).collect();
        for link in output.dataset.links.values() {
            assert!(!link.encoder_ids.is_empty());
            for id in &link.encoder_ids {
                assert!(output.dataset.encoders.contains_key(id));
            }
            assert!(whois_domains.contains(link.domain.as_str()));
        }
        // Every encoder profile collected at least one link.
        for encoder in output.dataset.encoders.values() {
            assert!(!encoder.link_history.is_empty());
        }
    }
}
