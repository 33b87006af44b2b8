//! End-to-end pipeline over real files: generate, ingest, label, extract,
//! train, evaluate, and run forensics, asserting consistency at every stage.

use std::collections::BTreeSet;

use shortwatch::enrich::{label_dataset, Source, VerdictStores, WhoisStore};
use shortwatch::eval::{evaluate, render_report_text, split_holdout};
use shortwatch::features::{extract, ExtractionMode, FeatureMatrix};
use shortwatch::forensics::{
    account_item_sets, detect_communities, domain_liveness, persistence, susfac_distribution,
    CommunityItems,
};
use shortwatch::learn::{
    load_model, predict, save_model, train_decision_tree, train_naive_bayes, train_random_forest,
    TrainParams,
};
use shortwatch::model::{load_dataset, Label};
use shortwatch::synth::{generate, write_output, SynthParams, RESOLVED_AT};

#[test]
fn full_pipeline_on_synthetic_files() {
    let dir = tempfile::tempdir().unwrap();
    let params = SynthParams {
        n_links: 600,
        seed: 11,
        ..SynthParams::default()
    };
    let output = generate(&params).unwrap();
    write_output(&output, dir.path()).unwrap();

    // Ingest the files back; nothing may drop.
    let (mut ds, report) = load_dataset(dir.path().join("dataset.jsonl")).unwrap();
    assert_eq!(report.dropped(), 0, "unexpected drops:\n{report}");
    assert_eq!(report.malformed_lines, 0);
    assert_eq!(ds, output.dataset);

    // Relabel from the verdict fixtures; the labeling path must reproduce
    // the generator's ground truth exactly.
    let truth: Vec<(String, Label)> = ds
        .links
        .values()
        .map(|l| (l.global_hash.clone(), l.label.unwrap()))
        .collect();
    for link in ds.links.values_mut() {
        link.label = None;
    }
    let providers: BTreeSet<Source> = Source::ALL.into_iter().collect();
    let stores = VerdictStores::load_dir(dir.path(), &providers).unwrap();
    let label_report = label_dataset(&mut ds, &providers, &stores).unwrap();
    assert_eq!(label_report.malicious + label_report.benign, ds.links.len());
    assert_eq!(label_report.overwritten, 0);
    for (hash, expected) in &truth {
        assert_eq!(ds.links[hash].label.unwrap(), *expected, "label of {hash}");
    }

    // Relabeling again counts every link as overwritten and changes nothing.
    let again = label_dataset(&mut ds, &providers, &stores).unwrap();
    assert_eq!(again.overwritten, ds.links.len());
    assert_eq!(again.malicious, label_report.malicious);

    // Features, full and non-click, through the CSV representation.
    let whois = WhoisStore::load(dir.path().join("whois.jsonl")).unwrap();
    let full = extract(&ds, &whois, ExtractionMode::Full).unwrap();
    assert_eq!(full.len(), ds.links.len());
    let mut csv_bytes = Vec::new();
    full.write_csv(&mut csv_bytes).unwrap();
    let full_back = FeatureMatrix::read_csv(csv_bytes.as_slice()).unwrap();
    assert_eq!(full, full_back);

    let non_click = extract(&ds, &whois, ExtractionMode::NonClick).unwrap();
    assert_eq!(non_click.feature_count(), 5);

    // Train/evaluate all three classifiers on a stratified holdout.
    let (train, test) = split_holdout(&full, 0.25, params.seed).unwrap();
    let (train_mal, train_ben) = train.label_counts();
    let (test_mal, test_ben) = test.label_counts();
    assert_eq!(train_mal + test_mal, 300);
    assert_eq!(train_ben + test_ben, 300);
    assert!((test_mal as i64 - 75).abs() <= 1);

    let tree_params = TrainParams::default();
    let nb = train_naive_bayes(&train).unwrap();
    let dt = train_decision_tree(&train, &tree_params).unwrap();
    let rf = train_random_forest(&train, &tree_params).unwrap();
    let nb_report = evaluate(&nb, &test).unwrap();
    let dt_report = evaluate(&dt, &test).unwrap();
    let rf_report = evaluate(&rf, &test).unwrap();
    // Easy separation: every classifier should be strong, the forest solid.
    assert!(nb_report.accuracy >= 0.80, "naive bayes {}", nb_report.accuracy);
    assert!(dt_report.accuracy >= 0.85, "tree {}", dt_report.accuracy);
    assert!(rf_report.accuracy >= 0.90, "forest {}", rf_report.accuracy);

    let text = render_report_text(&rf_report, "random forest holdout");
    assert!(text.contains("Accuracy"));
    assert!(text.contains("actual malicious"));

    // Serialized model predicts identically.
    let model_path = dir.path().join("rf.json");
    save_model(&rf, &model_path).unwrap();
    let loaded = load_model(&model_path).unwrap();
    for row in &test.rows {
        assert_eq!(
            predict(&rf, row).unwrap(),
            predict(&loaded, row).unwrap()
        );
    }

    // Forensics over the same dataset.
    let dist = susfac_distribution(&ds);
    assert_eq!(dist.evaluated_encoders, ds.encoders.len());
    assert!(dist
        .points
        .windows(2)
        .all(|w| w[0].encoders_at_or_below <= w[1].encoders_at_or_below));
    // Malicious encoders in the generator collect only flagged links, so the
    // all-flagged band is exactly the malicious encoder pool.
    let highly: usize = ds
        .encoders
        .values()
        .filter(|e| !e.link_history.is_empty() && e.link_history.iter().all(|h| h.warning_flagged))
        .count();
    assert!(highly > 0);

    let accounts = account_item_sets(&ds, CommunityItems::Domain);
    assert_eq!(accounts.len(), ds.encoders.len());
    let communities = detect_communities(&accounts, 0.5, 2).unwrap();
    let mut seen = BTreeSet::new();
    for group in &communities.groups {
        assert!(group.len() >= 2);
        for member in group {
            assert!(seen.insert(member.clone()), "groups must be disjoint");
        }
    }
    assert!(communities.score_variance >= 0.0);

    let liveness = domain_liveness(&ds, &whois);
    assert!(liveness.dead_fraction > 0.0 && liveness.dead_fraction < 1.0);
    assert_eq!(
        liveness.domains.iter().map(|d| d.link_count).sum::<usize>(),
        ds.links.len()
    );

    let persist = persistence(&ds, 50, RESOLVED_AT - 200 * 86_400).unwrap();
    assert_eq!(persist.selected, 50);
    assert!(!persist.shortfall);
    assert!(persist.fraction >= 0.0 && persist.fraction <= 1.0);
}
