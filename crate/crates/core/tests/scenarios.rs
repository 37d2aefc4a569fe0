mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::Ordering;
use std::time::Duration;

use metaxfer::aslib::{
    content_hash, fetch_scenario, is_cached, load_scenario, parse_description, CacheManifest,
    FetchConfig, MANIFEST_FILE, REQUIRED_FILES,
};
use metaxfer::dataset::{
    apply_preprocessor, derive_labels, fit_preprocessor, load_dataset, save_dataset, MetaDataset,
};
use metaxfer::synthetic::SyntheticScenario;
use metaxfer::Error;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/aslib")
}

fn local_config(base: &str) -> FetchConfig {
    FetchConfig {
        url_template: format!("{base}/{{scenario}}/{{file}}"),
        timeout: Duration::from_secs(10),
    }
}

#[test]
fn bundled_fixture_matches_generator() {
    let tmp = tempfile::tempdir().unwrap();
    for s in metaxfer::synthetic::synthetic_suite(0) {
        let fresh = s.write_to(tmp.path()).unwrap();
        assert_eq!(
            content_hash(&fresh).unwrap(),
            content_hash(fixtures().join(&s.name)).unwrap(),
            "{}",
            s.name
        );
    }
}

#[test]
fn loading_is_deterministic() {
    let dir = fixtures().join("SYN-A");
    let a = serde_json::to_string(&load_scenario(&dir).unwrap()).unwrap();
    let b = serde_json::to_string(&load_scenario(&dir).unwrap()).unwrap();
    assert_eq!(a, b);
    let data = derive_labels(&load_scenario(&dir).unwrap()).unwrap();
    assert_eq!(data.len(), 150);
    assert_eq!(data.class_names, ["algo_00", "algo_01", "algo_02"]);
    assert_eq!(data.n_features(), 6);
}

#[test]
fn missing_file_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = SyntheticScenario::new("x").write_to(tmp.path()).unwrap();
    fs::remove_file(dir.join("algorithm_runs.arff")).unwrap();
    match load_scenario(&dir) {
        Err(Error::IncompleteScenario { file, .. }) => assert_eq!(file, "algorithm_runs.arff"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn instance_sets_are_intersected() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = SyntheticScenario {
        instances: 30,
        ..SyntheticScenario::new("cut")
    };
    let dir = spec.write_to(tmp.path()).unwrap();
    let runs = fs::read_to_string(dir.join("algorithm_runs.arff")).unwrap();
    let kept: String = runs
        .lines()
        .filter(|l| !l.starts_with("inst_00003,"))
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(dir.join("algorithm_runs.arff"), kept).unwrap();
    let scenario = load_scenario(&dir).unwrap();
    assert_eq!(scenario.instances.len(), 29);
    assert!(!scenario.instances.iter().any(|i| i == "inst_00003"));
    assert_eq!(scenario.feature_values.len(), 29);
}

#[test]
fn description_list_forms() {
    let yaml = "scenario_id: S\nperformance_measures:\n  - runtime\nmaximize:\n  - false\nalgorithm_cutoff_time: 1200\n";
    let d = parse_description(yaml.as_bytes()).unwrap();
    assert_eq!(d.performance_measure, "runtime");
    assert_eq!(d.cutoff_time, Some(1200.0));
    let inline =
        "performance_measures: [solution_quality]\nmaximize: [true]\nalgorithm_cutoff_time: ?\n";
    let d = parse_description(inline.as_bytes()).unwrap();
    assert!(d.maximize);
    assert_eq!(d.cutoff_time, None);
    assert!(matches!(
        parse_description("maximize: false\n".as_bytes()),
        Err(Error::MissingKey(_))
    ));
    assert!(
        parse_description("performance_measures: runtime\nmaximize: perhaps\n".as_bytes()).is_err()
    );
}

#[test]
fn fetch_downloads_then_serves_from_cache() {
    let server = common::server::serve(fixtures());
    let cache = tempfile::tempdir().unwrap();
    let config = local_config(&server.base_url);
    let dir = fetch_scenario("SYN-B", cache.path(), &config).unwrap();
    assert!(is_cached(cache.path(), "SYN-B"));
    let manifest: CacheManifest =
        serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(
        manifest.content_hash,
        content_hash(fixtures().join("SYN-B")).unwrap()
    );
    assert_eq!(manifest.url_template, config.url_template);
    assert_eq!(manifest.files.len(), REQUIRED_FILES.len());
    let served = server.requests.load(Ordering::SeqCst);
    assert_eq!(served, 3);

    fetch_scenario("SYN-B", cache.path(), &config).unwrap();
    assert_eq!(
        server.requests.load(Ordering::SeqCst),
        served,
        "warm cache must not download"
    );
    let unreachable = local_config("http://127.0.0.1:9");
    fetch_scenario("SYN-B", cache.path(), &unreachable).unwrap();
}

#[test]
fn fetch_completes_partial_cache() {
    let server = common::server::serve(fixtures());
    let cache = tempfile::tempdir().unwrap();
    let dir = cache.path().join("SYN-C");
    fs::create_dir_all(&dir).unwrap();
    fs::copy(
        fixtures().join("SYN-C/description.txt"),
        dir.join("description.txt"),
    )
    .unwrap();
    fetch_scenario("SYN-C", cache.path(), &local_config(&server.base_url)).unwrap();
    assert_eq!(server.requests.load(Ordering::SeqCst), 2);
    assert_eq!(
        content_hash(&dir).unwrap(),
        content_hash(fixtures().join("SYN-C")).unwrap()
    );
}

#[test]
fn fetch_errors() {
    let server = common::server::serve(fixtures());
    let cache = tempfile::tempdir().unwrap();
    let config = local_config(&server.base_url);
    assert!(matches!(
        fetch_scenario("NOT-A-SCENARIO", cache.path(), &config),
        Err(Error::Network { .. })
    ));
    assert!(!cache.path().join("NOT-A-SCENARIO").exists());
    for bad in ["../SYN-A", "a/b", ".hidden", ""] {
        assert!(
            matches!(
                fetch_scenario(bad, cache.path(), &config),
                Err(Error::UnknownScenario(_))
            ),
            "{bad}"
        );
    }
}

#[test]
fn dataset_export_roundtrip() {
    let raw = derive_labels(&load_scenario(fixtures().join("SYN-D")).unwrap()).unwrap();
    let pre = fit_preprocessor(&raw.x, &raw.y, 5).unwrap();
    let data = MetaDataset {
        name: raw.name.clone(),
        x: apply_preprocessor(&pre, &raw.x).unwrap(),
        y: raw.y.clone(),
        feature_names: pre
            .selected_indices
            .iter()
            .map(|&j| raw.feature_names[j].clone())
            .collect(),
        class_names: raw.class_names.clone(),
    };
    let tmp = tempfile::tempdir().unwrap();
    let (csv, json) = save_dataset(&data, Some(&pre), tmp.path()).unwrap();
    let header = fs::read_to_string(&csv).unwrap();
    assert!(header.lines().next().unwrap().ends_with(",label"));
    let (back, sidecar) = load_dataset(&csv, &json).unwrap();
    assert_eq!(back.x, data.x);
    assert_eq!(back.y, data.y);
    assert_eq!(sidecar.preprocessor.as_ref(), Some(&pre));
}
