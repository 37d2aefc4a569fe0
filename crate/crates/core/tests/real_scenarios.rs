//! Checks against the published CSP scenarios. They run only when the
//! scenarios are already in the cache (`$METAXFER_CACHE` or
//! `<workspace>/aslib_cache`); otherwise each test prints a note and passes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use metaxfer::aslib::{is_cached, load_scenario};
use metaxfer::dataset::{choose_k, derive_labels};
use metaxfer::reference::CSP_SCENARIOS;

fn cache() -> PathBuf {
    std::env::var_os("METAXFER_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../aslib_cache"))
}

fn available() -> Option<PathBuf> {
    let dir = cache();
    if CSP_SCENARIOS.iter().all(|s| is_cached(&dir, s)) {
        Some(dir)
    } else {
        eprintln!("CSP scenarios not cached under {}; skipping", dir.display());
        None
    }
}

/// Attribute names and first-column values of data rows, by a plain line scan.
fn scan_arff(path: &Path) -> (Vec<String>, Vec<String>) {
    let text = fs::read_to_string(path).unwrap();
    let mut attrs = Vec::new();
    let mut ids = Vec::new();
    let mut in_data = false;
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if in_data {
            ids.push(
                line.split(',')
                    .next()
                    .unwrap()
                    .trim_matches(['\'', '"'])
                    .to_string(),
            );
        } else if lower.starts_with("@attribute") {
            attrs.push(
                line.split_whitespace()
                    .nth(1)
                    .unwrap()
                    .trim_matches(['\'', '"'])
                    .to_string(),
            );
        } else if lower.starts_with("@data") {
            in_data = true;
        }
    }
    (attrs, ids)
}

#[test]
fn feature_rows_cover_run_instances() {
    let Some(cache) = available() else { return };
    for name in CSP_SCENARIOS {
        let dir = cache.join(name);
        let (_, feature_ids) = scan_arff(&dir.join("feature_values.arff"));
        let (_, run_ids) = scan_arff(&dir.join("algorithm_runs.arff"));
        let f: BTreeSet<_> = feature_ids.iter().collect();
        let r: BTreeSet<_> = run_ids.iter().collect();
        let scenario = load_scenario(&dir).unwrap();
        assert_eq!(
            scenario.instances.len(),
            f.intersection(&r).count(),
            "{name}"
        );
        if name == "CSP-2010" {
            assert_eq!(f, r);
            assert!(!scenario.maximize);
        }
    }
}

#[test]
fn feature_counts_and_shared_k() {
    let Some(cache) = available() else { return };
    let mut counts = Vec::new();
    for name in CSP_SCENARIOS {
        let dir = cache.join(name);
        let (attrs, _) = scan_arff(&dir.join("feature_values.arff"));
        let expected = attrs
            .iter()
            .filter(|a| *a != "instance_id" && *a != "repetition")
            .count();
        let data = derive_labels(&load_scenario(&dir).unwrap()).unwrap();
        assert_eq!(data.n_features(), expected, "{name}");
        counts.push(expected);
    }
    assert_eq!(
        choose_k(counts.iter().copied()).unwrap(),
        *counts.iter().min().unwrap()
    );
}
