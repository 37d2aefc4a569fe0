#![allow(dead_code)]

//! Independent oracles and fixtures shared by the integration tests.

pub mod oracles;
pub mod server;

use std::path::Path;

use metaxfer::experiment::ScenarioSet;
use metaxfer::synthetic::{synthetic_suite, SyntheticScenario};

/// Writes the four-scenario synthetic suite into `dir` and loads it.
pub fn synthetic_set(dir: &Path, seed: u64) -> (Vec<SyntheticScenario>, ScenarioSet) {
    let suite = synthetic_suite(seed);
    let mut set = ScenarioSet::new();
    for s in &suite {
        let path = s.write_to(dir).unwrap();
        set.load_dir(&s.name, &path).unwrap();
    }
    (suite, set)
}
