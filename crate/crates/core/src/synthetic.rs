//! Generates ASlib-format scenario directories with a known answer.
//!
//! Each instance has one informative feature per algorithm. The winning
//! algorithm's feature is drawn at least `margin` above every other
//! informative feature, and that algorithm gets the fastest run, so labels
//! are separable with a margin.
//! Noise features are scaled uniform draws with some cells missing.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::arff::{ArffRelation, Attribute, AttributeType, Value};
use crate::aslib::{DESCRIPTION_FILE, FEATURES_FILE, RUNS_FILE};
use crate::error::{IoContext, Result};
use crate::seed::{rng_from_seed, sub_seed};

#[derive(Debug, Clone)]
pub struct SyntheticScenario {
    pub name: String,
    pub instances: usize,
    pub algorithms: usize,
    pub noise_features: usize,
    pub margin: f64,
    /// Probability that a noise cell is written as `?`.
    pub missing_rate: f64,
    /// Probability that a losing run is recorded as a timeout.
    pub timeout_rate: f64,
    pub cutoff_time: f64,
    pub seed: u64,
}

impl SyntheticScenario {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            instances: 200,
            algorithms: 3,
            noise_features: 4,
            margin: 0.1,
            missing_rate: 0.05,
            timeout_rate: 0.1,
            cutoff_time: 100.0,
            seed: 0,
        }
    }

    pub fn n_features(&self) -> usize {
        self.algorithms + self.noise_features
    }

    pub fn algorithm_name(i: usize) -> String {
        format!("algo_{i:02}")
    }

    pub fn instance_name(i: usize) -> String {
        format!("inst_{i:05}")
    }

    /// Feature rows and the index of the winning algorithm for each instance.
    pub fn generate(&self) -> (Vec<Vec<Option<f64>>>, Vec<usize>) {
        assert!(self.algorithms >= 2, "need at least two algorithms");
        assert!(self.margin < 1.0, "margin must be below 1");
        let mut rng = rng_from_seed(sub_seed(self.seed, "features"));
        let mut rows = Vec::with_capacity(self.instances);
        let mut winners = Vec::with_capacity(self.instances);
        for i in 0..self.instances {
            // Cycle the intended winner so every class is well populated.
            let winner = i % self.algorithms;
            let mut informative: Vec<f64> = (0..self.algorithms)
                .map(|_| rng.random_range(0.0..1.0 - self.margin))
                .collect();
            let top = informative
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            informative[winner] = rng.random_range(top + self.margin..=1.0);
            let mut row: Vec<Option<f64>> = informative.into_iter().map(Some).collect();
            for j in 0..self.noise_features {
                let scale = 10f64.powi(j as i32 % 4);
                let v = rng.random_range(0.0..scale);
                row.push(if rng.random_bool(self.missing_rate) {
                    None
                } else {
                    Some(v)
                });
            }
            rows.push(row);
            winners.push(winner);
        }
        (rows, winners)
    }

    fn description(&self) -> String {
        format!(
            "scenario_id: {}\nperformance_measures:\n  - runtime\nmaximize:\n  - false\nperformance_type:\n  - runtime\nalgorithm_cutoff_time: {}\nalgorithm_cutoff_memory: ?\nfeatures_cutoff_time: ?\nfeatures_cutoff_memory: ?\n",
            self.name, self.cutoff_time
        )
    }

    fn feature_relation(&self, rows: &[Vec<Option<f64>>]) -> ArffRelation {
        let mut attributes = vec![
            Attribute {
                name: "instance_id".into(),
                kind: AttributeType::String,
            },
            Attribute {
                name: "repetition".into(),
                kind: AttributeType::Numeric,
            },
        ];
        for j in 0..self.algorithms {
            attributes.push(Attribute {
                name: format!("signal_{j:02}"),
                kind: AttributeType::Numeric,
            });
        }
        for j in 0..self.noise_features {
            attributes.push(Attribute {
                name: format!("noise_{j:02}"),
                kind: AttributeType::Numeric,
            });
        }
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut out = vec![Value::Text(Self::instance_name(i)), Value::Number(1.0)];
                out.extend(r.iter().map(|v| v.map_or(Value::Missing, Value::Number)));
                out
            })
            .collect();
        ArffRelation {
            name: format!("{}_features", self.name),
            attributes,
            rows,
        }
    }

    fn run_relation(&self, winners: &[usize]) -> ArffRelation {
        let statuses = [
            "ok",
            "timeout",
            "memout",
            "not_applicable",
            "crash",
            "other",
        ];
        let attributes = vec![
            Attribute {
                name: "instance_id".into(),
                kind: AttributeType::String,
            },
            Attribute {
                name: "repetition".into(),
                kind: AttributeType::Numeric,
            },
            Attribute {
                name: "algorithm".into(),
                kind: AttributeType::String,
            },
            Attribute {
                name: "runtime".into(),
                kind: AttributeType::Numeric,
            },
            Attribute {
                name: "runstatus".into(),
                kind: AttributeType::Nominal(statuses.iter().map(|s| s.to_string()).collect()),
            },
        ];
        let mut rng = rng_from_seed(sub_seed(self.seed, "runs"));
        let mut rows = Vec::new();
        for (i, &winner) in winners.iter().enumerate() {
            for a in 0..self.algorithms {
                let (runtime, status) = if a == winner {
                    (Value::Number(1.0 + rng.random_range(0.0..1.0)), "ok")
                } else if rng.random_bool(self.timeout_rate) {
                    (Value::Number(self.cutoff_time), "timeout")
                } else {
                    (Value::Number(5.0 + rng.random_range(0.0..10.0)), "ok")
                };
                rows.push(vec![
                    Value::Text(Self::instance_name(i)),
                    Value::Number(1.0),
                    Value::Text(Self::algorithm_name(a)),
                    runtime,
                    Value::Text(status.into()),
                ]);
            }
        }
        ArffRelation {
            name: format!("{}_runs", self.name),
            attributes,
            rows,
        }
    }

    /// Writes `parent/<name>/{description.txt, feature_values.arff,
    /// algorithm_runs.arff}` and returns the scenario directory.
    pub fn write_to(&self, parent: &Path) -> Result<PathBuf> {
        let (rows, winners) = self.generate();
        let dir = parent.join(&self.name);
        fs::create_dir_all(&dir).at(&dir)?;
        let write = |file: &str, body: String| {
            let path = dir.join(file);
            fs::write(&path, body).at(&path)
        };
        write(DESCRIPTION_FILE, self.description())?;
        write(FEATURES_FILE, self.feature_relation(&rows).to_string())?;
        write(RUNS_FILE, self.run_relation(&winners).to_string())?;
        Ok(dir)
    }
}

/// Four scenarios with different class and feature counts, standing in for
/// a multi-scenario grid in tests and examples.
pub fn synthetic_suite(seed: u64) -> Vec<SyntheticScenario> {
    let base = |name: &str, algorithms, noise, instances| SyntheticScenario {
        algorithms,
        noise_features: noise,
        instances,
        seed: sub_seed(seed, name),
        ..SyntheticScenario::new(name)
    };
    vec![
        base("SYN-A", 3, 3, 150),
        base("SYN-B", 4, 4, 160),
        base("SYN-C", 3, 5, 150),
        base("SYN-D", 2, 6, 140),
    ]
}
