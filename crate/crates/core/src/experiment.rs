//! Repeated, seeded training runs and the results grid.
//!
//! A *cell* is one target scenario under one mode: normal training, or
//! transfer from a source scenario at a freeze level. Each cell is run for
//! a number of repetitions; repetition `r` derives every random choice
//! (split, initialization, shuffling) from
//! `hash(base_seed, target, mode, r)`, so cells can be computed in any order
//! or in parallel and still produce identical bytes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aslib::{self, FetchConfig};
use crate::dataset::{
    apply_preprocessor, choose_k, derive_labels, fit_preprocessor, stratified_split, RawMetaDataset,
};
use crate::error::{Error, IoContext, Result};
use crate::matrix::Matrix;
use crate::nn::{
    deserialize_model, evaluate, he_init, serialize_model, train, MlpModel, TrainConfig,
};
use crate::reference;
use crate::seed::{derive_seed, rng_from_seed, sub_seed};
use crate::transfer::{transplant, FreezeLevel, TransferConfig};

pub const DEFAULT_HIDDEN: [usize; 2] = [64, 32];
pub const DEFAULT_REPETITIONS: usize = 30;
pub const TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Normal,
    Transfer { source: String, freeze: FreezeLevel },
}

impl Mode {
    /// Base name of the cell's result file.
    pub fn file_stem(&self) -> String {
        match self {
            Mode::Normal => "normal".into(),
            Mode::Transfer { source, freeze } => format!("{source}_{freeze}"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Mode::Normal => "Normal".into(),
            Mode::Transfer { source, freeze } => format!("{source} {freeze}"),
        }
    }

    fn seed_tag(&self) -> String {
        match self {
            Mode::Normal => "normal".into(),
            Mode::Transfer { source, freeze } => {
                format!("transfer:{source}:{}", freeze.frozen_hidden_layers())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitProtocol {
    /// A fresh stratified split for every repetition.
    PerRepetition,
    /// One split per target scenario, reused by every repetition and mode.
    Fixed,
}

/// Everything about a run except which cell it is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProtocol {
    pub repetitions: usize,
    pub base_seed: u64,
    /// `train.seed` is replaced by a derived seed in every repetition.
    pub train: TrainConfig,
    pub hidden: [usize; 2],
    pub k: usize,
    pub split: SplitProtocol,
    pub test_fraction: f64,
}

impl RunProtocol {
    pub fn new(k: usize) -> Self {
        Self {
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
            train: TrainConfig::default(),
            hidden: DEFAULT_HIDDEN,
            k,
            split: SplitProtocol::PerRepetition,
            test_fraction: TEST_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.k == 0 || self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("layer widths must be positive".into()));
        }
        self.train.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub target: String,
    pub mode: Mode,
    #[serde(flatten)]
    pub protocol: RunProtocol,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if let Mode::Transfer { source, .. } = &self.mode {
            if *source == self.target {
                return Err(Error::InvalidConfig(format!(
                    "transfer source and target are both `{source}`"
                )));
            }
        }
        self.protocol.validate()
    }

    pub fn repetition_seed(&self, repetition: usize) -> u64 {
        derive_seed(&[
            &self.protocol.base_seed,
            &self.target,
            &self.mode.seed_tag(),
            &repetition,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub repetition: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub loss: f64,
    pub train_accuracy: f64,
    pub train_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub target_hash: String,
    pub source_hash: Option<String>,
    pub target_instances: usize,
    pub target_classes: Vec<String>,
    /// Always `population`: divide by n.
    pub std: String,
    /// Always `test`: cross-entropy on the held-out rows.
    pub reported_loss: String,
    /// Always `train-only`: scaling and selection are fit on the training rows.
    pub preprocessing_fit: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub spec: ExperimentSpec,
    pub runs: Vec<RunResult>,
    pub mean_acc: f64,
    pub std_acc: f64,
    pub mean_loss: f64,
    pub std_loss: f64,
    pub provenance: Provenance,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Largest absolute difference between the stored aggregates and ones
    /// recomputed from `runs`.
    pub fn aggregate_drift(&self) -> f64 {
        let acc: Vec<f64> = self.runs.iter().map(|r| r.accuracy).collect();
        let loss: Vec<f64> = self.runs.iter().map(|r| r.loss).collect();
        let (Ok((ma, sa)), Ok((ml, sl))) = (summarize(&acc), summarize(&loss)) else {
            return f64::INFINITY;
        };
        [
            ma - self.mean_acc,
            sa - self.std_acc,
            ml - self.mean_loss,
            sl - self.std_loss,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    }

    /// `results_dir/<target>/<mode>.json`.
    pub fn path_in(&self, results_dir: &Path) -> PathBuf {
        results_dir
            .join(&self.spec.target)
            .join(format!("{}.json", self.spec.mode.file_stem()))
    }

    pub fn write(&self, results_dir: &Path) -> Result<PathBuf> {
        let path = self.path_in(results_dir);
        let parent = path.parent().expect("result path has a parent");
        fs::create_dir_all(parent).at(parent)?;
        fs::write(&path, self.to_json()?).at(&path)?;
        Ok(path)
    }
}

/// Mean and population standard deviation.
pub fn summarize(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub data: RawMetaDataset,
    pub content_hash: String,
}

/// Labeled meta-datasets addressable by name.
#[derive(Debug, Clone, Default)]
pub struct ScenarioSet {
    scenarios: BTreeMap<String, LoadedScenario>,
    order: Vec<String>,
}

impl ScenarioSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, data: RawMetaDataset, content_hash: String) {
        let name = name.into();
        if !self.scenarios.contains_key(&name) {
            self.order.push(name.clone());
        }
        self.scenarios
            .insert(name, LoadedScenario { data, content_hash });
    }

    /// Loads and labels one scenario directory under the given name.
    pub fn load_dir(&mut self, name: &str, dir: &Path) -> Result<()> {
        let scenario = aslib::load_scenario(dir)?;
        let data = derive_labels(&scenario)?;
        let hash = aslib::content_hash(dir)?;
        self.insert(name, data, hash);
        Ok(())
    }

    /// Loads `names` from `cache_dir`, fetching missing ones when `fetch`
    /// is given.
    pub fn from_cache(
        cache_dir: &Path,
        names: &[String],
        fetch: Option<&FetchConfig>,
    ) -> Result<Self> {
        let mut set = Self::new();
        for name in names {
            let dir = match fetch {
                Some(cfg) => aslib::fetch_scenario(name, cache_dir, cfg)?,
                None if aslib::is_cached(cache_dir, name) => cache_dir.join(name),
                None => return Err(Error::UnknownScenario(name.clone())),
            };
            set.load_dir(name, &dir)?;
        }
        Ok(set)
    }

    pub fn get(&self, name: &str) -> Result<&LoadedScenario> {
        self.scenarios
            .get(name)
            .ok_or_else(|| Error::UnknownScenario(name.into()))
    }

    /// Names in insertion order.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    /// Smallest feature count over all scenarios.
    pub fn shared_k(&self) -> Result<usize> {
        choose_k(self.scenarios.values().map(|s| s.data.n_features()))
    }
}

struct Prepared {
    x_train: Matrix,
    y_train: Vec<usize>,
    x_test: Matrix,
    y_test: Vec<usize>,
}

fn prepare(data: &RawMetaDataset, split_seed: u64, protocol: &RunProtocol) -> Result<Prepared> {
    let split = stratified_split(
        &data.y,
        protocol.test_fraction,
        &mut rng_from_seed(split_seed),
    )?;
    let (x_train_raw, y_train) = data.select_rows(&split.train_rows);
    let (x_test_raw, y_test) = data.select_rows(&split.test_rows);
    let pre = fit_preprocessor(&x_train_raw, &y_train, protocol.k)?;
    Ok(Prepared {
        x_train: apply_preprocessor(&pre, &x_train_raw)?,
        y_train,
        x_test: apply_preprocessor(&pre, &x_test_raw)?,
        y_test,
    })
}

fn split_seed(protocol: &RunProtocol, target: &str, repetition_seed: u64) -> u64 {
    match protocol.split {
        SplitProtocol::PerRepetition => sub_seed(repetition_seed, "split"),
        SplitProtocol::Fixed => derive_seed(&[&protocol.base_seed, &target, &"fixed-split"]),
    }
}

fn train_config(protocol: &RunProtocol, repetition_seed: u64) -> TrainConfig {
    TrainConfig {
        seed: sub_seed(repetition_seed, "shuffle"),
        ..protocol.train.clone()
    }
}

/// Key for source models: everything that determines one, minus the
/// repetition count.
#[derive(Serialize)]
struct SourceKey<'a> {
    source: &'a str,
    base_seed: u64,
    train: &'a TrainConfig,
    hidden: [usize; 2],
    k: usize,
    split: SplitProtocol,
    test_fraction: f64,
}

type Slot = Arc<Mutex<Option<Arc<MlpModel>>>>;

/// Runs cells against a fixed scenario set. Source models for transfer are
/// trained once per (source, repetition, protocol) and shared read-only;
/// with a model directory they are also kept on disk between runs.
pub struct Experiment {
    scenarios: ScenarioSet,
    source_models: Mutex<HashMap<String, Slot>>,
    model_dir: Option<PathBuf>,
    pool: rayon::ThreadPool,
}

impl Experiment {
    pub fn new(scenarios: ScenarioSet) -> Self {
        Self::with_jobs(scenarios, 1)
    }

    /// `jobs` worker threads; 0 means one per core.
    pub fn with_jobs(scenarios: ScenarioSet, jobs: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("failed to build worker pool");
        Self {
            scenarios,
            source_models: Mutex::new(HashMap::new()),
            model_dir: None,
            pool,
        }
    }

    /// Stores source models as `dir/<source>/<protocol hash>/rep_<r>.json`.
    pub fn with_model_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.model_dir = Some(dir.into());
        self
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    /// The model normal training produces for `source` in repetition `r`.
    pub fn source_model(
        &self,
        source: &str,
        repetition: usize,
        protocol: &RunProtocol,
    ) -> Result<Arc<MlpModel>> {
        let protocol_key = serde_json::to_string(&SourceKey {
            source,
            base_seed: protocol.base_seed,
            train: &protocol.train,
            hidden: protocol.hidden,
            k: protocol.k,
            split: protocol.split,
            test_fraction: protocol.test_fraction,
        })?;
        let slot = self
            .source_models
            .lock()
            .expect("source cache poisoned")
            .entry(format!("{protocol_key}#{repetition}"))
            .or_default()
            .clone();
        let mut guard = slot.lock().expect("source slot poisoned");
        if let Some(model) = guard.as_ref() {
            return Ok(model.clone());
        }

        let disk_path = self.model_dir.as_ref().map(|dir| {
            let digest = hex::encode(Sha256::digest(protocol_key.as_bytes()));
            dir.join(source)
                .join(&digest[..16])
                .join(format!("rep_{repetition}.json"))
        });
        let cached = match &disk_path {
            Some(path) if path.is_file() => {
                let (model, _) = deserialize_model(&fs::read_to_string(path).at(path)?)?;
                Some(model)
            }
            _ => None,
        };
        let model = match cached {
            Some(model) => model,
            None => {
                let spec = ExperimentSpec {
                    target: source.into(),
                    mode: Mode::Normal,
                    protocol: protocol.clone(),
                };
                let (model, run) = self.normal_repetition(&spec, repetition)?;
                if let Some(path) = &disk_path {
                    let parent = path.parent().expect("model path has a parent");
                    fs::create_dir_all(parent).at(parent)?;
                    let config = train_config(protocol, run.seed);
                    let tmp = path.with_extension("json.part");
                    fs::write(&tmp, serialize_model(&model, Some(&config))?).at(&tmp)?;
                    fs::rename(&tmp, path).at(path)?;
                }
                model
            }
        };
        let model = Arc::new(model);
        *guard = Some(model.clone());
        Ok(model)
    }

    fn normal_repetition(
        &self,
        spec: &ExperimentSpec,
        repetition: usize,
    ) -> Result<(MlpModel, RunResult)> {
        let p = &spec.protocol;
        let data = &self.scenarios.get(&spec.target)?.data;
        let seed = spec.repetition_seed(repetition);
        let prepared = prepare(data, split_seed(p, &spec.target, seed), p)?;
        let sizes = [p.k, p.hidden[0], p.hidden[1], data.n_classes()];
        let init = he_init(sizes, &mut rng_from_seed(sub_seed(seed, "init")));
        finish(init, &prepared, &train_config(p, seed), repetition, seed)
    }

    fn transfer_repetition(
        &self,
        spec: &ExperimentSpec,
        source: &str,
        freeze: FreezeLevel,
        repetition: usize,
    ) -> Result<RunResult> {
        let p = &spec.protocol;
        let data = &self.scenarios.get(&spec.target)?.data;
        let seed = spec.repetition_seed(repetition);
        let source_model = self.source_model(source, repetition, p)?;
        let prepared = prepare(data, split_seed(p, &spec.target, seed), p)?;
        let cfg = TransferConfig {
            freeze,
            seed: sub_seed(seed, "output-init"),
            input_dim: p.k,
            hidden: p.hidden,
        };
        let init = transplant(&source_model, data.n_classes(), &cfg)?;
        finish(init, &prepared, &train_config(p, seed), repetition, seed).map(|(_, r)| r)
    }

    pub fn run_cell(&self, spec: &ExperimentSpec) -> Result<ExperimentSummary> {
        spec.validate()?;
        let target = self.scenarios.get(&spec.target)?;
        let source_hash = match &spec.mode {
            Mode::Normal => None,
            Mode::Transfer { source, .. } => Some(self.scenarios.get(source)?.content_hash.clone()),
        };
        if let Ok(k) = self.scenarios.shared_k() {
            if k != spec.protocol.k {
                log::warn!(
                    "cell uses K = {} but the scenario set implies K = {k}",
                    spec.protocol.k
                );
            }
        }

        let runs: Vec<RunResult> = self.pool.install(|| {
            (0..spec.protocol.repetitions)
                .into_par_iter()
                .map(|r| match &spec.mode {
                    Mode::Normal => self.normal_repetition(spec, r).map(|(_, run)| run),
                    Mode::Transfer { source, freeze } => {
                        self.transfer_repetition(spec, source, *freeze, r)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let acc: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        let loss: Vec<f64> = runs.iter().map(|r| r.loss).collect();
        let (mean_acc, std_acc) = summarize(&acc)?;
        let (mean_loss, std_loss) = summarize(&loss)?;
        Ok(ExperimentSummary {
            spec: spec.clone(),
            runs,
            mean_acc,
            std_acc,
            mean_loss,
            std_loss,
            provenance: Provenance {
                target_hash: target.content_hash.clone(),
                source_hash,
                target_instances: target.data.len(),
                target_classes: target.data.class_names.clone(),
                std: "population".into(),
                reported_loss: "test".into(),
                preprocessing_fit: "train-only".into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
        })
    }

    /// For every target: normal training, then each other source at every
    /// freeze level.
    pub fn run_table(
        &self,
        targets: &[String],
        sources: &[String],
        protocol: &RunProtocol,
    ) -> Result<ResultTable> {
        let mut specs = Vec::new();
        for target in targets {
            specs.push(ExperimentSpec {
                target: target.clone(),
                mode: Mode::Normal,
                protocol: protocol.clone(),
            });
            for source in sources.iter().filter(|s| *s != target) {
                for freeze in FreezeLevel::ALL {
                    specs.push(ExperimentSpec {
                        target: target.clone(),
                        mode: Mode::Transfer {
                            source: source.clone(),
                            freeze,
                        },
                        protocol: protocol.clone(),
                    });
                }
            }
        }
        let summaries: Vec<ExperimentSummary> = self.pool.install(|| {
            specs
                .par_iter()
                .map(|s| self.run_cell(s))
                .collect::<Result<Vec<_>>>()
        })?;

        let mut blocks: Vec<TableBlock> = Vec::new();
        for summary in summaries {
            match blocks.last_mut() {
                Some(b) if b.target == summary.spec.target => b.cells.push(summary),
                _ => blocks.push(TableBlock {
                    target: summary.spec.target.clone(),
                    cells: vec![summary],
                }),
            }
        }
        Ok(ResultTable { blocks })
    }
}

fn finish(
    init: MlpModel,
    prepared: &Prepared,
    config: &TrainConfig,
    repetition: usize,
    seed: u64,
) -> Result<(MlpModel, RunResult)> {
    let (model, _) = train(init, &prepared.x_train, &prepared.y_train, config)?;
    let test = evaluate(&model, &prepared.x_test, &prepared.y_test)?;
    let fit = evaluate(&model, &prepared.x_train, &prepared.y_train)?;
    Ok((
        model,
        RunResult {
            repetition,
            seed,
            accuracy: test.accuracy,
            loss: test.loss,
            train_accuracy: fit.accuracy,
            train_loss: fit.loss,
        },
    ))
}

/// One-shot convenience over [`Experiment::run_cell`].
pub fn run_cell(spec: &ExperimentSpec, scenarios: &ScenarioSet) -> Result<ExperimentSummary> {
    Experiment::new(scenarios.clone()).run_cell(spec)
}

/// All cells for one target, normal first.
#[derive(Debug, Clone)]
pub struct TableBlock {
    pub target: String,
    pub cells: Vec<ExperimentSummary>,
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub blocks: Vec<TableBlock>,
}

fn reference_for(s: &ExperimentSummary) -> Option<&'static reference::ReferenceCell> {
    match &s.spec.mode {
        Mode::Normal => reference::lookup(&s.spec.target, None),
        Mode::Transfer { source, freeze } => {
            reference::lookup(&s.spec.target, Some((source, *freeze)))
        }
    }
}

fn pm(mean: f64, std: f64) -> String {
    format!("{mean:.2} ± {std:.2}")
}

fn bold_best(cells: Vec<(f64, String)>, higher_is_better: bool) -> Vec<String> {
    let best = cells
        .iter()
        .map(|(v, _)| *v)
        .fold(None, |acc: Option<f64>, v| match acc {
            None => Some(v),
            Some(b) if (higher_is_better && v > b) || (!higher_is_better && v < b) => Some(v),
            keep => keep,
        });
    cells
        .into_iter()
        .map(|(v, s)| {
            if Some(v) == best {
                format!("**{s}**")
            } else {
                s
            }
        })
        .collect()
}

/// Normal-mode mean accuracy next to the published value.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalDelta {
    pub target: String,
    pub ours: f64,
    pub published: f64,
}

impl NormalDelta {
    pub fn delta(&self) -> f64 {
        self.ours - self.published
    }
}

impl ResultTable {
    pub fn summaries(&self) -> impl Iterator<Item = &ExperimentSummary> {
        self.blocks.iter().flat_map(|b| &b.cells)
    }

    pub fn normal_deltas(&self) -> Vec<NormalDelta> {
        self.summaries()
            .filter(|s| s.spec.mode == Mode::Normal)
            .filter_map(|s| {
                reference_for(s).map(|r| NormalDelta {
                    target: s.spec.target.clone(),
                    ours: s.mean_acc,
                    published: r.acc.0,
                })
            })
            .collect()
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from(
            "target,mode,source,freeze,repetitions,mean_acc,std_acc,mean_loss,std_loss,published_mean_acc,published_mean_loss,delta_acc,delta_loss\n",
        );
        for s in self.summaries() {
            let (mode, source, freeze) = match &s.spec.mode {
                Mode::Normal => ("normal", String::new(), String::new()),
                Mode::Transfer { source, freeze } => {
                    ("transfer", source.clone(), freeze.to_string())
                }
            };
            let reference = reference_for(s);
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{mode},{source},{freeze},{},{},{},{},{},{},{},{},{}",
                s.spec.target,
                s.spec.protocol.repetitions,
                s.mean_acc,
                s.std_acc,
                s.mean_loss,
                s.std_loss,
                opt(reference.map(|r| r.acc.0)),
                opt(reference.map(|r| r.loss.0)),
                opt(reference.map(|r| s.mean_acc - r.acc.0)),
                opt(reference.map(|r| s.mean_loss - r.loss.0)),
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn render_markdown(&self) -> String {
        let mut out = String::from("# Results\n");
        for block in &self.blocks {
            let cells = &block.cells;
            writeln!(out, "\n## {}\n", block.target).unwrap();
            let header: Vec<String> = cells.iter().map(|c| c.spec.mode.label()).collect();
            writeln!(out, "| | {} |", header.join(" | ")).unwrap();
            writeln!(out, "|---|{}", "---|".repeat(cells.len())).unwrap();

            let acc = bold_best(
                cells
                    .iter()
                    .map(|c| (c.mean_acc, pm(c.mean_acc, c.std_acc)))
                    .collect(),
                true,
            );
            let loss = bold_best(
                cells
                    .iter()
                    .map(|c| (c.mean_loss, pm(c.mean_loss, c.std_loss)))
                    .collect(),
                false,
            );
            writeln!(out, "| Acc | {} |", acc.join(" | ")).unwrap();
            writeln!(out, "| Loss | {} |", loss.join(" | ")).unwrap();

            let refs: Option<Vec<_>> = cells.iter().map(reference_for).collect();
            if let Some(refs) = refs {
                let row = |f: &dyn Fn(usize) -> String| {
                    (0..cells.len()).map(f).collect::<Vec<_>>().join(" | ")
                };
                writeln!(
                    out,
                    "| Acc (published) | {} |",
                    row(&|i| pm(refs[i].acc.0, refs[i].acc.1))
                )
                .unwrap();
                writeln!(
                    out,
                    "| Loss (published) | {} |",
                    row(&|i| pm(refs[i].loss.0, refs[i].loss.1))
                )
                .unwrap();
                writeln!(
                    out,
                    "| Δ Acc | {} |",
                    row(&|i| format!("{:+.2}", cells[i].mean_acc - refs[i].acc.0))
                )
                .unwrap();
                writeln!(
                    out,
                    "| Δ Loss | {} |",
                    row(&|i| format!("{:+.2}", cells[i].mean_loss - refs[i].loss.0))
                )
                .unwrap();
            }
        }
        if let Some(first) = self.summaries().next() {
            let p = &first.spec.protocol;
            writeln!(
                out,
                "\nmean ± population std over {} repetitions; loss is test cross-entropy; split: {}; hidden = {:?}; K = {}; lr = {}; epochs = {}; batch = {}; base seed = {}\n",
                p.repetitions,
                match p.split {
                    SplitProtocol::PerRepetition => "fresh stratified 80/20 per repetition",
                    SplitProtocol::Fixed => "one fixed stratified 80/20 split",
                },
                p.hidden,
                p.k,
                p.train.learning_rate,
                p.train.epochs,
                p.train.batch_size,
                p.base_seed,
            )
            .unwrap();
        }
        out
    }

    /// Per-cell JSON plus `table.csv` and `table.md`.
    pub fn write(&self, results_dir: &Path) -> Result<()> {
        fs::create_dir_all(results_dir).at(results_dir)?;
        for s in self.summaries() {
            s.write(results_dir)?;
        }
        let csv = results_dir.join("table.csv");
        fs::write(&csv, self.render_csv()).at(&csv)?;
        let md = results_dir.join("table.md");
        fs::write(&md, self.render_markdown()).at(&md)?;
        Ok(())
    }
}
