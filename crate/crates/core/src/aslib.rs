//! ASlib scenario directories: description, feature table and run table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arff::{parse_arff, ArffRelation, AttributeType, Value};
use crate::error::{Error, IoContext, Result};

pub const DESCRIPTION_FILE: &str = "description.txt";
pub const FEATURES_FILE: &str = "feature_values.arff";
pub const RUNS_FILE: &str = "algorithm_runs.arff";
pub const REQUIRED_FILES: [&str; 3] = [DESCRIPTION_FILE, FEATURES_FILE, RUNS_FILE];
pub const MANIFEST_FILE: &str = "manifest.json";

/// Default location of the public ASlib data repository.
pub const DEFAULT_URL_TEMPLATE: &str =
    "https://raw.githubusercontent.com/coseal/aslib_data/master/{scenario}/{file}";

/// Overrides the cache directory when set.
pub const CACHE_ENV: &str = "METAXFER_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Timeout,
    Memout,
    Crash,
    Other,
    Unknown,
}

impl RunStatus {
    pub fn from_label(label: &str) -> Self {
        match label.to_ascii_lowercase().as_str() {
            "ok" => Self::Ok,
            "timeout" => Self::Timeout,
            "memout" => Self::Memout,
            "crash" => Self::Crash,
            "other" | "not_applicable" => Self::Other,
            _ => Self::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub performance: f64,
    pub runstatus: RunStatus,
}

/// Fields read from `description.txt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub performance_measure: String,
    pub maximize: bool,
    pub cutoff_time: Option<f64>,
    pub scenario_id: Option<String>,
    pub performance_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AslibScenario {
    pub scenario_id: String,
    pub instances: Vec<String>,
    pub feature_names: Vec<String>,
    /// Row per instance; `None` is a missing value.
    pub feature_values: Vec<Vec<Option<f64>>>,
    /// Strictly sorted.
    pub algorithms: Vec<String>,
    /// instance id -> algorithm id -> run.
    pub runs: BTreeMap<String, BTreeMap<String, RunRecord>>,
    pub performance_measure_name: String,
    pub maximize: bool,
    pub cutoff_time: Option<f64>,
    pub performance_type: Option<String>,
}

impl AslibScenario {
    pub fn run(&self, instance: &str, algorithm: &str) -> Option<&RunRecord> {
        self.runs.get(instance)?.get(algorithm)
    }

    /// Checks the structural invariants of a scenario.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentScenario(m));
        if self.feature_values.len() != self.instances.len() {
            return bad(format!(
                "{} feature rows for {} instances",
                self.feature_values.len(),
                self.instances.len()
            ));
        }
        if let Some(row) = self
            .feature_values
            .iter()
            .find(|r| r.len() != self.feature_names.len())
        {
            return bad(format!(
                "feature row of width {} for {} features",
                row.len(),
                self.feature_names.len()
            ));
        }
        if self.algorithms.windows(2).any(|w| w[0] >= w[1]) {
            return bad("algorithm ids are not strictly sorted".into());
        }
        let instances: BTreeSet<&str> = self.instances.iter().map(String::as_str).collect();
        for (inst, per_alg) in &self.runs {
            if !instances.contains(inst.as_str()) {
                return bad(format!("run for unknown instance `{inst}`"));
            }
            for (alg, rec) in per_alg {
                if self.algorithms.binary_search(alg).is_err() {
                    return bad(format!("run for unknown algorithm `{alg}`"));
                }
                if !rec.performance.is_finite() {
                    return bad(format!("non-finite performance for ({inst}, {alg})"));
                }
            }
        }
        Ok(())
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::UnparsableValue {
            key: key.into(),
            value: value.into(),
        }),
    }
}

/// Parses `key: value` lines. A key with an empty value followed by
/// `- item` lines (the YAML list form of newer ASlib releases) takes the
/// list's first item, as does a comma- or bracket-separated inline list.
pub fn parse_description<R: Read>(mut reader: R) -> Result<Description> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::UnparsableValue {
            key: DESCRIPTION_FILE.into(),
            value: e.to_string(),
        })?;

    let mut entries: HashMap<String, String> = HashMap::new();
    let mut pending: Option<String> = None;
    for raw in text.lines() {
        let line = raw.trim_end();
        let content = line.trim_start();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let item = if content == "-" {
            Some("")
        } else {
            content.strip_prefix("- ")
        };
        if let Some(item) = item {
            if let Some(key) = pending.take() {
                entries.insert(key, item.trim().to_string());
            }
            continue;
        }
        // Indented lines belong to nested mappings we do not read.
        if line.starts_with(char::is_whitespace) {
            continue;
        }
        pending = None;
        let Some((key, value)) = content.split_once(':') else {
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim();
        if value.is_empty() {
            pending = Some(key);
        } else {
            let first = value
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split(',')
                .next()
                .unwrap_or("")
                .trim()
                .trim_matches(|c| c == '"' || c == '\'')
                .to_string();
            entries.entry(key).or_insert(first);
        }
    }

    let performance_measure = entries
        .get("performance_measures")
        .filter(|v| !v.is_empty())
        .cloned()
        .ok_or_else(|| Error::MissingKey("performance_measures".into()))?;
    let maximize = entries
        .get("maximize")
        .ok_or_else(|| Error::MissingKey("maximize".into()))
        .and_then(|v| parse_bool("maximize", v))?;
    let cutoff_time = match entries.get("algorithm_cutoff_time").map(String::as_str) {
        None | Some("?") | Some("") | Some("null") => None,
        Some(v) => {
            let x: f64 = v.parse().map_err(|_| Error::UnparsableValue {
                key: "algorithm_cutoff_time".into(),
                value: v.into(),
            })?;
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::UnparsableValue {
                    key: "algorithm_cutoff_time".into(),
                    value: v.into(),
                });
            }
            Some(x)
        }
    };
    Ok(Description {
        performance_measure,
        maximize,
        cutoff_time,
        scenario_id: entries
            .get("scenario_id")
            .filter(|v| !v.is_empty())
            .cloned(),
        performance_type: entries
            .get("performance_type")
            .filter(|v| !v.is_empty())
            .cloned(),
    })
}

fn read_arff(path: &Path) -> Result<ArffRelation> {
    let file = fs::File::open(path).at(path)?;
    parse_arff(BufReader::new(file))
}

fn require_column(rel: &ArffRelation, name: &str, file: &str) -> Result<usize> {
    rel.column(name)
        .ok_or_else(|| Error::InconsistentScenario(format!("{file} has no `{name}` column")))
}

fn repetition_is_first(row: &[Value], col: Option<usize>) -> bool {
    match col {
        None => true,
        Some(c) => matches!(row[c], Value::Number(r) if r == 1.0) || row[c].is_missing(),
    }
}

/// Loads a scenario from a directory holding the three required files.
pub fn load_scenario(dir: impl AsRef<Path>) -> Result<AslibScenario> {
    let dir = dir.as_ref();
    for file in REQUIRED_FILES {
        if !dir.join(file).is_file() {
            return Err(Error::IncompleteScenario {
                dir: dir.to_path_buf(),
                file: file.into(),
            });
        }
    }
    let desc_path = dir.join(DESCRIPTION_FILE);
    let desc = parse_description(fs::File::open(&desc_path).at(&desc_path)?)?;
    let features = read_arff(&dir.join(FEATURES_FILE))?;
    let runs = read_arff(&dir.join(RUNS_FILE))?;

    let scenario_id = desc.scenario_id.clone().unwrap_or_else(|| {
        dir.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    });

    // Feature table.
    let f_id = require_column(&features, "instance_id", FEATURES_FILE)?;
    let f_rep = features.column("repetition");
    let mut feature_cols = Vec::new();
    for (i, attr) in features.attributes.iter().enumerate() {
        if i == f_id || Some(i) == f_rep {
            continue;
        }
        match attr.kind {
            ref k if k.is_numeric() => feature_cols.push(i),
            AttributeType::Nominal(_) => {
                return Err(Error::InconsistentScenario(format!(
                    "nominal feature `{}` is not supported",
                    attr.name
                )))
            }
            _ => {
                return Err(Error::InconsistentScenario(format!(
                    "non-numeric feature `{}` is not supported",
                    attr.name
                )))
            }
        }
    }
    let feature_names: Vec<String> = feature_cols
        .iter()
        .map(|&i| features.attributes[i].name.clone())
        .collect();

    let mut feature_rows: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for row in &features.rows {
        if !repetition_is_first(row, f_rep) {
            continue;
        }
        let id = match &row[f_id] {
            Value::Text(s) => s.clone(),
            Value::Number(x) => x.to_string(),
            Value::Missing => {
                return Err(Error::InconsistentScenario(
                    "feature row without instance_id".into(),
                ))
            }
        };
        if !seen.insert(id.clone()) {
            return Err(Error::InconsistentScenario(format!(
                "duplicate feature row for instance `{id}`"
            )));
        }
        let values = feature_cols.iter().map(|&c| row[c].as_number()).collect();
        feature_rows.push((id, values));
    }

    // Run table.
    let r_id = require_column(&runs, "instance_id", RUNS_FILE)?;
    let r_alg = require_column(&runs, "algorithm", RUNS_FILE)?;
    let r_perf = require_column(&runs, &desc.performance_measure, RUNS_FILE)?;
    let r_status = require_column(&runs, "runstatus", RUNS_FILE)?;
    let r_rep = runs.column("repetition");

    let mut run_map: BTreeMap<String, BTreeMap<String, RunRecord>> = BTreeMap::new();
    for row in &runs.rows {
        if !repetition_is_first(row, r_rep) {
            continue;
        }
        let text = |v: &Value| match v {
            Value::Text(s) => Some(s.clone()),
            Value::Number(x) => Some(x.to_string()),
            Value::Missing => None,
        };
        let (Some(inst), Some(alg)) = (text(&row[r_id]), text(&row[r_alg])) else {
            return Err(Error::InconsistentScenario(
                "run row without instance_id or algorithm".into(),
            ));
        };
        let runstatus = row[r_status]
            .as_text()
            .map(RunStatus::from_label)
            .unwrap_or(RunStatus::Unknown);
        let performance = match (row[r_perf].as_number(), runstatus) {
            (Some(p), _) => p,
            (None, RunStatus::Ok) => {
                log::warn!("{scenario_id}: ok run ({inst}, {alg}) has no performance; dropped");
                continue;
            }
            // Never read for failed runs; they are penalized or excluded.
            (None, _) => desc.cutoff_time.unwrap_or(0.0),
        };
        run_map.entry(inst).or_default().insert(
            alg,
            RunRecord {
                performance,
                runstatus,
            },
        );
    }

    // Join on instance ids.
    let feature_ids: BTreeSet<&str> = feature_rows.iter().map(|(id, _)| id.as_str()).collect();
    let runs_only: Vec<String> = run_map
        .keys()
        .filter(|k| !feature_ids.contains(k.as_str()))
        .cloned()
        .collect();
    if !runs_only.is_empty() {
        log::warn!(
            "{scenario_id}: dropping {} instance(s) with runs but no features",
            runs_only.len()
        );
        for k in &runs_only {
            run_map.remove(k);
        }
    }
    let before = feature_rows.len();
    feature_rows.retain(|(id, _)| run_map.contains_key(id));
    if feature_rows.len() != before {
        log::warn!(
            "{scenario_id}: dropping {} instance(s) with features but no runs",
            before - feature_rows.len()
        );
    }
    if feature_rows.is_empty() {
        return Err(Error::InconsistentScenario(format!(
            "{scenario_id}: no instance appears in both {FEATURES_FILE} and {RUNS_FILE}"
        )));
    }

    let algorithms: Vec<String> = run_map
        .values()
        .flat_map(|m| m.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (instances, feature_values) = feature_rows.into_iter().unzip();

    let scenario = AslibScenario {
        scenario_id,
        instances,
        feature_names,
        feature_values,
        algorithms,
        runs: run_map,
        performance_measure_name: desc.performance_measure,
        maximize: desc.maximize,
        cutoff_time: desc.cutoff_time,
        performance_type: desc.performance_type,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// SHA-256 over the three required files, in a fixed order.
pub fn content_hash(dir: impl AsRef<Path>) -> Result<String> {
    let dir = dir.as_ref();
    let mut hasher = Sha256::new();
    for file in REQUIRED_FILES {
        let path = dir.join(file);
        let bytes = fs::read(&path).at(&path)?;
        hasher.update(file.as_bytes());
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Where and how scenarios are downloaded.
#[derive(Debug, Clone)]
pub struct FetchConfig {
    /// Contains `{scenario}` and `{file}` placeholders.
    pub url_template: String,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            url_template: DEFAULT_URL_TEMPLATE.into(),
            timeout: Duration::from_secs(60),
        }
    }
}

impl FetchConfig {
    pub fn url_for(&self, scenario: &str, file: &str) -> String {
        self.url_template
            .replace("{scenario}", scenario)
            .replace("{file}", file)
    }
}

/// Written next to downloaded files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheManifest {
    pub scenario: String,
    pub url_template: String,
    pub files: Vec<String>,
    pub fetched_at_unix: u64,
    pub content_hash: String,
}

/// `$METAXFER_CACHE` if set, otherwise `fallback`.
pub fn cache_dir_from_env(fallback: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.into())
}

pub fn is_cached(cache_dir: &Path, scenario: &str) -> bool {
    let dir = cache_dir.join(scenario);
    REQUIRED_FILES.iter().all(|f| dir.join(f).is_file())
}

/// Ensures `cache_dir/<scenario>` holds the three required files,
/// downloading whatever is missing. A warm cache never touches the network.
pub fn fetch_scenario(scenario: &str, cache_dir: &Path, config: &FetchConfig) -> Result<PathBuf> {
    if scenario.is_empty() || scenario.contains(['/', '\\']) || scenario.starts_with('.') {
        return Err(Error::UnknownScenario(scenario.into()));
    }
    let dir = cache_dir.join(scenario);
    if is_cached(cache_dir, scenario) {
        return Ok(dir);
    }
    fs::create_dir_all(&dir).at(&dir)?;
    let result = download_missing(scenario, &dir, config);
    if result.is_err() {
        // Only succeeds when nothing was downloaded.
        let _ = fs::remove_dir(&dir);
    }
    result
}

fn download_missing(scenario: &str, dir: &Path, config: &FetchConfig) -> Result<PathBuf> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(config.timeout))
        .build()
        .into();
    for file in REQUIRED_FILES {
        let target = dir.join(file);
        if target.is_file() {
            continue;
        }
        let url = config.url_for(scenario, file);
        log::info!("fetching {url}");
        let net = |reason: String| Error::Network {
            url: url.clone(),
            reason,
        };
        let mut response = agent.get(&url).call().map_err(|e| net(e.to_string()))?;
        let body = response
            .body_mut()
            .with_config()
            .limit(1 << 30)
            .read_to_vec()
            .map_err(|e| net(e.to_string()))?;
        let partial = dir.join(format!("{file}.part"));
        fs::write(&partial, &body).at(&partial)?;
        fs::rename(&partial, &target).at(&target)?;
    }

    for file in REQUIRED_FILES {
        if !dir.join(file).is_file() {
            return Err(Error::IncompleteScenario {
                dir: dir.to_path_buf(),
                file: file.into(),
            });
        }
    }
    let manifest = CacheManifest {
        scenario: scenario.into(),
        url_template: config.url_template.clone(),
        files: REQUIRED_FILES.iter().map(|s| s.to_string()).collect(),
        fetched_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        content_hash: content_hash(dir)?,
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, serde_json::to_vec_pretty(&manifest)?).at(&manifest_path)?;
    Ok(dir.to_path_buf())
}
