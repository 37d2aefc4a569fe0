//! Meta-datasets built from ASlib scenarios, plus the preprocessing chain:
//! label derivation, median imputation, min-max scaling, ANOVA-F
//! Select-K-Best and a stratified hold-out split.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aslib::{AslibScenario, RunStatus};
use crate::error::{Error, IoContext, Result};
use crate::matrix::Matrix;

/// Failed runs cost this many cutoffs when minimizing (PAR10).
pub const PAR_FACTOR: f64 = 10.0;
pub const MIN_INSTANCES: usize = 10;
pub const MIN_CLASS_SIZE: usize = 2;

/// Returned by [`anova_f`] for a feature that separates the classes perfectly.
pub const F_SENTINEL: f64 = f64::MAX;

/// A labeled meta-dataset before imputation and scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMetaDataset {
    pub name: String,
    pub instances: Vec<String>,
    pub x: Vec<Vec<Option<f64>>>,
    pub y: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl RawMetaDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.y, self.n_classes())
    }

    pub fn select_rows(&self, rows: &[usize]) -> (Vec<Vec<Option<f64>>>, Vec<usize>) {
        (
            rows.iter().map(|&i| self.x[i].clone()).collect(),
            rows.iter().map(|&i| self.y[i]).collect(),
        )
    }
}

/// A dense, fully numeric meta-dataset ready for training.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaDataset {
    pub name: String,
    pub x: Matrix,
    pub y: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl MetaDataset {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

pub fn class_counts(y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &c in y {
        counts[c] += 1;
    }
    counts
}

fn degenerate(name: &str, reason: String) -> Error {
    Error::DegenerateDataset {
        name: name.into(),
        reason,
    }
}

/// Labels every instance with the algorithm that optimizes the scenario's
/// performance measure.
pub fn derive_labels(scenario: &AslibScenario) -> Result<RawMetaDataset> {
    let penalty = match (scenario.maximize, scenario.cutoff_time) {
        (false, Some(cutoff)) => Some(PAR_FACTOR * cutoff),
        _ => None,
    };

    let mut labeled: Vec<(usize, &str)> = Vec::new();
    for (row, inst) in scenario.instances.iter().enumerate() {
        let Some(runs) = scenario.runs.get(inst) else {
            continue;
        };
        if !runs.values().any(|r| r.runstatus == RunStatus::Ok) {
            continue;
        }
        let mut best: Option<(&str, f64)> = None;
        // `algorithms` is sorted, so strict improvement keeps the smallest id on ties.
        for alg in &scenario.algorithms {
            let Some(run) = runs.get(alg) else { continue };
            let value = match (run.runstatus, penalty) {
                (RunStatus::Ok, _) => run.performance,
                (_, Some(p)) => p,
                (_, None) => continue,
            };
            let better = match best {
                None => true,
                Some((_, b)) if scenario.maximize => value > b,
                Some((_, b)) => value < b,
            };
            if better {
                best = Some((alg, value));
            }
        }
        if let Some((alg, _)) = best {
            labeled.push((row, alg));
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, alg) in &labeled {
        *counts.entry(alg).or_default() += 1;
    }
    let dropped: Vec<&str> = counts
        .iter()
        .filter(|(_, &n)| n < MIN_CLASS_SIZE)
        .map(|(a, _)| *a)
        .collect();
    if !dropped.is_empty() {
        log::warn!(
            "{}: dropping rare classes {:?} with fewer than {MIN_CLASS_SIZE} instances",
            scenario.scenario_id,
            dropped
        );
    }
    counts.retain(|_, n| *n >= MIN_CLASS_SIZE);
    labeled.retain(|(_, alg)| counts.contains_key(alg));

    let class_names: Vec<String> = counts.keys().map(|s| s.to_string()).collect();
    if class_names.len() < 2 {
        return Err(degenerate(
            &scenario.scenario_id,
            format!("{} class(es) survive label derivation", class_names.len()),
        ));
    }
    if labeled.len() < MIN_INSTANCES {
        return Err(degenerate(
            &scenario.scenario_id,
            format!("{} instance(s) survive label derivation", labeled.len()),
        ));
    }

    let class_index = |alg: &str| {
        class_names
            .binary_search_by(|c| c.as_str().cmp(alg))
            .unwrap()
    };
    Ok(RawMetaDataset {
        name: scenario.scenario_id.clone(),
        instances: labeled
            .iter()
            .map(|(r, _)| scenario.instances[*r].clone())
            .collect(),
        x: labeled
            .iter()
            .map(|(r, _)| scenario.feature_values[*r].clone())
            .collect(),
        y: labeled.iter().map(|(_, a)| class_index(a)).collect(),
        feature_names: scenario.feature_names.clone(),
        class_names,
    })
}

/// One-way ANOVA F statistic of `column` grouped by `y`.
///
/// A constant column scores 0. A column with zero within-group spread but
/// nonzero between-group spread scores [`F_SENTINEL`].
pub fn anova_f(column: &[f64], y: &[usize]) -> Result<f64> {
    if column.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: column.len(),
        });
    }
    let n_groups = y.iter().max().map_or(0, |m| m + 1);
    let mut sums = vec![0.0; n_groups];
    let mut counts = vec![0usize; n_groups];
    for (&x, &g) in column.iter().zip(y) {
        sums[g] += x;
        counts[g] += 1;
    }
    let present = counts.iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::InsufficientGroups);
    }
    if column.iter().all(|&x| x == column[0]) {
        return Ok(0.0);
    }

    let n = column.len() as f64;
    let grand = sums.iter().sum::<f64>() / n;
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let between: f64 = means
        .iter()
        .zip(&counts)
        .map(|(m, &c)| c as f64 * (m - grand).powi(2))
        .sum();
    let within: f64 = column
        .iter()
        .zip(y)
        .map(|(&x, &g)| (x - means[g]).powi(2))
        .sum();

    let total = between + within;
    if total == 0.0 {
        return Ok(0.0);
    }
    // Rounding in the group means leaves a residue when groups are constant.
    if within <= total * 1e-14 {
        return Ok(F_SENTINEL);
    }
    let df_between = (present - 1) as f64;
    let df_within = n - present as f64;
    Ok((between / df_between) / (within / df_within))
}

/// Parameters fitted on a training partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPreprocessor {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub median: Vec<f64>,
    /// Sorted ascending.
    pub selected_indices: Vec<usize>,
    pub f_scores: Vec<f64>,
}

impl FittedPreprocessor {
    pub fn n_inputs(&self) -> usize {
        self.min.len()
    }

    pub fn k(&self) -> usize {
        self.selected_indices.len()
    }

    fn scale(&self, j: usize, v: Option<f64>) -> f64 {
        let v = v.unwrap_or(self.median[j]);
        let range = self.max[j] - self.min[j];
        if range > 0.0 {
            ((v - self.min[j]) / range).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn check_width(x: &[Vec<Option<f64>>], d: usize) -> Result<()> {
    match x.iter().find(|r| r.len() != d) {
        Some(r) => Err(Error::DimensionMismatch {
            expected: d,
            got: r.len(),
        }),
        None => Ok(()),
    }
}

pub fn fit_preprocessor(
    x_train: &[Vec<Option<f64>>],
    y_train: &[usize],
    k: usize,
) -> Result<FittedPreprocessor> {
    if x_train.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    if x_train.len() != y_train.len() {
        return Err(Error::DimensionMismatch {
            expected: x_train.len(),
            got: y_train.len(),
        });
    }
    let d = x_train[0].len();
    check_width(x_train, d)?;
    if k > d {
        return Err(Error::KTooLarge { k, d });
    }

    let mut p = FittedPreprocessor {
        min: Vec::with_capacity(d),
        max: Vec::with_capacity(d),
        median: Vec::with_capacity(d),
        selected_indices: Vec::new(),
        f_scores: Vec::with_capacity(d),
    };
    for j in 0..d {
        let mut present: Vec<f64> = x_train.iter().filter_map(|r| r[j]).collect();
        let med = median(&mut present);
        let imputed: Vec<f64> = x_train.iter().map(|r| r[j].unwrap_or(med)).collect();
        let lo = imputed.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = imputed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        p.median.push(med);
        p.min.push(lo);
        p.max.push(hi);
        let scaled: Vec<f64> = imputed.iter().map(|&v| p.scale(j, Some(v))).collect();
        p.f_scores.push(anova_f(&scaled, y_train)?);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| p.f_scores[b].total_cmp(&p.f_scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    p.selected_indices = order;
    Ok(p)
}

/// Imputes, scales into `[0, 1]` and keeps the selected columns.
pub fn apply_preprocessor(p: &FittedPreprocessor, x: &[Vec<Option<f64>>]) -> Result<Matrix> {
    check_width(x, p.n_inputs())?;
    let k = p.k();
    let mut out = Matrix::zeros(x.len(), k);
    for (i, row) in x.iter().enumerate() {
        for (o, &j) in p.selected_indices.iter().enumerate() {
            out[(i, o)] = p.scale(j, row[j]);
        }
    }
    Ok(out)
}

/// Smallest feature count across the datasets.
pub fn choose_k<I>(feature_counts: I) -> Result<usize>
where
    I: IntoIterator<Item = usize>,
{
    feature_counts
        .into_iter()
        .min()
        .ok_or(Error::EmptyCollection)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Number of test rows drawn from a class of `n` members.
pub fn stratum_test_count(n: usize, test_fraction: f64) -> usize {
    ((test_fraction * n as f64).round() as usize).clamp(1, n - 1)
}

/// Per-class hold-out split. Both index lists come back sorted.
pub fn stratified_split<R: Rng + ?Sized>(
    y: &[usize],
    test_fraction: f64,
    rng: &mut R,
) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n_classes = y.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in y.iter().enumerate() {
        members[c].push(i);
    }
    let mut test_rows = Vec::new();
    for (class, rows) in members.iter_mut().enumerate() {
        match rows.len() {
            0 => continue,
            count @ 1 => return Err(Error::ClassTooSmall { class, count }),
            n => {
                let t = stratum_test_count(n, test_fraction);
                rows.shuffle(rng);
                test_rows.extend_from_slice(&rows[..t]);
            }
        }
    }
    test_rows.sort_unstable();
    let mut is_test = vec![false; y.len()];
    for &i in &test_rows {
        is_test[i] = true;
    }
    let train_rows = (0..y.len()).filter(|&i| !is_test[i]).collect();
    Ok(SplitIndices {
        train_rows,
        test_rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub name: String,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub preprocessor: Option<FittedPreprocessor>,
}

/// Writes `<dir>/<name>.csv` (features then an integer `label` column) and
/// `<dir>/<name>.json`. Returns both paths.
pub fn save_dataset(
    data: &MetaDataset,
    preprocessor: Option<&FittedPreprocessor>,
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).at(dir)?;
    let csv_path = dir.join(format!("{}.csv", data.name));
    let json_path = dir.join(format!("{}.json", data.name));

    let csv_err = |e: csv::Error| Error::Io {
        path: csv_path.clone(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(&csv_path).map_err(csv_err)?;
    let mut header: Vec<&str> = data.feature_names.iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header).map_err(csv_err)?;
    for (i, &label) in data.y.iter().enumerate() {
        let mut record: Vec<String> = data.x.row(i).iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().at(&csv_path)?;

    let sidecar = DatasetSidecar {
        name: data.name.clone(),
        feature_names: data.feature_names.clone(),
        class_names: data.class_names.clone(),
        preprocessor: preprocessor.cloned(),
    };
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?).at(&json_path)?;
    Ok((csv_path, json_path))
}

pub fn load_dataset(csv_path: &Path, json_path: &Path) -> Result<(MetaDataset, DatasetSidecar)> {
    let sidecar: DatasetSidecar = serde_json::from_slice(&fs::read(json_path).at(json_path)?)?;
    let csv_err = |e: csv::Error| Error::Io {
        path: csv_path.to_path_buf(),
        source: e.into(),
    };
    let mut r = csv::Reader::from_path(csv_path).map_err(csv_err)?;
    let d = sidecar.feature_names.len();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != d + 1 {
            return Err(Error::DimensionMismatch {
                expected: d + 1,
                got: rec.len(),
            });
        }
        let bad = |s: &str| Error::UnparsableValue {
            key: csv_path.display().to_string(),
            value: s.into(),
        };
        let row = rec
            .iter()
            .take(d)
            .map(|s| s.parse::<f64>().map_err(|_| bad(s)))
            .collect::<Result<Vec<_>>>()?;
        let label: usize = rec[d].parse().map_err(|_| bad(&rec[d]))?;
        if label >= sidecar.class_names.len() {
            return Err(bad(&rec[d]));
        }
        rows.push(row);
        y.push(label);
    }
    let x = if rows.is_empty() {
        Matrix::zeros(0, d)
    } else {
        Matrix::from_rows(&rows).expect("row widths checked above")
    };
    Ok((
        MetaDataset {
            name: sidecar.name.clone(),
            x,
            y,
            feature_names: sidecar.feature_names.clone(),
            class_names: sidecar.class_names.clone(),
        },
        sidecar,
    ))
}
