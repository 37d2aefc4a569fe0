//! The `metaxfer` command line: `fetch`, `inspect`, `run` and `reproduce`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::aslib::{self, FetchConfig, DEFAULT_URL_TEMPLATE};
use crate::dataset::{
    apply_preprocessor, derive_labels, fit_preprocessor, save_dataset, MetaDataset,
};
use crate::error::{Error, Result};
use crate::experiment::{
    Experiment, ExperimentSpec, Mode, RunProtocol, ScenarioSet, SplitProtocol,
};
use crate::nn::TrainConfig;
use crate::reference::CSP_SCENARIOS;
use crate::transfer::FreezeLevel;

/// Normal-mode accuracies within this distance of the published ones are
/// reported as reproduced.
pub const REPRODUCTION_TOLERANCE: f64 = 0.08;

#[derive(Debug, Parser)]
#[command(
    name = "metaxfer",
    version,
    about = "Meta-level transfer learning on ASlib scenarios"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Scenario cache; holds one directory per scenario.
    #[arg(long, global = true, env = aslib::CACHE_ENV, default_value = "aslib_cache")]
    pub cache_dir: PathBuf,
    #[arg(
        long,
        global = true,
        env = "METAXFER_RESULTS",
        default_value = "results"
    )]
    pub results_dir: PathBuf,
    /// Download URL with `{scenario}` and `{file}` placeholders.
    #[arg(long, global = true, default_value = DEFAULT_URL_TEMPLATE)]
    pub url_template: String,
    /// Never download; use only the cache.
    #[arg(long, global = true)]
    pub offline: bool,
    /// Scenario set that fixes K and the reproduction grid.
    #[arg(long, global = true, value_delimiter = ',', default_values_t = CSP_SCENARIOS.map(String::from))]
    pub scenarios: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = crate::experiment::DEFAULT_REPETITIONS,
          value_parser = parse_reps)]
    pub reps: usize,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    /// Hidden layer widths as `H1,H2`.
    #[arg(long, global = true, default_value = "64,32", value_parser = parse_hidden)]
    pub hidden: [usize; 2],
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Reuse one split per target instead of a fresh split per repetition.
    #[arg(long, global = true)]
    pub fixed_split: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Download scenarios into the cache.
    Fetch {
        /// Defaults to the configured scenario set.
        names: Vec<String>,
    },
    /// Print instance, feature and class counts of a cached scenario.
    Inspect {
        name: String,
        /// Also write the preprocessed meta-dataset as CSV + JSON here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run one cell and write its JSON summary.
    Run {
        target: String,
        #[arg(long, requires = "freeze")]
        source: Option<String>,
        /// Number of frozen hidden layers.
        #[arg(long, requires = "source", value_parser = clap::value_parser!(u8).range(0..=2))]
        freeze: Option<u8>,
    },
    /// Run the full grid over the scenario set and render the tables.
    Reproduce,
}

fn parse_reps(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_hidden(s: &str) -> std::result::Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err("expected two comma-separated widths".into());
    };
    let width = |v: &str| match v.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("`{v}` is not a positive width")),
        Ok(n) => Ok(n),
    };
    Ok([width(a)?, width(b)?])
}

impl CliConfig {
    fn fetch_config(&self) -> FetchConfig {
        FetchConfig {
            url_template: self.url_template.clone(),
            timeout: Duration::from_secs(120),
        }
    }

    fn train_config(&self) -> Result<TrainConfig> {
        let defaults = TrainConfig::default();
        let config = TrainConfig {
            learning_rate: self.lr.unwrap_or(defaults.learning_rate),
            epochs: self.epochs.unwrap_or(defaults.epochs),
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            seed: self.seed,
            ..defaults
        };
        config.validate()?;
        Ok(config)
    }

    fn protocol(&self, k: usize) -> Result<RunProtocol> {
        let protocol = RunProtocol {
            repetitions: self.reps,
            base_seed: self.seed,
            train: self.train_config()?,
            hidden: self.hidden,
            k,
            split: if self.fixed_split {
                SplitProtocol::Fixed
            } else {
                SplitProtocol::PerRepetition
            },
            ..RunProtocol::new(k)
        };
        protocol.validate()?;
        Ok(protocol)
    }

    fn scenario_set(&self, extra: &[&str]) -> Result<ScenarioSet> {
        let mut names = self.scenarios.clone();
        for name in extra {
            if !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        }
        let fetch = self.fetch_config();
        ScenarioSet::from_cache(&self.cache_dir, &names, (!self.offline).then_some(&fetch))
    }

    fn experiment(&self, scenarios: ScenarioSet) -> Experiment {
        Experiment::with_jobs(scenarios, self.jobs).with_model_dir(self.results_dir.join("models"))
    }
}

pub fn cmd_fetch(config: &CliConfig, names: &[String], out: &mut impl Write) -> Result<()> {
    let names = if names.is_empty() {
        &config.scenarios[..]
    } else {
        names
    };
    let fetch = config.fetch_config();
    let mut failures = 0;
    for name in names {
        let result = if config.offline {
            if aslib::is_cached(&config.cache_dir, name) {
                Ok(config.cache_dir.join(name))
            } else {
                Err(Error::UnknownScenario(name.clone()))
            }
        } else {
            aslib::fetch_scenario(name, &config.cache_dir, &fetch)
        };
        match result {
            Ok(dir) => writeln!(out, "{name}: {}", dir.display()).ok(),
            Err(e) => {
                failures += 1;
                writeln!(out, "{name}: FAILED ({e})").ok()
            }
        };
    }
    if failures > 0 {
        return Err(Error::InvalidConfig(format!(
            "{failures} scenario(s) could not be fetched"
        )));
    }
    Ok(())
}

pub fn cmd_inspect(
    config: &CliConfig,
    name: &str,
    export: Option<&PathBuf>,
    out: &mut impl Write,
) -> Result<()> {
    if !aslib::is_cached(&config.cache_dir, name) {
        return Err(Error::UnknownScenario(format!(
            "{name} (not in cache {})",
            config.cache_dir.display()
        )));
    }
    let scenario = aslib::load_scenario(config.cache_dir.join(name))?;
    let d = scenario.feature_names.len();
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").ok();
    w(out, format!("scenario: {}", scenario.scenario_id));
    w(out, format!("instances: {}", scenario.instances.len()));
    w(out, format!("algorithms: {}", scenario.algorithms.len()));
    w(out, format!("features: {d}"));
    w(
        out,
        format!(
            "performance: {} ({}), cutoff: {}",
            scenario.performance_measure_name,
            if scenario.maximize {
                "maximize"
            } else {
                "minimize"
            },
            scenario
                .cutoff_time
                .map_or("none".to_string(), |c| c.to_string())
        ),
    );

    let labeled = derive_labels(&scenario);
    match &labeled {
        Ok(data) => {
            w(out, format!("labeled instances: {}", data.len()));
            w(out, format!("classes: {}", data.n_classes()));
            for (class, count) in data.class_names.iter().zip(data.class_counts()) {
                w(out, format!("  {class}: {count}"));
            }
            w(out, "k_eligible: yes".into());
        }
        Err(e) => {
            w(out, format!("k_eligible: no ({e})"));
        }
    }

    let cached_counts: Vec<(String, usize)> = config
        .scenarios
        .iter()
        .filter(|n| aslib::is_cached(&config.cache_dir, n))
        .filter_map(|n| {
            aslib::load_scenario(config.cache_dir.join(n))
                .ok()
                .map(|s| (n.clone(), s.feature_names.len()))
        })
        .chain(std::iter::once((name.to_string(), d)))
        .collect();
    let k = crate::dataset::choose_k(cached_counts.iter().map(|(_, c)| *c))?;
    let mut names: Vec<&str> = cached_counts.iter().map(|(n, _)| n.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    w(out, format!("shared_k: {k} (over {})", names.join(", ")));

    if let Some(dir) = export {
        let data = labeled?;
        let pre = fit_preprocessor(&data.x, &data.y, k)?;
        let x = apply_preprocessor(&pre, &data.x)?;
        let dataset = MetaDataset {
            name: data.name.clone(),
            x,
            y: data.y.clone(),
            feature_names: pre
                .selected_indices
                .iter()
                .map(|&j| data.feature_names[j].clone())
                .collect(),
            class_names: data.class_names.clone(),
        };
        let (csv, json) = save_dataset(&dataset, Some(&pre), dir)?;
        w(
            out,
            format!("exported: {} {}", csv.display(), json.display()),
        );
    }
    Ok(())
}

pub fn cmd_run(
    config: &CliConfig,
    target: &str,
    transfer: Option<(&str, FreezeLevel)>,
    out: &mut impl Write,
) -> Result<PathBuf> {
    let mut extra = vec![target];
    if let Some((source, _)) = transfer {
        extra.push(source);
    }
    let scenarios = config.scenario_set(&extra)?;
    let protocol = config.protocol(scenarios.shared_k()?)?;
    let spec = ExperimentSpec {
        target: target.into(),
        mode: match transfer {
            None => Mode::Normal,
            Some((source, freeze)) => Mode::Transfer {
                source: source.into(),
                freeze,
            },
        },
        protocol,
    };
    let summary = config.experiment(scenarios).run_cell(&spec)?;
    let path = summary.write(&config.results_dir)?;
    writeln!(
        out,
        "{} [{}]: acc {:.4} ± {:.4}, loss {:.4} ± {:.4} over {} run(s) -> {}",
        spec.target,
        spec.mode.label(),
        summary.mean_acc,
        summary.std_acc,
        summary.mean_loss,
        summary.std_loss,
        summary.runs.len(),
        path.display()
    )
    .ok();
    Ok(path)
}

pub fn cmd_reproduce(config: &CliConfig, out: &mut impl Write) -> Result<()> {
    let scenarios = config.scenario_set(&[])?;
    let protocol = config.protocol(scenarios.shared_k()?)?;
    let names = scenarios.names().to_vec();
    let table = config
        .experiment(scenarios)
        .run_table(&names, &names, &protocol)?;
    table.write(&config.results_dir)?;
    writeln!(out, "{}", table.render_markdown()).ok();
    for d in table.normal_deltas() {
        writeln!(
            out,
            "normal {}: ours {:.3}, published {:.2}, delta {:+.3} ({})",
            d.target,
            d.ours,
            d.published,
            d.delta(),
            if d.delta().abs() <= REPRODUCTION_TOLERANCE {
                "within tolerance"
            } else {
                "outside tolerance"
            }
        )
        .ok();
    }
    writeln!(out, "tables written to {}", config.results_dir.display()).ok();
    Ok(())
}

/// Runs a parsed command line; errors are printed to stderr.
pub fn execute(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let config = &cli.config;
    match &cli.command {
        Command::Fetch { names } => cmd_fetch(config, names, out),
        Command::Inspect { name, export } => cmd_inspect(config, name, export.as_ref(), out),
        Command::Run {
            target,
            source,
            freeze,
        } => {
            let transfer = match (source, freeze) {
                (Some(s), Some(f)) => Some((s.as_str(), FreezeLevel::try_from(*f)?)),
                _ => None,
            };
            cmd_run(config, target, transfer, out).map(|_| ())
        }
        Command::Reproduce => cmd_reproduce(config, out),
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
