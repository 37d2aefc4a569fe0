//! Loads one ASlib scenario directory and derives its labels.
//!
//!     cargo run --example load_scenario -- DIR

use metaxfer::aslib::load_scenario;
use metaxfer::dataset::derive_labels;
use metaxfer::synthetic::SyntheticScenario;

fn main() -> metaxfer::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let dir = match std::env::args().nth(1) {
        Some(d) => d.into(),
        None => SyntheticScenario::new("demo").write_to(scratch.path())?,
    };
    let scenario = load_scenario(&dir)?;
    println!(
        "{}: {} instances, {} algorithms, {} features, measure {} ({})",
        scenario.scenario_id,
        scenario.instances.len(),
        scenario.algorithms.len(),
        scenario.feature_names.len(),
        scenario.performance_measure_name,
        if scenario.maximize {
            "maximize"
        } else {
            "minimize"
        },
    );
    let data = derive_labels(&scenario)?;
    println!("{} labeled instances", data.len());
    for (name, count) in data.class_names.iter().zip(data.class_counts()) {
        println!("  {name:<32} {count}");
    }
    Ok(())
}
