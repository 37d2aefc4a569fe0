//! Runs one Normal cell and one transfer cell through the experiment
//! harness and prints the JSON summary.
//!
//!     cargo run --example run_cell -- [RESULTS_DIR]

use metaxfer::experiment::{Experiment, ExperimentSpec, Mode, RunProtocol, ScenarioSet};
use metaxfer::synthetic::synthetic_suite;
use metaxfer::transfer::FreezeLevel;

fn main() -> metaxfer::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let mut set = ScenarioSet::new();
    for s in synthetic_suite(0).into_iter().take(2) {
        let dir = s.write_to(scratch.path())?;
        set.load_dir(&s.name, &dir)?;
    }
    let mut protocol = RunProtocol::new(set.shared_k()?);
    protocol.repetitions = 3;
    protocol.hidden = [32, 16];
    protocol.train.epochs = 60;

    let experiment = Experiment::with_jobs(set, 0);
    let normal = ExperimentSpec {
        target: "SYN-A".into(),
        mode: Mode::Normal,
        protocol: protocol.clone(),
    };
    let summary = experiment.run_cell(&normal)?;
    print!("{}", summary.to_json()?);

    let mode = Mode::Transfer {
        source: "SYN-B".into(),
        freeze: FreezeLevel::First,
    };
    let xfer = experiment.run_cell(&ExperimentSpec { mode, ..normal })?;
    println!(
        "transfer {}: acc {:.3} ± {:.3}, loss {:.3} ± {:.3}",
        xfer.spec.mode.label(),
        xfer.mean_acc,
        xfer.std_acc,
        xfer.mean_loss,
        xfer.std_loss
    );
    if let Some(dir) = std::env::args().nth(1) {
        println!("wrote {}", summary.write(dir.as_ref())?.display());
        println!("wrote {}", xfer.write(dir.as_ref())?.display());
    }
    Ok(())
}
