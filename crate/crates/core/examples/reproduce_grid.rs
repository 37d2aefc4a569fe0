//! The full Normal + transfer grid over the synthetic suite, rendered as
//! Markdown and CSV.
//!
//!     cargo run --release --example reproduce_grid -- [RESULTS_DIR]

use metaxfer::experiment::{Experiment, RunProtocol, ScenarioSet};
use metaxfer::synthetic::synthetic_suite;

fn main() -> metaxfer::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let mut set = ScenarioSet::new();
    for s in synthetic_suite(0) {
        let dir = s.write_to(scratch.path())?;
        set.load_dir(&s.name, &dir)?;
    }
    let mut protocol = RunProtocol::new(set.shared_k()?);
    protocol.repetitions = 5;
    protocol.hidden = [32, 16];
    protocol.train.epochs = 80;

    let names = set.names().to_vec();
    let table = Experiment::with_jobs(set, 0).run_table(&names, &names, &protocol)?;
    println!("{}", table.render_markdown());
    print!("{}", table.render_csv());
    if let Some(dir) = std::env::args().nth(1) {
        table.write(dir.as_ref())?;
        println!("tables written to {dir}");
    }
    Ok(())
}
