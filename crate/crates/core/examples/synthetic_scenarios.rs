//! Writes the four-scenario synthetic suite in ASlib layout.
//!
//!     cargo run --example synthetic_scenarios -- [OUT_DIR] [SEED]

use std::path::PathBuf;

use metaxfer::synthetic::synthetic_suite;

fn main() -> metaxfer::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "aslib_cache".into()));
    let seed = args
        .next()
        .map_or(0, |s| s.parse().expect("seed must be an integer"));
    for scenario in synthetic_suite(seed) {
        let dir = scenario.write_to(&out)?;
        println!(
            "{}: {} instances, {} algorithms, {} features -> {}",
            scenario.name,
            scenario.instances,
            scenario.algorithms,
            scenario.n_features(),
            dir.display()
        );
    }
    Ok(())
}
