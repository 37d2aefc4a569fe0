//! Downloads ASlib scenarios into a local cache (needs network access).
//!
//!     cargo run --example fetch_scenario -- CACHE_DIR NAME...

use std::path::PathBuf;

use metaxfer::aslib::{content_hash, fetch_scenario, FetchConfig};

fn main() -> metaxfer::Result<()> {
    let mut args = std::env::args().skip(1);
    let cache = PathBuf::from(args.next().unwrap_or_else(|| "aslib_cache".into()));
    let names: Vec<String> = args.collect();
    let names = if names.is_empty() {
        vec!["CSP-2010".to_string()]
    } else {
        names
    };
    let config = FetchConfig::default();
    for name in names {
        let dir = fetch_scenario(&name, &cache, &config)?;
        println!("{name}: {} ({})", dir.display(), content_hash(&dir)?);
    }
    Ok(())
}
