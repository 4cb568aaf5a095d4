//! Run a JSON configuration as the `simulate` subcommand would, printing the
//! series instead of writing files.
//!
//! `cargo run --release --example run_config -- configs/kagome19_p0.2.json`

use std::path::PathBuf;

use floquet_dtc::config::load_config;
use floquet_dtc::ensemble::run_ensemble;

fn main() -> floquet_dtc::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/lieb21_boundary.json"
        ))
    });
    let cfg = load_config(&path)?;
    let lattice = cfg.build_lattice()?;
    let series = run_ensemble(&cfg.ensemble_spec(&lattice)?)?;
    series.write_series_csv(std::io::stdout().lock())
}
