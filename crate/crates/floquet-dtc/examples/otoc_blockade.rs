//! Operator spreading from site 16 of Kagome21. The pumped sites 15 and 17
//! stop the front, so the far side stays close to 1.

use std::f64::consts::PI;

use floquet_dtc::circuit::{Cycle, FloquetParams};
use floquet_dtc::lattice::build_preset;
use floquet_dtc::statevector::otoc_at_sites;

fn main() -> floquet_dtc::Result<()> {
    let steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let lattice = build_preset("Kagome21")?;
    let cycles = vec![Cycle::build(&lattice, FloquetParams::ising(0.9 * PI)); steps];
    let js: Vec<usize> = (0..lattice.n_sites()).collect();
    let values = otoc_at_sites(lattice.n_sites(), &cycles, &js, 16)?;
    let pumped = lattice.charge_pump_set();
    println!("OTOC(j, k=16) after {steps} steps");
    for (j, v) in values.iter().enumerate() {
        let tag = if pumped.contains(&j) { "pumped" } else { "" };
        println!("{j:>3} {v:>8.4} {tag}");
    }
    Ok(())
}
