//! One kicked-Ising cycle as a gate list, and what it costs in native gates.

use std::f64::consts::PI;

use floquet_dtc::circuit::{native_gate_count, Cycle, FloquetParams};
use floquet_dtc::lattice::build_preset;

fn main() -> floquet_dtc::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "Lieb21".into());
    let lattice = build_preset(&name)?;
    let cycle = Cycle::build(&lattice, FloquetParams::ising(0.9 * PI));
    for m in [3, 4] {
        println!(
            "# {name}: {} native two-qubit gates at {m} per bond",
            native_gate_count(&lattice, m)?
        );
    }
    print!("{}", cycle.to_text());
    Ok(())
}
