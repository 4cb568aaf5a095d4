//! Noiseless kicked Ising on Lieb21: the rim keeps its period-doubled
//! magnetization long after the bulk has melted.

use std::f64::consts::PI;

use floquet_dtc::circuit::{Cycle, FloquetParams};
use floquet_dtc::ensemble::region_average;
use floquet_dtc::lattice::build_preset;
use floquet_dtc::statevector::StateVector;

fn main() -> floquet_dtc::Result<()> {
    let lattice = build_preset("Lieb21")?;
    let (boundary, bulk) = (lattice.region("boundary")?, lattice.region("bulk")?);
    let cycle = Cycle::build(&lattice, FloquetParams::ising(0.9 * PI));
    let mut psi = StateVector::zero(lattice.n_sites())?;
    println!("step  boundary      bulk");
    for n in 0..=50 {
        if n % 5 == 0 {
            let z = psi.z_expectations();
            println!(
                "{n:>4}  {:>8.4}  {:>8.4}",
                region_average(&z, &boundary)?,
                region_average(&z, &bulk)?
            );
        }
        psi.apply_cycle(&cycle)?;
    }
    Ok(())
}
