//! Print every built-in lattice with its gate layers and ancilla groups.

use floquet_dtc::lattice::Preset;

fn main() -> floquet_dtc::Result<()> {
    println!(
        "{:<13} {:>5} {:>5} {:>6} {:>6} {:>8}  pumped sites",
        "preset", "sites", "bonds", "layers", "groups", "boundary"
    );
    for preset in Preset::ALL {
        let l = preset.build()?;
        println!(
            "{:<13} {:>5} {:>5} {:>6} {:>6} {:>8}  {:?}",
            preset.name(),
            l.n_sites(),
            l.n_edges(),
            l.n_layers(),
            l.n_ancillas(),
            l.boundary_sites().len(),
            l.charge_pump_set()
        );
    }
    Ok(())
}
