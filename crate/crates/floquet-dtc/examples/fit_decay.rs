//! Fit single and double exponentials to the decaying envelope of a noisy
//! Square16 run.

use std::f64::consts::PI;

use floquet_dtc::circuit::FloquetParams;
use floquet_dtc::ensemble::{run_ensemble, EnsembleSpec, Observable};
use floquet_dtc::fitting::{fit_double_exp, fit_single_exp, DecaySeries};
use floquet_dtc::lattice::build_preset;

fn main() -> floquet_dtc::Result<()> {
    let lattice = build_preset("Square16")?;
    let series = run_ensemble(&EnsembleSpec {
        lattice: &lattice,
        params: FloquetParams::ising(0.9 * PI),
        p: 0.05,
        n_steps: 30,
        n_traj: 32,
        observables: vec![Observable::ZAverage(lattice.region("all")?)],
        seed: 1,
        n_shots: None,
    })?;
    let z = &series.series[0];
    let magnitude: Vec<f64> = z.mean.iter().map(|v| v.abs().max(1e-9)).collect();
    let data = DecaySeries::new(magnitude);
    let single = fit_single_exp(&data)?;
    let double = fit_double_exp(&data)?;
    println!(
        "single: eta = {:.4} (residual {:.3e})",
        single.eta, single.residual
    );
    println!(
        "double: {:.3} * {:.4}^n + {:.3} * {:.4}^n (residual {:.3e})",
        double.alpha1, double.eta1, double.alpha2, double.eta2, double.residual
    );
    Ok(())
}
