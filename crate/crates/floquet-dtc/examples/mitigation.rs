//! From a CNOT error rate to the sign-flip probability, and how a
//! reference run undoes global depolarizing decay.

use floquet_dtc::calibration::NoiseCalibration;
use floquet_dtc::mitigation::{mitigate, synth_depolarize};

fn main() -> floquet_dtc::Result<()> {
    for eps in [0.004, 0.01, 0.02] {
        let c = NoiseCalibration::from_gates(eps, 3, 3)?;
        println!("eps_cnot {eps:<6} eta {:.4}  q {:.4}  p {:.4}", c.eta, c.q, c.p);
    }
    let ideal: Vec<f64> = (0..12).map(|n| if n % 2 == 0 { 0.9f64 } else { -0.9 }).collect();
    let raw = synth_depolarize(&ideal, 0.95)?;
    let reference = synth_depolarize(&vec![1.0; ideal.len()], 0.95)?;
    for (n, (r, m)) in raw.iter().zip(mitigate(&raw, &reference)?).enumerate() {
        println!("{n:>2} raw {r:+.4}  mitigated {:+.4}", m.unwrap_or(f64::NAN));
    }
    Ok(())
}
