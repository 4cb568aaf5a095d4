//! Global-depolarizing mitigation: divide a raw series by the magnitude of a
//! reference run whose ideal value has unit modulus.

use crate::error::{Error, Result};

/// References below this magnitude mark a step invalid instead of being
/// divided by.
pub const REFERENCE_FLOOR: f64 = 1e-3;

/// A raw series with its reference run and optional per-step errors.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredSeries {
    pub steps: Vec<usize>,
    pub raw: Vec<f64>,
    pub reference: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

/// Mitigated values; `None` where the reference fell below the floor.
#[derive(Clone, Debug, PartialEq)]
pub struct MitigatedSeries {
    pub steps: Vec<usize>,
    pub values: Vec<Option<f64>>,
    pub stderr: Option<Vec<Option<f64>>>,
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// `raw_n / |reference_n|`, or `None` where `|reference_n| < floor`.
pub fn mitigate_with_floor(raw: &[f64], reference: &[f64], floor: f64) -> Result<Vec<Option<f64>>> {
    same_len(raw.len(), reference.len())?;
    Ok(raw
        .iter()
        .zip(reference)
        .map(|(&r, &f)| (f.abs() >= floor).then(|| r / f.abs()))
        .collect())
}

pub fn mitigate(raw: &[f64], reference: &[f64]) -> Result<Vec<Option<f64>>> {
    mitigate_with_floor(raw, reference, REFERENCE_FLOOR)
}

impl MeasuredSeries {
    pub fn mitigate(&self) -> Result<MitigatedSeries> {
        same_len(self.steps.len(), self.raw.len())?;
        let values = mitigate(&self.raw, &self.reference)?;
        let stderr = match &self.stderr {
            None => None,
            Some(s) => {
                same_len(s.len(), self.raw.len())?;
                Some(
                    s.iter()
                        .zip(&self.reference)
                        .zip(&values)
                        .map(|((&e, &f), v)| v.map(|_| e / f.abs()))
                        .collect(),
                )
            }
        };
        Ok(MitigatedSeries {
            steps: self.steps.clone(),
            values,
            stderr,
        })
    }
}

/// Uniform depolarization of a traceless observable with per-step
/// fidelity `f`: `raw_n = f^n ideal_n`, with `n` the position in the series.
pub fn synth_depolarize(ideal: &[f64], f: f64) -> Result<Vec<f64>> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::Precondition(format!(
            "depolarizing fidelity {f} outside (0, 1]"
        )));
    }
    Ok(ideal
        .iter()
        .enumerate()
        .map(|(n, &x)| f.powi(n as i32) * x)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(mitigate(&[0.45], &[0.5]).unwrap(), vec![Some(0.9)]);
        assert_eq!(mitigate(&[0.45, 0.2], &[0.5, 0.0]).unwrap()[1], None);
        assert!(matches!(
            mitigate(&[1.0], &[1.0, 1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(synth_depolarize(&[1.0, -1.0], 1.0).unwrap(), vec![1.0, -1.0]);
        assert!(synth_depolarize(&[1.0], 0.0).is_err());
    }

    #[test]
    fn alternating_pattern() {
        let ideal: Vec<f64> = (0..6).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let raw = synth_depolarize(&ideal, 0.9).unwrap();
        for (n, r) in raw.iter().enumerate() {
            assert!((r - (-0.9f64).powi(n as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn stderr_scales_with_reference() {
        let s = MeasuredSeries {
            steps: vec![0, 1],
            raw: vec![0.5, 0.1],
            reference: vec![-0.5, 1e-4],
            stderr: Some(vec![0.05, 0.01]),
        };
        let m = s.mitigate().unwrap();
        assert_eq!(m.values, vec![Some(1.0), None]);
        assert_eq!(m.stderr.unwrap(), vec![Some(0.1), None]);
    }
}
