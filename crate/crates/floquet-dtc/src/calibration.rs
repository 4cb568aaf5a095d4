//! Conversions from device error rates to the sign-flip probability of the
//! effective noise model.

use serde::Serialize;

use crate::error::{Error, Result};

fn check(what: &str, ok: bool, value: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} = {value} out of range")))
    }
}

/// Bit-flip probability per step of an ancilla with fidelity `eta`:
/// `(1 - eta) / 2`.
pub fn p_from_eta(eta: f64) -> Result<f64> {
    check("eta", eta > 0.0 && eta <= 1.0, eta)?;
    Ok((1.0 - eta) / 2.0)
}

/// Ancilla fidelity per cycle after `m_a` gadget uses of `m_cnot`
/// entangling gates each: `(1 - eps_cnot)^(m_a m_cnot)`.
pub fn eta_from_gates(eps_cnot: f64, m_a: u32, m_cnot: u32) -> Result<f64> {
    check("eps_cnot", (0.0..1.0).contains(&eps_cnot), eps_cnot)?;
    Ok((1.0 - eps_cnot).powi((m_a * m_cnot) as i32))
}

/// Rate at which one of `m_a` sequential gadget uses sees its angle
/// negated when one bit flip occurs at a uniformly random position in the
/// sequence with probability `q`: position `s` flips the last `m_a - s + 1`
/// uses, and averaging over `s` gives `(m_a + 1) q / (2 m_a)`.
pub fn signflip_rate_single_flip(m_a: u32, q: f64) -> Result<f64> {
    check("m_a", m_a >= 1, m_a as f64)?;
    check("q", (0.0..=1.0).contains(&q), q)?;
    let m = m_a as f64;
    Ok((m + 1.0) * q / (2.0 * m))
}

/// The full chain from a per-gate error rate to the sign-flip probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseCalibration {
    pub eps_cnot: f64,
    pub m_cnot: u32,
    pub m_a: u32,
    pub eta: f64,
    pub q: f64,
    pub p: f64,
}

impl NoiseCalibration {
    pub fn from_gates(eps_cnot: f64, m_a: u32, m_cnot: u32) -> Result<Self> {
        let eta = eta_from_gates(eps_cnot, m_a, m_cnot)?;
        let q = p_from_eta(eta)?;
        Ok(Self {
            eps_cnot,
            m_cnot,
            m_a,
            eta,
            q,
            p: signflip_rate_single_flip(m_a, q)?,
        })
    }
}
