//! Dense statevector evolution.
//!
//! Qubit `j` is bit `j` of the amplitude index (little endian), and `Z_j`
//! has eigenvalue `+1` on bit value 0. Kernels sweep the amplitude array in
//! fixed chunks with rayon; no kernel reduces across chunks except through
//! [`crate::sum`], so results are bit-identical for any thread count.

mod kernels;
mod otoc;
mod pauli;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Cycle, Gate};
use crate::error::{Error, Result};
use crate::sum::{self, Neumaier};

pub use otoc::{otoc, otoc_at_sites, otoc_two_branch, realize_cycles};
pub use pauli::{Pauli, PauliString};

pub type C64 = Complex64;

/// Largest register held densely: 2^26 amplitudes is 1 GiB.
pub const MAX_QUBITS: usize = 26;

/// Imaginary residue tolerated in a Hermitian expectation value.
pub const IMAG_TOLERANCE: f64 = 1e-10;

pub(crate) const CHUNK: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "statevector",
                qubits: n,
                limit: MAX_QUBITS,
            });
        }
        if index >> n != 0 {
            return Err(Error::InvalidCircuit(format!(
                "basis index {index} needs more than {n} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidCircuit(format!(
                "{len} amplitudes is not a register size"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "statevector",
                qubits: n,
                limit: MAX_QUBITS,
            });
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    fn check_sites(&self, needed: usize) -> Result<()> {
        if needed > self.n_qubits {
            return Err(Error::InvalidCircuit(format!(
                "gate on site {} of a {}-qubit register",
                needed - 1,
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        self.check_sites(gate.max_site() + 1)?;
        kernels::apply_run(&mut self.amps, std::slice::from_ref(gate));
        Ok(())
    }

    /// Multiply by the cycle unitary. Consecutive diagonal gates are fused
    /// into one sweep, and consecutive `RX` on distinct sites into one
    /// blocked layer.
    pub fn apply_cycle(&mut self, cycle: &Cycle) -> Result<()> {
        self.check_sites(cycle.n_qubits_needed())?;
        self.apply_gates_unchecked(&cycle.gates);
        Ok(())
    }

    pub(crate) fn apply_gates_unchecked(&mut self, gates: &[Gate]) {
        let mut start = 0;
        while start < gates.len() {
            let mut end = start + 1;
            match gates[start] {
                g if g.is_diagonal() => {
                    while end < gates.len() && gates[end].is_diagonal() {
                        end += 1;
                    }
                }
                Gate::Rx { site, .. } => {
                    let mut used = 1usize << site;
                    while let Some(&Gate::Rx { site, .. }) = gates.get(end) {
                        if used & (1 << site) != 0 {
                            break;
                        }
                        used |= 1 << site;
                        end += 1;
                    }
                }
                _ => {}
            }
            kernels::apply_run(&mut self.amps, &gates[start..end]);
            start = end;
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        let parts: Vec<f64> = self
            .amps
            .par_chunks(CHUNK)
            .map(|c| sum::sum(c.iter().map(|a| a.norm_sqr())))
            .collect();
        sum::sum(parts)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.amps.len(), other.amps.len(), "register sizes differ");
        let parts: Vec<(f64, f64)> = self
            .amps
            .par_chunks(CHUNK)
            .zip(other.amps.par_chunks(CHUNK))
            .map(|(a, b)| {
                let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
                for (x, y) in a.iter().zip(b) {
                    let v = x.conj() * y;
                    re.add(v.re);
                    im.add(v.im);
                }
                (re.value(), im.value())
            })
            .collect();
        C64::new(
            sum::sum(parts.iter().map(|p| p.0)),
            sum::sum(parts.iter().map(|p| p.1)),
        )
    }

    /// `<psi|P|psi>` for a Pauli string. Fails if the result has an
    /// imaginary part above [`IMAG_TOLERANCE`].
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        self.check_sites(pauli.max_site() + 1)?;
        let (x, z, n_y) = pauli.masks();
        let amps = &self.amps;
        let parts: Vec<(f64, f64)> = amps
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = c * CHUNK;
                let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
                for (off, a) in chunk.iter().enumerate() {
                    let i = base + off;
                    let mut v = amps[i ^ x].conj() * a;
                    if (i & z).count_ones() & 1 == 1 {
                        v = -v;
                    }
                    re.add(v.re);
                    im.add(v.im);
                }
                (re.value(), im.value())
            })
            .collect();
        let raw = C64::new(
            sum::sum(parts.iter().map(|p| p.0)),
            sum::sum(parts.iter().map(|p| p.1)),
        );
        let value = raw * C64::i().powu(n_y);
        if value.im.abs() > IMAG_TOLERANCE {
            return Err(Error::Numerical(format!(
                "<{pauli}> has imaginary part {:e}",
                value.im
            )));
        }
        Ok(value.re)
    }

    /// `<Z_j>` for every site in one sweep. Within a chunk the
    /// probabilities are folded in half once per low bit, so the weight on
    /// bit `j = 1` is read off the upper half before each fold.
    pub fn z_expectations(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let parts: Vec<(f64, Vec<f64>)> = self
            .amps
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = c * CHUNK;
                let low = chunk.len().trailing_zeros() as usize;
                let mut p: Vec<f64> = chunk.iter().map(|a| a.norm_sqr()).collect();
                let total = sum::sum(p.iter().copied());
                let mut ones = vec![0.0; n];
                for j in (0..low).rev() {
                    let half = 1 << j;
                    let (lo, hi) = p.split_at_mut(half);
                    ones[j] = sum::sum(hi.iter().copied());
                    for (x, y) in lo.iter_mut().zip(hi.iter()) {
                        *x += y;
                    }
                    p.truncate(half);
                }
                for (j, w) in ones.iter_mut().enumerate().skip(low) {
                    if (base >> j) & 1 == 1 {
                        *w = total;
                    }
                }
                (total, ones)
            })
            .collect();
        let total = sum::sum(parts.iter().map(|p| p.0));
        (0..n)
            .map(|j| total - 2.0 * sum::sum(parts.iter().map(|p| p.1[j])))
            .collect()
    }

    /// Draw `shots` computational-basis outcomes from `|psi|^2`, returned in
    /// ascending index order.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Vec<usize> {
        let total = self.norm_sqr();
        let mut draws: Vec<f64> = (0..shots).map(|_| rng.random::<f64>() * total).collect();
        draws.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(shots);
        let mut acc = 0.0;
        let mut next = 0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            while next < draws.len() && draws[next] < acc {
                out.push(i);
                next += 1;
            }
        }
        // Rounding can leave the last draws past the final partial sum.
        let last = self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        out.extend(std::iter::repeat_n(last, draws.len() - next));
        out
    }
}
