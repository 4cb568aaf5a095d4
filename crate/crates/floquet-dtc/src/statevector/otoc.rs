//! Out-of-time-ordered correlators `<W V W V>` with `W = U^-n X_j U^n`,
//! `V = Z_k`. A noisy trajectory is one fixed list of realised cycles; its
//! backward pass replays that same list inverted.

use super::{Pauli, PauliString, StateVector};
use crate::circuit::{realize_noisy_cycle, Cycle, FloquetParams, Gate, NoiseState};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// `n` successive cycles: identical copies without noise, fresh
/// realisations drawn from `noise` otherwise.
pub fn realize_cycles(cycle: &Cycle, noise: Option<&mut NoiseState>, n: usize) -> Result<Vec<Cycle>> {
    match noise {
        None => Ok(vec![cycle.clone(); n]),
        Some(state) => (0..n).map(|_| realize_noisy_cycle(cycle, state)).collect(),
    }
}

fn apply_w(state: &mut StateVector, forward: &[Cycle], backward: &[Cycle], j: usize) -> Result<()> {
    for c in forward {
        state.apply_cycle(c)?;
    }
    state.apply_gate(&Gate::X(j))?;
    for c in backward.iter().rev() {
        state.apply_cycle(c)?;
    }
    Ok(())
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site >= n {
        return Err(Error::InvalidCircuit(format!(
            "site {site} outside a {n}-qubit register"
        )));
    }
    Ok(())
}

/// General evaluation from any initial state: `Re <b|a>` with
/// `|a> = W V |psi0>` and `|b> = V W |psi0>`.
pub fn otoc_two_branch(psi0: &StateVector, cycles: &[Cycle], j: usize, k: usize) -> Result<f64> {
    let n = psi0.n_qubits();
    check_site(j, n)?;
    check_site(k, n)?;
    let inverses: Vec<Cycle> = cycles.iter().map(Cycle::inverse).collect();
    let v = Gate::Z(k);
    let mut a = psi0.clone();
    a.apply_gate(&v)?;
    apply_w(&mut a, cycles, &inverses, j)?;
    let mut b = psi0.clone();
    apply_w(&mut b, cycles, &inverses, j)?;
    b.apply_gate(&v)?;
    Ok(b.inner(&a).re)
}

/// OTOC from `|0...0>` for several `j` at once. Because `Z_k |0...0> =
/// |0...0>`, each value reduces to `<chi_j| Z_k |chi_j>` with
/// `chi_j = W_j |0...0>`, and the forward evolution is shared.
pub fn otoc_at_sites(n_qubits: usize, cycles: &[Cycle], js: &[usize], k: usize) -> Result<Vec<f64>> {
    check_site(k, n_qubits)?;
    let mut forward = StateVector::zero(n_qubits)?;
    for c in cycles {
        forward.apply_cycle(c)?;
    }
    let inverses: Vec<Cycle> = cycles.iter().map(Cycle::inverse).collect();
    let zk = PauliString::single(k, Pauli::Z);
    js.iter()
        .map(|&j| {
            check_site(j, n_qubits)?;
            let mut chi = forward.clone();
            chi.apply_gate(&Gate::X(j))?;
            for c in inverses.iter().rev() {
                chi.apply_cycle(c)?;
            }
            chi.expectation(&zk)
        })
        .collect()
}

/// `<X_j(n) Z_k X_j(n) Z_k>` from `|0...0>` after `n` cycles.
pub fn otoc(
    lattice: &Lattice,
    params: FloquetParams,
    noise: Option<&mut NoiseState>,
    j: usize,
    k: usize,
    n: usize,
) -> Result<f64> {
    let cycle = Cycle::build(lattice, params);
    let cycles = realize_cycles(&cycle, noise, n)?;
    Ok(otoc_at_sites(lattice.n_sites(), &cycles, &[j], k)?[0])
}
