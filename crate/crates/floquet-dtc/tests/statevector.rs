use std::f64::consts::PI;

use floquet_dtc::circuit::{realize_noisy_cycle, Cycle, FloquetParams, Gate, NoiseState};
use floquet_dtc::lattice::{build_preset, AncillaStrategy, BoundaryStyle, Geometry, Lattice};
use floquet_dtc::statevector::{
    otoc_at_sites, otoc_two_branch, realize_cycles, Pauli, PauliString, StateVector, C64,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..1usize << n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn noise(lattice: &Lattice, p: f64, stream: u64) -> NoiseState {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    rng.set_stream(stream);
    NoiseState::new(lattice.n_ancillas(), p, rng).unwrap()
}

#[test]
fn pi_kick_flips_every_spin() {
    let l = build_preset("Lieb21").unwrap();
    let cycle = Cycle::build(&l, FloquetParams::ising(PI));
    let mut psi = StateVector::zero(l.n_sites()).unwrap();
    for n in 1..=4 {
        psi.apply_cycle(&cycle).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!(psi.z_expectations().iter().all(|z| (z - sign).abs() < 1e-12));
    }
}

#[test]
fn pi_kick_is_blind_to_sign_flips() {
    let l = build_preset("Kagome19").unwrap();
    let cycle = Cycle::build(&l, FloquetParams::ising(PI));
    let mut ns = noise(&l, 0.5, 0);
    let mut psi = StateVector::zero(l.n_sites()).unwrap();
    for _ in 0..6 {
        psi.apply_cycle(&realize_noisy_cycle(&cycle, &mut ns).unwrap())
            .unwrap();
    }
    assert!(psi.z_expectations().iter().all(|z| (z - 1.0).abs() < 1e-12));
}

#[test]
fn z_expectations_match_pauli_expectation() {
    let psi = random_state(7, 3);
    let z = psi.z_expectations();
    for (j, zj) in z.iter().enumerate() {
        let direct = psi.expectation(&PauliString::single(j, Pauli::Z)).unwrap();
        assert!((zj - direct).abs() < 1e-12);
    }
}

#[test]
fn otoc_shortcut_matches_two_branch_form() {
    let l = Geometry::square(3, 2)
        .unwrap()
        .into_lattice(AncillaStrategy::PerEdge)
        .unwrap();
    let cycle = Cycle::build(&l, FloquetParams::ising(0.85 * PI));
    let mut ns = noise(&l, 0.3, 2);
    let cycles = realize_cycles(&cycle, Some(&mut ns), 5).unwrap();
    let zero = StateVector::zero(l.n_sites()).unwrap();
    let js: Vec<usize> = (0..l.n_sites()).collect();
    let fast = otoc_at_sites(l.n_sites(), &cycles, &js, 1).unwrap();
    for &j in &js {
        let slow = otoc_two_branch(&zero, &cycles, j, 1).unwrap();
        assert!((fast[j] - slow).abs() < 1e-12, "j={j}: {} vs {slow}", fast[j]);
    }
}

#[test]
fn otoc_at_zero_steps() {
    // W = X_j: it commutes with Z_k unless j == k.
    let zero = StateVector::zero(3).unwrap();
    assert!((otoc_two_branch(&zero, &[], 0, 1).unwrap() - 1.0).abs() < 1e-15);
    assert!((otoc_two_branch(&zero, &[], 1, 1).unwrap() + 1.0).abs() < 1e-15);
}

#[test]
fn out_of_range_gate_is_rejected() {
    let mut psi = StateVector::zero(3).unwrap();
    assert!(psi.apply_gate(&Gate::X(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cycles_preserve_norm(theta in 0.0f64..(2.0 * PI), seed in 0u64..1000, cz in any::<bool>()) {
        let l = Geometry::kagome(2, 1, BoundaryStyle::Open).unwrap().into_lattice(AncillaStrategy::PerEdge).unwrap();
        let params = if cz { FloquetParams::cz(theta) } else { FloquetParams::ising(theta) };
        let cycle = Cycle::build(&l, params);
        let mut psi = random_state(l.n_sites(), seed);
        for _ in 0..3 {
            psi.apply_cycle(&cycle).unwrap();
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_linear(theta in 0.0f64..(2.0 * PI), seed in 0u64..1000, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let l = Geometry::chain(5).unwrap().into_lattice(AncillaStrategy::PerEdge).unwrap();
        let cycle = Cycle::build(&l, FloquetParams::ising(theta));
        let (x, y) = (random_state(5, seed), random_state(5, seed + 1));
        let ca = C64::new(a, 0.3);
        let cb = C64::new(b, -0.2);
        let combo: Vec<C64> = x.amplitudes().iter().zip(y.amplitudes()).map(|(u, v)| ca * u + cb * v).collect();
        let mut sum = StateVector::from_amplitudes(combo).unwrap();
        let (mut x2, mut y2) = (x.clone(), y.clone());
        for s in [&mut sum, &mut x2, &mut y2] {
            s.apply_cycle(&cycle).unwrap();
        }
        for ((s, u), v) in sum.amplitudes().iter().zip(x2.amplitudes()).zip(y2.amplitudes()) {
            prop_assert!((s - (ca * u + cb * v)).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_cycle_undoes_cycle(theta in 0.0f64..(2.0 * PI), seed in 0u64..1000) {
        let l = Geometry::cycle(4).unwrap().into_lattice(AncillaStrategy::PerEdge).unwrap();
        let cycle = Cycle::build(&l, FloquetParams::cz(theta));
        let psi = random_state(4, seed);
        let mut phi = psi.clone();
        phi.apply_cycle(&cycle).unwrap();
        phi.apply_cycle(&cycle.inverse()).unwrap();
        for (u, v) in psi.amplitudes().iter().zip(phi.amplitudes()) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }
}
