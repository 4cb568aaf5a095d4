use std::f64::consts::PI;

use floquet_dtc::circuit::{Cycle, FloquetParams};
use floquet_dtc::ensemble::{region_average, run_ensemble, EnsembleSpec, Observable};
use floquet_dtc::lattice::{build_preset, AncillaStrategy, Geometry, Lattice, Region};
use floquet_dtc::statevector::StateVector;
use floquet_dtc::Error;

fn small() -> Lattice {
    Geometry::square(2, 2)
        .unwrap()
        .into_lattice(AncillaStrategy::PerEdge)
        .unwrap()
}

fn spec(lattice: &Lattice, p: f64, n_traj: usize, seed: u64) -> EnsembleSpec<'_> {
    EnsembleSpec {
        lattice,
        params: FloquetParams::ising(0.9 * PI),
        p,
        n_steps: 12,
        n_traj,
        observables: vec![
            Observable::ZAverage(lattice.region("all").unwrap()),
            Observable::Snapshot(vec![0, 5, 12]),
            Observable::Otoc { j: 0, k: 4 },
        ],
        seed,
        n_shots: None,
    }
}

fn csv_bytes(s: &floquet_dtc::ensemble::EnsembleSeries) -> Vec<u8> {
    let mut out = Vec::new();
    s.write_series_csv(&mut out).unwrap();
    s.write_snapshot_csv(&mut out).unwrap();
    out
}

#[test]
fn noiseless_ensemble_is_a_single_trajectory() {
    let l = small();
    let s = run_ensemble(&spec(&l, 0.0, 50, 1)).unwrap();
    let cycle = Cycle::build(&l, FloquetParams::ising(0.9 * PI));
    let mut psi = StateVector::zero(l.n_sites()).unwrap();
    let z = s.get("z_avg", "all").unwrap();
    for n in 0..=12 {
        let exact = psi.z_expectations().iter().sum::<f64>() / l.n_sites() as f64;
        assert!((z.mean[n] - exact).abs() < 1e-13, "step {n}");
        assert_eq!(z.stderr[n], 0.0);
        psi.apply_cycle(&cycle).unwrap();
    }
    assert_eq!(
        s.snapshots.iter().map(|x| x.step).collect::<Vec<_>>(),
        vec![0, 5, 12]
    );
    assert!(s.get("otoc", "j0_k4").is_some());
}

#[test]
fn same_seed_same_bytes() {
    let l = small();
    let a = csv_bytes(&run_ensemble(&spec(&l, 0.3, 8, 42)).unwrap());
    let b = csv_bytes(&run_ensemble(&spec(&l, 0.3, 8, 42)).unwrap());
    let c = csv_bytes(&run_ensemble(&spec(&l, 0.3, 8, 43)).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn thread_count_does_not_change_bytes() {
    let l = small();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| csv_bytes(&run_ensemble(&spec(&l, 0.4, 6, 9)).unwrap()))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn single_noisy_trajectory_has_zero_stderr() {
    let l = small();
    let one = run_ensemble(&spec(&l, 0.5, 1, 5)).unwrap();
    assert!(one.get("z_avg", "all").unwrap().stderr.iter().all(|&e| e == 0.0));
    let four = run_ensemble(&spec(&l, 0.5, 4, 5)).unwrap();
    assert!(four.get("z_avg", "all").unwrap().stderr[3] > 0.0);
}

#[test]
fn stderr_shrinks_like_inverse_root_n() {
    let l = small();
    let at = |n_traj| {
        let s = run_ensemble(&spec(&l, 0.5, n_traj, 3)).unwrap();
        let z = s.get("z_avg", "all").unwrap();
        z.stderr[6..].iter().sum::<f64>() / 7.0
    };
    let ratio = at(16) / at(256);
    assert!((2.5..6.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn shot_estimates_track_exact_values() {
    let l = small();
    let exact = run_ensemble(&spec(&l, 0.0, 1, 2)).unwrap();
    let mut sampled_spec = spec(&l, 0.0, 1, 2);
    sampled_spec.n_shots = Some(4000);
    let sampled = run_ensemble(&sampled_spec).unwrap();
    let (e, s) = (
        exact.get("z_avg", "all").unwrap(),
        sampled.get("z_avg", "all").unwrap(),
    );
    for n in 0..=12 {
        assert!(
            (e.mean[n] - s.mean[n]).abs() < 0.05,
            "step {n}: {} vs {}",
            e.mean[n],
            s.mean[n]
        );
    }
}

#[test]
fn region_errors() {
    let l = small();
    assert!(matches!(l.region("nowhere"), Err(Error::Region(_))));
    let empty = Region::new("empty", vec![]);
    assert!(matches!(
        region_average(&[1.0, 1.0], &empty),
        Err(Error::Region(_))
    ));
    let outside = Region::new("outside", vec![0, 99]);
    let mut bad = spec(&l, 0.0, 1, 0);
    bad.observables = vec![Observable::ZAverage(outside)];
    assert!(run_ensemble(&bad).is_err());
}

#[test]
fn named_regions_partition_the_lattice() {
    let l = build_preset("Lieb21").unwrap();
    let b = l.region("boundary").unwrap();
    let k = l.region("bulk").unwrap();
    let mut all: Vec<usize> = b.sites.iter().chain(&k.sites).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..l.n_sites()).collect::<Vec<_>>());
    let snap: Vec<f64> = (0..l.n_sites()).map(|i| i as f64).collect();
    let avg = region_average(&snap, &l.region("all").unwrap()).unwrap();
    assert!((avg - 10.0).abs() < 1e-12);
}
