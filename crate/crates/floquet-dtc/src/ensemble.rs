//! Monte Carlo averages over noise trajectories.
//!
//! Trajectory `i` draws its sign flips from the ChaCha8 stream `i` of the
//! master seed and, when shot emulation is on, its measurement outcomes
//! from stream `i` of a second, salted seed. Results are collected by
//! trajectory index and reduced sequentially, so the output does not depend
//! on how rayon schedules trajectories.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{realize_noisy_cycle, Cycle, FloquetParams, Gate, NoiseState};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region};
use crate::output::sig17;
use crate::statevector::{Pauli, PauliString, StateVector};
use crate::sum::{self, Neumaier};

/// XORed into the master seed to derive the measurement-shot seed.
const SHOT_SEED_SALT: u64 = 0x5EED_5407_0B5E_7F1D;

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// Mean `<Z_j>` over a region at every step.
    ZAverage(Region),
    /// `<Z_j>` of every site at the listed steps.
    Snapshot(Vec<usize>),
    /// `<X_j(n) Z_k X_j(n) Z_k>` at every step.
    Otoc { j: usize, k: usize },
}

impl Observable {
    /// Column values `(observable, region)` of this observable's series rows.
    fn labels(&self) -> Option<(String, String)> {
        match self {
            Observable::ZAverage(r) => Some(("z_avg".into(), r.name.clone())),
            Observable::Snapshot(_) => None,
            Observable::Otoc { j, k } => Some(("otoc".into(), format!("j{j}_k{k}"))),
        }
    }
}

/// Everything that defines one ensemble run.
#[derive(Clone, Debug)]
pub struct EnsembleSpec<'a> {
    pub lattice: &'a Lattice,
    pub params: FloquetParams,
    pub p: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub observables: Vec<Observable>,
    pub seed: u64,
    /// Estimate magnetizations from this many sampled bit strings per step
    /// instead of exactly.
    pub n_shots: Option<usize>,
}

/// Mean and standard error of one observable at steps `0..=n_steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesStats {
    pub observable: String,
    pub region: String,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Per-site mean and standard error at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotStats {
    pub step: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSeries {
    pub steps: Vec<usize>,
    pub series: Vec<SeriesStats>,
    pub snapshots: Vec<SnapshotStats>,
    pub n_trajectories: usize,
    pub seed: u64,
}

/// Arithmetic mean of `<Z_j>` over the region.
pub fn region_average(snapshot: &[f64], region: &Region) -> Result<f64> {
    if region.sites.is_empty() || region.sites.iter().any(|&s| s >= snapshot.len()) {
        return Err(Error::Region(region.name.clone()));
    }
    Ok(sum::sum(region.sites.iter().map(|&s| snapshot[s])) / region.sites.len() as f64)
}

/// Flat record layout: one slot per (series, step), then one per
/// (snapshot step, site).
struct Layout {
    n_steps: usize,
    n_sites: usize,
    series: Vec<Observable>,
    snapshot_steps: Vec<usize>,
}

impl Layout {
    fn new(spec: &EnsembleSpec) -> Result<Self> {
        let n_sites = spec.lattice.n_sites();
        let mut series = Vec::new();
        let mut snapshot_steps = Vec::new();
        for o in &spec.observables {
            match o {
                Observable::ZAverage(r) => {
                    spec.lattice.check_region(r)?;
                    series.push(o.clone());
                }
                Observable::Snapshot(steps) => {
                    if let Some(&s) = steps.iter().find(|&&s| s > spec.n_steps) {
                        return Err(Error::config(
                            "observables",
                            format!("snapshot step {s} beyond n_steps"),
                        ));
                    }
                    snapshot_steps.extend(steps);
                }
                Observable::Otoc { j, k } => {
                    if *j >= n_sites || *k >= n_sites {
                        return Err(Error::config(
                            "observables",
                            format!("OTOC sites ({j}, {k}) outside lattice"),
                        ));
                    }
                    series.push(o.clone());
                }
            }
        }
        snapshot_steps.sort_unstable();
        snapshot_steps.dedup();
        Ok(Self {
            n_steps: spec.n_steps,
            n_sites,
            series,
            snapshot_steps,
        })
    }

    fn len(&self) -> usize {
        self.series.len() * (self.n_steps + 1) + self.snapshot_steps.len() * self.n_sites
    }
}

/// `<Z_j>` estimated from sampled bit strings.
fn sampled_z(state: &StateVector, shots: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = state.n_qubits();
    let mut ones = vec![0usize; n];
    for outcome in state.sample(shots, rng) {
        for (j, c) in ones.iter_mut().enumerate() {
            *c += (outcome >> j) & 1;
        }
    }
    ones.iter()
        .map(|&c| 1.0 - 2.0 * c as f64 / shots as f64)
        .collect()
}

fn trajectory(spec: &EnsembleSpec, layout: &Layout, cycle: &Cycle, index: u64) -> Result<Vec<f64>> {
    let lattice = spec.lattice;
    let mut noise = if spec.p > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(index);
        Some(NoiseState::new(lattice.n_ancillas(), spec.p, rng)?)
    } else {
        None
    };
    let mut shot_rng = spec.n_shots.map(|_| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ SHOT_SEED_SALT);
        rng.set_stream(index);
        rng
    });
    let wants_otoc = layout.series.iter().any(|o| matches!(o, Observable::Otoc { .. }));
    let mut inverses: Vec<Cycle> = Vec::new();
    let mut state = StateVector::zero(lattice.n_sites())?;
    let mut out = vec![0.0; layout.len()];
    let stride = layout.n_steps + 1;
    for step in 0..=layout.n_steps {
        if step > 0 {
            let realised = match noise.as_mut() {
                Some(n) => realize_noisy_cycle(cycle, n)?,
                None => cycle.clone(),
            };
            state.apply_cycle(&realised)?;
            if wants_otoc {
                inverses.push(realised.inverse());
            }
        }
        let z = match (spec.n_shots, shot_rng.as_mut()) {
            (Some(shots), Some(rng)) => sampled_z(&state, shots, rng),
            _ => state.z_expectations(),
        };
        for (slot, o) in layout.series.iter().enumerate() {
            out[slot * stride + step] = match o {
                Observable::ZAverage(r) => region_average(&z, r)?,
                // From |0...0>, Z_k acts trivially on the initial state, so
                // the correlator is <chi| Z_k |chi> with chi = W_j |0...0>.
                Observable::Otoc { j, k } => {
                    let mut chi = state.clone();
                    chi.apply_gate(&Gate::X(*j))?;
                    for c in inverses.iter().rev() {
                        chi.apply_cycle(c)?;
                    }
                    chi.expectation(&PauliString::single(*k, Pauli::Z))?
                }
                Observable::Snapshot(_) => unreachable!("snapshots are not series"),
            };
        }
        if let Ok(pos) = layout.snapshot_steps.binary_search(&step) {
            let base = layout.series.len() * stride + pos * layout.n_sites;
            out[base..base + layout.n_sites].copy_from_slice(&z);
        }
    }
    Ok(out)
}

/// Per-slot mean and standard error of the mean (sample deviation over
/// `sqrt(n)`, zero for a single trajectory).
fn reduce(records: &[Vec<f64>], len: usize) -> (Vec<f64>, Vec<f64>) {
    let n = records.len() as f64;
    let mut mean = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for slot in 0..len {
        let m = sum::sum(records.iter().map(|r| r[slot])) / n;
        let var = if records.len() > 1 {
            let mut acc = Neumaier::default();
            for r in records {
                acc.add((r[slot] - m).powi(2));
            }
            acc.value() / (n - 1.0)
        } else {
            0.0
        };
        mean.push(m);
        stderr.push((var / n).sqrt());
    }
    (mean, stderr)
}

/// Run `n_traj` trajectories and average every observable.
///
/// Without noise and without shot emulation all trajectories coincide, so
/// a single one is evolved and reported with zero error.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleSeries> {
    if spec.n_traj == 0 {
        return Err(Error::config("n_traj", "at least one trajectory is required"));
    }
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(Error::config("p", format!("{} outside [0, 1]", spec.p)));
    }
    if spec.n_shots == Some(0) {
        return Err(Error::config("n_shots", "must be positive"));
    }
    let layout = Layout::new(spec)?;
    let cycle = Cycle::build(spec.lattice, spec.params);
    let deterministic = spec.p == 0.0 && spec.n_shots.is_none();
    let (mean, stderr) = if deterministic {
        let r = trajectory(spec, &layout, &cycle, 0)?;
        let zeros = vec![0.0; r.len()];
        (r, zeros)
    } else {
        let records = (0..spec.n_traj as u64)
            .into_par_iter()
            .map(|i| trajectory(spec, &layout, &cycle, i))
            .collect::<Result<Vec<_>>>()?;
        reduce(&records, layout.len())
    };
    let stride = layout.n_steps + 1;
    let series = layout
        .series
        .iter()
        .enumerate()
        .map(|(slot, o)| {
            let (observable, region) = o.labels().expect("series observables are labelled");
            let range = slot * stride..(slot + 1) * stride;
            SeriesStats {
                observable,
                region,
                mean: mean[range.clone()].to_vec(),
                stderr: stderr[range].to_vec(),
            }
        })
        .collect();
    let base = layout.series.len() * stride;
    let snapshots = layout
        .snapshot_steps
        .iter()
        .enumerate()
        .map(|(pos, &step)| {
            let range = base + pos * layout.n_sites..base + (pos + 1) * layout.n_sites;
            SnapshotStats {
                step,
                mean: mean[range.clone()].to_vec(),
                stderr: stderr[range].to_vec(),
            }
        })
        .collect();
    Ok(EnsembleSeries {
        steps: (0..=spec.n_steps).collect(),
        series,
        snapshots,
        n_trajectories: spec.n_traj,
        seed: spec.seed,
    })
}

impl EnsembleSeries {
    /// The series for `observable` over `region`, if present.
    pub fn get(&self, observable: &str, region: &str) -> Option<&SeriesStats> {
        self.series
            .iter()
            .find(|s| s.observable == observable && s.region == region)
    }

    /// `step,observable,region,mean,stderr`, series after series.
    pub fn write_series_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "observable", "region", "mean", "stderr"])?;
        for s in &self.series {
            for (i, &step) in self.steps.iter().enumerate() {
                out.write_record([
                    step.to_string(),
                    s.observable.clone(),
                    s.region.clone(),
                    sig17(s.mean[i]),
                    sig17(s.stderr[i]),
                ])?;
            }
        }
        out.flush().map_err(|e| Error::io("series csv", e))
    }

    /// `step,site,mean,stderr` for every snapshot.
    pub fn write_snapshot_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "site", "mean", "stderr"])?;
        for s in &self.snapshots {
            for (site, (m, e)) in s.mean.iter().zip(&s.stderr).enumerate() {
                out.write_record([s.step.to_string(), site.to_string(), sig17(*m), sig17(*e)])?;
            }
        }
        out.flush().map_err(|e| Error::io("snapshot csv", e))
    }
}
