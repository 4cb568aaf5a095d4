//! One Floquet cycle as a gate program, its noisy realisations and its inverse.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AncillaId, Lattice};
use crate::output::sig17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Transverse kick followed by `RZZ` couplings on every bond.
    Ising,
    /// Transverse kick followed by a `CZ` on every bond.
    #[serde(rename = "CZ")]
    Cz,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ising => "Ising",
            Model::Cz => "CZ",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ising" | "ising" => Ok(Model::Ising),
            "CZ" | "cz" => Ok(Model::Cz),
            other => Err(Error::config(
                "model",
                format!("unknown model `{other}` (Ising, CZ)"),
            )),
        }
    }
}

/// Rotation angles of the drive. `theta_j` is ignored by the CZ model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloquetParams {
    pub model: Model,
    pub theta_x: f64,
    pub theta_j: f64,
}

impl FloquetParams {
    pub const DEFAULT_THETA_J: f64 = -FRAC_PI_2;

    pub fn ising(theta_x: f64) -> Self {
        Self {
            model: Model::Ising,
            theta_x,
            theta_j: Self::DEFAULT_THETA_J,
        }
    }

    pub fn cz(theta_x: f64) -> Self {
        Self {
            model: Model::Cz,
            theta_x,
            theta_j: Self::DEFAULT_THETA_J,
        }
    }

    /// Drive detuning from a perfect spin flip.
    pub fn epsilon(&self) -> f64 {
        PI - self.theta_x
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// `exp(-i angle X / 2)`.
    Rx {
        site: usize,
        angle: f64,
    },
    /// `exp(-i angle Z_a Z_b / 2)`.
    Rzz {
        a: usize,
        b: usize,
        angle: f64,
        ancilla: Option<AncillaId>,
    },
    Cz {
        a: usize,
        b: usize,
        ancilla: Option<AncillaId>,
    },
    S(usize),
    Sdg(usize),
    Z(usize),
    X(usize),
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx { site, angle } => Gate::Rx { site, angle: -angle },
            Gate::Rzz { a, b, angle, ancilla } => Gate::Rzz {
                a,
                b,
                angle: -angle,
                ancilla,
            },
            Gate::S(s) => Gate::Sdg(s),
            Gate::Sdg(s) => Gate::S(s),
            g @ (Gate::Cz { .. } | Gate::Z(_) | Gate::X(_)) => g,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, Gate::Rx { .. } | Gate::X(_))
    }

    pub fn max_site(&self) -> usize {
        match *self {
            Gate::Rx { site, .. } | Gate::S(site) | Gate::Sdg(site) | Gate::Z(site) | Gate::X(site) => site,
            Gate::Rzz { a, b, .. } | Gate::Cz { a, b, .. } => a.max(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub params: FloquetParams,
    pub gates: Vec<Gate>,
}

impl Cycle {
    /// Rotations on every site in ascending order, then one coupling per bond
    /// in the lattice's layer order.
    pub fn build(lattice: &Lattice, params: FloquetParams) -> Self {
        let mut gates: Vec<Gate> = (0..lattice.n_sites())
            .map(|site| Gate::Rx {
                site,
                angle: params.theta_x,
            })
            .collect();
        gates.extend(lattice.edges().iter().map(|e| match params.model {
            Model::Ising => Gate::Rzz {
                a: e.a,
                b: e.b,
                angle: params.theta_j,
                ancilla: Some(e.ancilla),
            },
            Model::Cz => Gate::Cz {
                a: e.a,
                b: e.b,
                ancilla: Some(e.ancilla),
            },
        }));
        Self { params, gates }
    }

    /// Reversed order with every gate inverted.
    pub fn inverse(&self) -> Self {
        Self {
            params: self.params,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn n_qubits_needed(&self) -> usize {
        self.gates.iter().map(|g| g.max_site() + 1).max().unwrap_or(0)
    }

    /// Text form, one gate per line, angles with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# cycle model={} thetaX={} thetaJ={}",
            self.params.model.name(),
            sig17(self.params.theta_x),
            sig17(self.params.theta_j)
        );
        for g in &self.gates {
            let _ = match *g {
                Gate::Rx { site, angle } => writeln!(out, "RX {site} {}", sig17(angle)),
                Gate::Rzz { a, b, angle, ancilla } => match ancilla {
                    Some(g) => writeln!(out, "RZZ {a} {b} {} anc={}", sig17(angle), g.0),
                    None => writeln!(out, "RZZ {a} {b} {}", sig17(angle)),
                },
                Gate::Cz { a, b, .. } => writeln!(out, "CZ {a} {b}"),
                Gate::S(s) => writeln!(out, "S {s}"),
                Gate::Sdg(s) => writeln!(out, "SDAG {s}"),
                Gate::Z(s) => writeln!(out, "Z {s}"),
                Gate::X(s) => writeln!(out, "X {s}"),
            };
        }
        out
    }
}

/// Ancilla flip bits carried across cycles by one trajectory.
#[derive(Clone, Debug)]
pub struct NoiseState {
    xi: Vec<bool>,
    p: f64,
    rng: ChaCha8Rng,
    draws: u64,
    flips: u64,
}

impl NoiseState {
    pub fn new(n_ancillas: usize, p: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config("p", format!("flip probability {p} outside [0, 1]")));
        }
        Ok(Self {
            xi: vec![false; n_ancillas],
            p,
            rng,
            draws: 0,
            flips: 0,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn xi(&self) -> &[bool] {
        &self.xi
    }

    /// Number of flip draws and how many of them flipped.
    pub fn counts(&self) -> (u64, u64) {
        (self.draws, self.flips)
    }

    /// Draw once for `group`, flipping its bit with probability `p`, and
    /// return the bit afterwards.
    fn step(&mut self, group: usize) -> bool {
        self.draws += 1;
        if self.p > 0.0 && self.rng.random::<f64>() < self.p {
            self.xi[group] = !self.xi[group];
            self.flips += 1;
        }
        self.xi[group]
    }
}

/// Realise the ancilla sign-flip noise on one cycle. Before every `RZZ`
/// the bit of its ancilla flips with probability `p`; the gate then acts
/// with angle `(1 - 2 xi) theta`. Other gates pass through unchanged.
pub fn realize_noisy_cycle(cycle: &Cycle, noise: &mut NoiseState) -> Result<Cycle> {
    let gates = cycle
        .gates
        .iter()
        .map(|g| match *g {
            Gate::Rzz { a, b, angle, ancilla } => {
                let group = ancilla
                    .ok_or_else(|| Error::InvalidCircuit(format!("RZZ on ({a}, {b}) has no ancilla")))?
                    .0 as usize;
                if group >= noise.xi.len() {
                    return Err(Error::InvalidCircuit(format!(
                        "ancilla {group} outside the {} tracked by the noise state",
                        noise.xi.len()
                    )));
                }
                let flipped = noise.step(group);
                Ok(Gate::Rzz {
                    a,
                    b,
                    angle: if flipped { -angle } else { angle },
                    ancilla,
                })
            }
            other => Ok(other),
        })
        .collect::<Result<_>>()?;
    Ok(Cycle {
        params: cycle.params,
        gates,
    })
}

/// Native two-qubit gates per Floquet step when each bond costs `m_cnot`.
pub fn native_gate_count(lattice: &Lattice, m_cnot: u32) -> Result<usize> {
    if !(m_cnot == 3 || m_cnot == 4) {
        return Err(Error::config("m_cnot", format!("{m_cnot} is not 3 or 4")));
    }
    Ok(m_cnot as usize * lattice.n_edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_preset;
    use rand::SeedableRng;

    fn noise(n: usize, p: f64) -> NoiseState {
        NoiseState::new(n, p, ChaCha8Rng::seed_from_u64(7)).unwrap()
    }

    #[test]
    fn kagome82_cycle_shape() {
        let l = build_preset("Kagome82").unwrap();
        let c = Cycle::build(&l, FloquetParams::ising(0.9 * PI));
        let rx = c.gates.iter().filter(|g| matches!(g, Gate::Rx { .. })).count();
        let rzz = c.gates.iter().filter(|g| matches!(g, Gate::Rzz { .. })).count();
        assert_eq!((rx, rzz), (82, 142));
        let first_coupling = c
            .gates
            .iter()
            .position(|g| !matches!(g, Gate::Rx { .. }))
            .unwrap();
        assert_eq!(first_coupling, 82);
    }

    #[test]
    fn cz_cycle_on_single_bond() {
        let l = build_preset("chain(2)").unwrap();
        let c = Cycle::build(&l, FloquetParams::cz(0.3));
        assert_eq!(c.gates.len(), 3);
        assert!(matches!(c.gates[2], Gate::Cz { a: 0, b: 1, .. }));
    }

    #[test]
    fn pi_kick_angles() {
        let l = build_preset("Square16").unwrap();
        let c = Cycle::build(&l, FloquetParams::ising(PI));
        assert!(c
            .gates
            .iter()
            .all(|g| !matches!(g, Gate::Rx { angle, .. } if *angle != PI)));
    }

    #[test]
    fn zero_noise_is_identity() {
        let l = build_preset("Kagome19").unwrap();
        let c = Cycle::build(&l, FloquetParams::ising(0.95 * PI));
        let mut ns = noise(l.n_ancillas(), 0.0);
        for _ in 0..5 {
            assert_eq!(realize_noisy_cycle(&c, &mut ns).unwrap(), c);
        }
    }

    #[test]
    fn certain_flip_alternates() {
        let l = build_preset("chain(2)").unwrap();
        let params = FloquetParams::ising(0.9 * PI);
        let c = Cycle::build(&l, params);
        let mut ns = noise(1, 1.0);
        for n in 1..=6 {
            let r = realize_noisy_cycle(&c, &mut ns).unwrap();
            let Gate::Rzz { angle, .. } = r.gates[2] else {
                panic!()
            };
            let expected = if n % 2 == 1 {
                -params.theta_j
            } else {
                params.theta_j
            };
            assert_eq!(angle, expected, "cycle {n}");
            assert_eq!(ns.xi()[0], n % 2 == 1);
        }
    }

    #[test]
    fn flip_frequency_matches_p() {
        let l = build_preset("chain(2)").unwrap();
        let c = Cycle::build(&l, FloquetParams::ising(0.9 * PI));
        let mut ns = noise(1, 0.02);
        for _ in 0..100_000 {
            realize_noisy_cycle(&c, &mut ns).unwrap();
        }
        let (draws, flips) = ns.counts();
        let p = 0.02;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((flips as f64 - draws as f64 * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn rzz_without_ancilla_rejected() {
        let c = Cycle {
            params: FloquetParams::ising(1.0),
            gates: vec![Gate::Rzz {
                a: 0,
                b: 1,
                angle: 1.0,
                ancilla: None,
            }],
        };
        assert!(realize_noisy_cycle(&c, &mut noise(1, 0.5)).is_err());
    }

    #[test]
    fn inverse_is_involution() {
        let l = build_preset("Kagome21").unwrap();
        let mut c = Cycle::build(&l, FloquetParams::ising(0.8 * PI));
        c.gates.extend([Gate::S(0), Gate::Sdg(1), Gate::Z(2), Gate::X(3)]);
        assert_eq!(c.inverse().inverse(), c);
        let cz = Gate::Cz {
            a: 1,
            b: 2,
            ancilla: None,
        };
        assert_eq!(cz.inverse(), cz);
    }

    #[test]
    fn gate_counts_per_step() {
        let counts = [
            ("Kagome82", 3, 426),
            ("Lieb40", 3, 144),
            ("Kagome53-I", 3, 264),
            ("Kagome53-II", 3, 270),
            ("Kagome53-II", 4, 360),
        ];
        for (name, m, expected) in counts {
            let l = build_preset(name).unwrap();
            assert_eq!(native_gate_count(&l, m).unwrap(), expected, "{name}");
        }
        assert!(native_gate_count(&build_preset("Lieb21").unwrap(), 2).is_err());
    }

    #[test]
    fn text_export() {
        let l = build_preset("chain(2)").unwrap();
        let text = Cycle::build(&l, FloquetParams::ising(PI)).to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "# cycle model=Ising thetaX=3.1415926535897931e0 thetaJ=-1.5707963267948966e0"
        );
        assert_eq!(lines[1], "RX 0 3.1415926535897931e0");
        assert_eq!(lines[3], "RZZ 0 1 -1.5707963267948966e0 anc=0");
        let cz = Cycle::build(&l, FloquetParams::cz(PI)).to_text();
        assert!(cz.lines().any(|line| line == "CZ 0 1"));
    }
}
