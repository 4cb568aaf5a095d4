//! Gate kernels over the raw amplitude array.
//!
//! Two fusions matter for speed. A run of `RX` rotations is applied with
//! every low qubit handled inside one cache-sized block, leaving one memory
//! sweep per high qubit. A run of diagonal gates becomes one sweep whose
//! per-amplitude phase comes from a table indexed by bond parities, and
//! the parities of all bonds spanning the same site distance `d` are read
//! off `i ^ (i >> d)` with a single popcount.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use super::{C64, CHUNK};
use crate::circuit::Gate;

/// Qubits below this index are rotated inside one block of `2^LOW_BITS`.
const LOW_BITS: usize = 12;

/// Apply `gates`, which is either a run of `RX`, a single `X`, or a run of
/// diagonal gates.
pub(super) fn apply_run(amps: &mut [C64], gates: &[Gate]) {
    match gates {
        [Gate::X(site)] => for_pairs(amps, *site, std::mem::swap),
        [Gate::Rx { .. }, ..] => {
            let rots: Vec<Rotation> = gates
                .iter()
                .map(|g| match *g {
                    Gate::Rx { site, angle } => Rotation::new(site, angle),
                    _ => unreachable!("mixed run passed as rotations"),
                })
                .collect();
            rx_layer(amps, &rots);
        }
        _ => {
            debug_assert!(gates.iter().all(Gate::is_diagonal));
            diagonal(amps, gates);
        }
    }
}

#[derive(Clone, Copy)]
struct Rotation {
    site: usize,
    c: f64,
    s: f64,
}

impl Rotation {
    fn new(site: usize, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self { site, c, s }
    }

    /// `[[c, -i s], [-i s, c]]` on one amplitude pair.
    #[inline(always)]
    fn apply(self, x: &mut C64, y: &mut C64) {
        let (a, b) = (*x, *y);
        *x = C64::new(self.c * a.re + self.s * b.im, self.c * a.im - self.s * b.re);
        *y = C64::new(self.c * b.re + self.s * a.im, self.c * b.im - self.s * a.re);
    }
}

fn rx_layer(amps: &mut [C64], rots: &[Rotation]) {
    let block = (1usize << LOW_BITS).min(amps.len());
    let (low, high): (Vec<Rotation>, Vec<Rotation>) = rots.iter().partition(|r| (1usize << r.site) < block);
    if !low.is_empty() {
        let sweep = |chunk: &mut [C64]| {
            for r in &low {
                let stride = 1usize << r.site;
                for blk in chunk.chunks_mut(stride << 1) {
                    let (lo, hi) = blk.split_at_mut(stride);
                    for (x, y) in lo.iter_mut().zip(hi) {
                        r.apply(x, y);
                    }
                }
            }
        };
        if amps.len() <= CHUNK {
            amps.chunks_mut(block).for_each(sweep);
        } else {
            amps.par_chunks_mut(block).for_each(sweep);
        }
    }
    for r in high {
        for_pairs(amps, r.site, |x, y| r.apply(x, y));
    }
}

/// Visit every amplitude pair `(i, i | 1 << t)` with bit `t` of `i` clear.
fn for_pairs(amps: &mut [C64], t: usize, f: impl Fn(&mut C64, &mut C64) + Sync) {
    let stride = 1usize << t;
    let block = stride << 1;
    let sweep = |blk: &mut [C64]| {
        let (lo, hi) = blk.split_at_mut(stride);
        for (x, y) in lo.iter_mut().zip(hi) {
            f(x, y);
        }
    };
    if amps.len() <= CHUNK {
        amps.chunks_mut(block).for_each(sweep);
    } else if block >= CHUNK {
        for blk in amps.chunks_mut(block) {
            let (lo, hi) = blk.split_at_mut(stride);
            lo.par_chunks_mut(CHUNK / 2)
                .zip(hi.par_chunks_mut(CHUNK / 2))
                .for_each(|(l, h)| {
                    for (x, y) in l.iter_mut().zip(h) {
                        f(x, y);
                    }
                });
        }
    } else {
        amps.par_chunks_mut(CHUNK)
            .for_each(|chunk| chunk.chunks_mut(block).for_each(sweep));
    }
}

/// Bonds of one site distance `d`, as masks over their lower endpoint.
#[derive(Clone, Copy, Default)]
struct DistanceGroup {
    d: u32,
    plus: usize,
    minus: usize,
}

fn group_by_distance(bonds: impl IntoIterator<Item = (usize, usize, bool)>) -> Vec<DistanceGroup> {
    let mut groups: Vec<DistanceGroup> = Vec::new();
    for (a, b, positive) in bonds {
        let (lo, hi) = (a.min(b), a.max(b));
        let d = (hi - lo) as u32;
        let g = match groups.iter_mut().find(|g| g.d == d) {
            Some(g) => g,
            None => {
                groups.push(DistanceGroup {
                    d,
                    ..Default::default()
                });
                groups.last_mut().expect("just pushed")
            }
        };
        if positive {
            g.plus |= 1 << lo;
        } else {
            g.minus |= 1 << lo;
        }
    }
    groups
}

/// How a run of diagonal gates is evaluated per amplitude.
enum DiagonalPlan {
    /// Only `ZZ` rotations sharing one magnitude `theta`. With `s_e` the
    /// sign of bond `e` and `z_e = 1 - 2 parity_e`, the phase is
    /// `exp(-i theta k / 2)` for `k = sum_e s_e z_e`, read from a table.
    UniformZz {
        groups: Vec<DistanceGroup>,
        sign_total: i32,
        n_bonds: i32,
        table: Vec<C64>,
    },
    /// Only quarter-turn phases (`CZ`, `Z`, `S`, `S^dagger`): `i^q`.
    QuarterTurns {
        cz: Vec<DistanceGroup>,
        z: usize,
        s: usize,
        sdg: usize,
    },
    /// Anything else: accumulate the phase angle, then one `cis`.
    General(Vec<Gate>),
}

const I_POWERS: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

impl DiagonalPlan {
    fn new(gates: &[Gate]) -> Self {
        let zz: Vec<(usize, usize, f64)> = gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Rzz { a, b, angle, .. } => Some((a, b, angle)),
                _ => None,
            })
            .collect();
        if zz.len() == gates.len() {
            let theta = zz[0].2.abs();
            if zz.iter().all(|z| z.2.abs() == theta) {
                let e = zz.len() as i32;
                return Self::UniformZz {
                    groups: group_by_distance(zz.iter().map(|&(a, b, t)| (a, b, t >= 0.0))),
                    sign_total: zz.iter().map(|z| if z.2 >= 0.0 { 1 } else { -1 }).sum(),
                    n_bonds: e,
                    table: (-e..=e).map(|k| C64::cis(-theta * k as f64 / 2.0)).collect(),
                };
            }
            return Self::General(gates.to_vec());
        }
        if zz.is_empty() {
            let mut pairs = Vec::new();
            let (mut z, mut s, mut sdg) = (0usize, 0usize, 0usize);
            for g in gates {
                match *g {
                    Gate::Cz { a, b, .. } => pairs.push((a, b, true)),
                    // Repeated single-site phases on one site fall back to the general path.
                    Gate::Z(q) if (z | s | sdg) & (1 << q) == 0 => z |= 1 << q,
                    Gate::S(q) if (z | s | sdg) & (1 << q) == 0 => s |= 1 << q,
                    Gate::Sdg(q) if (z | s | sdg) & (1 << q) == 0 => sdg |= 1 << q,
                    _ => return Self::General(gates.to_vec()),
                }
            }
            let mut seen = std::collections::HashSet::new();
            if pairs.iter().any(|&(a, b, _)| !seen.insert((a.min(b), a.max(b)))) {
                return Self::General(gates.to_vec());
            }
            return Self::QuarterTurns {
                cz: group_by_distance(pairs),
                z,
                s,
                sdg,
            };
        }
        Self::General(gates.to_vec())
    }

    #[inline]
    fn phase(&self, i: usize) -> C64 {
        match self {
            Self::UniformZz {
                groups,
                sign_total,
                n_bonds,
                table,
            } => {
                let mut odd = 0i32;
                for g in groups {
                    let w = i ^ (i >> g.d);
                    odd += (w & g.plus).count_ones() as i32 - (w & g.minus).count_ones() as i32;
                }
                table[(sign_total - 2 * odd + n_bonds) as usize]
            }
            Self::QuarterTurns { cz, z, s, sdg } => {
                let mut q = 0u32;
                for g in cz {
                    q += 2 * ((i & (i >> g.d)) & g.plus).count_ones();
                }
                q += 2 * (i & z).count_ones() + (i & s).count_ones() + 3 * (i & sdg).count_ones();
                I_POWERS[(q & 3) as usize]
            }
            Self::General(gates) => {
                let bit = |s: usize| ((i >> s) & 1) as f64;
                let mut phi = 0.0;
                for g in gates {
                    phi += match *g {
                        Gate::Rzz { a, b, angle, .. } => {
                            let parity = ((i >> a) ^ (i >> b)) & 1;
                            -angle * (1.0 - 2.0 * parity as f64) / 2.0
                        }
                        Gate::Cz { a, b, .. } => PI * bit(a) * bit(b),
                        Gate::Z(s) => PI * bit(s),
                        Gate::S(s) => FRAC_PI_2 * bit(s),
                        Gate::Sdg(s) => -FRAC_PI_2 * bit(s),
                        _ => unreachable!("non-diagonal gate in diagonal run"),
                    };
                }
                C64::cis(phi)
            }
        }
    }
}

fn diagonal(amps: &mut [C64], gates: &[Gate]) {
    if gates.is_empty() {
        return;
    }
    let plan = DiagonalPlan::new(gates);
    amps.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let base = c * CHUNK;
        for (off, a) in chunk.iter_mut().enumerate() {
            *a *= plan.phase(base + off);
        }
    });
}
