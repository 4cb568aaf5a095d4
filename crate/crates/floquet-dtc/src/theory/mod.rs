//! Exact operator identities of the kicked circuits, verified on dense
//! matrices of small clusters.
//!
//! With `theta_x = pi - eps`, `U(theta)` the kicked `CZ` period and `Z_P`
//! the product of `Z` over pumped sites (odd coordination), the two-period
//! identities are
//!
//! * `U(pi - eps)^2 = U(-eps) Z_P U(-eps)`,
//! * `V(pi - eps)^2 = U'(-eps) Z_P U(-eps)` for the Ising period `V` at
//!   `theta_J = -pi/2` and the modified period `U'` of [`Variant::CzModified`],
//!
//! each up to a global phase.

mod dense;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::circuit::{FloquetParams, Model};
use crate::error::{Error, Result};
use crate::lattice::{build_preset, Lattice};
use crate::statevector::{Pauli, PauliString, C64};

pub use dense::{
    dense_unitary, pauli_matrix, phase_invariant_distance, DenseUnitary, PauliAssignment, SignedPauli,
    Variant, MAX_DENSE_QUBITS,
};
use dense::{max_abs_diff, params_for};

/// Largest cluster for the identity checks.
pub const MAX_CHECK_QUBITS: usize = 10;
/// Largest cluster for the eigendecomposition.
pub const MAX_SPECTRUM_QUBITS: usize = 8;
/// Distance below which an identity counts as exact.
pub const EXACT_TOLERANCE: f64 = 1e-10;

fn check_size(lattice: &Lattice, limit: usize) -> Result<()> {
    let n = lattice.n_sites();
    if n > limit {
        return Err(Error::Capacity {
            what: "dense identity check",
            qubits: n,
            limit,
        });
    }
    Ok(())
}

fn squared(u: &DenseUnitary) -> DMatrix<C64> {
    u.matrix() * u.matrix()
}

/// `U(pi-eps)^2` against `U(-eps) Z_P U(-eps)` for the kicked `CZ` period.
pub fn check_two_period_cz(lattice: &Lattice, epsilon: f64) -> Result<f64> {
    check_size(lattice, MAX_CHECK_QUBITS)?;
    let lhs = squared(&dense_unitary(
        lattice,
        FloquetParams::cz(std::f64::consts::PI - epsilon),
        Variant::Cz,
    )?);
    let back = FloquetParams::cz(-epsilon);
    let rhs =
        dense_unitary(lattice, back, Variant::Cz)?.mul(&dense_unitary(lattice, back, Variant::CzPumped)?);
    Ok(phase_invariant_distance(&lhs, rhs.matrix()))
}

/// `V(pi-eps)^2` for the Ising period at `theta_J = -pi/2` against
/// `U'(-eps) Z_P U(-eps)`.
pub fn check_two_period_ising(lattice: &Lattice, epsilon: f64) -> Result<f64> {
    check_size(lattice, MAX_CHECK_QUBITS)?;
    let lhs = squared(&dense_unitary(
        lattice,
        FloquetParams::ising(std::f64::consts::PI - epsilon),
        Variant::Ising,
    )?);
    let back = FloquetParams::cz(-epsilon);
    let rhs = dense_unitary(lattice, back, Variant::CzModified)?.mul(&dense_unitary(
        lattice,
        back,
        Variant::CzPumped,
    )?);
    Ok(phase_invariant_distance(&lhs, rhs.matrix()))
}

/// Conjugation of a single-site Pauli by the bond `CZ` layer `C`:
/// `C P_k C` equals `P_k` for `Z` and `P_k prod_{l ~ k} Z_l` for `X`, `Y`.
/// Returns the largest elementwise error.
pub fn check_cluster_conjugation(lattice: &Lattice, site: usize, pauli: Pauli) -> Result<f64> {
    check_size(lattice, MAX_CHECK_QUBITS)?;
    let n = lattice.n_sites();
    if site >= n {
        return Err(Error::InvalidCircuit(format!(
            "site {site} outside a {n}-site cluster"
        )));
    }
    let entangler = dense_unitary(lattice, FloquetParams::cz(0.0), Variant::Cz)?;
    let p = pauli_matrix(n, &PauliString::single(site, pauli))?;
    let lhs = entangler.matrix().adjoint() * p * entangler.matrix();
    let mut ops = vec![(site, pauli)];
    if pauli != Pauli::Z {
        ops.extend(lattice.neighbors(site).iter().map(|&l| (l, Pauli::Z)));
    }
    let rhs = pauli_matrix(n, &PauliString::new(ops)?)?;
    Ok(max_abs_diff(&lhs, &rhs))
}

/// `cos(t) + i sin(t) P` for a Pauli-string matrix.
fn pauli_exponential(p: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let dim = p.nrows();
    DMatrix::<C64>::identity(dim, dim) * C64::new(t.cos(), 0.0) + p * C64::new(0.0, t.sin())
}

/// Without pumped sites, `U(pi-eps)^2 = exp(i eps/2 sum_k K_k) exp(i eps/2 sum_k X_k)`
/// with the cluster stabilisers `K_k = X_k prod_{l ~ k} Z_l`. Both sums
/// consist of commuting terms, so each exponential is a product.
pub fn check_exact_heff_cz(lattice: &Lattice, epsilon: f64) -> Result<f64> {
    check_size(lattice, MAX_CHECK_QUBITS)?;
    let pumped = lattice.charge_pump_set();
    if !pumped.is_empty() {
        return Err(Error::Precondition(format!(
            "closed-form two-period exponent needs no pumped sites; {} has {}",
            lattice.name(),
            pumped.len()
        )));
    }
    let n = lattice.n_sites();
    let lhs = squared(&dense_unitary(
        lattice,
        FloquetParams::cz(std::f64::consts::PI - epsilon),
        Variant::Cz,
    )?);
    let dim = 1usize << n;
    let mut cluster = DMatrix::<C64>::identity(dim, dim);
    let mut field = DMatrix::<C64>::identity(dim, dim);
    for k in 0..n {
        let mut ops = vec![(k, Pauli::X)];
        ops.extend(lattice.neighbors(k).iter().map(|&l| (l, Pauli::Z)));
        cluster = pauli_exponential(&pauli_matrix(n, &PauliString::new(ops)?)?, epsilon / 2.0) * cluster;
        field = pauli_exponential(
            &pauli_matrix(n, &PauliString::single(k, Pauli::X))?,
            epsilon / 2.0,
        ) * field;
    }
    Ok(phase_invariant_distance(&lhs, &(cluster * field)))
}

/// Deviation of `W^dagger X_j W` from `-X_j` (pumped `j`) or `+X_j`
/// (unpumped `j`) for the two-period unitary `W = U(pi-eps)^2`, as
/// `|.|_F / sqrt(dim)`. Exact at `eps = 0`, linear in `eps` otherwise.
pub fn check_anticommutation(lattice: &Lattice, site: usize, epsilon: f64, model: Model) -> Result<f64> {
    check_size(lattice, MAX_CHECK_QUBITS)?;
    let n = lattice.n_sites();
    if site >= n {
        return Err(Error::InvalidCircuit(format!(
            "site {site} outside a {n}-site cluster"
        )));
    }
    let variant = match model {
        Model::Ising => Variant::Ising,
        Model::Cz => Variant::Cz,
    };
    let w = squared(&dense_unitary(
        lattice,
        params_for(model, std::f64::consts::PI - epsilon),
        variant,
    )?);
    let x = pauli_matrix(n, &PauliString::single(site, Pauli::X))?;
    let conj = w.adjoint() * &x * &w;
    let sign = if lattice.coordination_class(site).is_pumped() {
        -1.0
    } else {
        1.0
    };
    let dev = conj - x * C64::new(sign, 0.0);
    Ok(dev.norm() / ((1usize << n) as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStatus {
    /// Every eigenphase has a partner at `+pi` reached by `X_s`.
    Paired,
    Unpaired,
    /// No pumped site, so no pairing is implied.
    NotRequired,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub status: PairingStatus,
    /// Pumped site whose flip connects partners.
    pub site: Option<usize>,
    /// Largest distance from `e + pi` to the nearest eigenphase.
    pub max_mismatch: f64,
    /// Smallest `|V'^dagger X_s V|_F^2 / dim V` over eigenspaces `V` with
    /// partner space `V'`.
    pub min_overlap: f64,
    pub n_eigenspaces: usize,
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Eigen-decompose the two-period kicked `CZ` unitary and test whether its
/// spectrum splits into pairs `(e, e + pi)` exchanged by `X_s`, with `s`
/// the lowest pumped site.
pub fn quasienergy_pi_pairs(lattice: &Lattice, epsilon: f64) -> Result<PairingReport> {
    const CLUSTER_TOL: f64 = 1e-8;
    check_size(lattice, MAX_SPECTRUM_QUBITS)?;
    let n = lattice.n_sites();
    let Some(&site) = lattice.charge_pump_set().first() else {
        return Ok(PairingReport {
            status: PairingStatus::NotRequired,
            site: None,
            max_mismatch: 0.0,
            min_overlap: 1.0,
            n_eigenspaces: 0,
        });
    };
    let w = squared(&dense_unitary(
        lattice,
        FloquetParams::cz(std::f64::consts::PI - epsilon),
        Variant::Cz,
    )?);
    // W is normal, so its Hermitian and anti-Hermitian parts commute and a
    // generic real combination of them shares W's eigenvectors.
    let a = (&w + w.adjoint()) * C64::new(0.5, 0.0);
    let b = (&w - w.adjoint()) * C64::new(0.0, -0.5);
    let h = a + b * C64::new(0.577_215_664_9, 0.0);
    let eig = SymmetricEigen::new(h);
    let vecs = eig.eigenvectors;
    let dim = 1usize << n;
    let mut phases = Vec::with_capacity(dim);
    for c in 0..dim {
        let v = vecs.column(c);
        let wv = &w * v;
        let lambda = v.dotc(&wv);
        let resid = (wv - v * lambda).norm();
        if resid > 1e-8 {
            return Err(Error::Numerical(format!("eigenvector residual {resid:e}")));
        }
        phases.push(lambda.arg());
    }
    let max_mismatch = phases
        .iter()
        .map(|&e| {
            phases
                .iter()
                .map(|&f| phase_gap(f, e + std::f64::consts::PI))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| phases[i].total_cmp(&phases[j]));
    let mut spaces: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        match spaces
            .iter_mut()
            .find(|(p, _)| phase_gap(*p, phases[i]) < CLUSTER_TOL)
        {
            Some((_, members)) => members.push(i),
            None => spaces.push((phases[i], vec![i])),
        }
    }
    let x = pauli_matrix(n, &PauliString::single(site, Pauli::X))?;
    let basis = |members: &[usize]| {
        DMatrix::from_columns(&members.iter().map(|&c| vecs.column(c)).collect::<Vec<_>>())
    };
    let mut min_overlap = f64::INFINITY;
    for (phase, members) in &spaces {
        let partner = spaces
            .iter()
            .min_by(|p, q| {
                phase_gap(p.0, phase + std::f64::consts::PI)
                    .total_cmp(&phase_gap(q.0, phase + std::f64::consts::PI))
            })
            .expect("at least one eigenspace");
        let v = basis(members);
        let vp = basis(&partner.1);
        let m = vp.adjoint() * &x * v;
        min_overlap = min_overlap.min(m.norm_squared() / members.len() as f64);
    }
    let paired = max_mismatch < EXACT_TOLERANCE && (1.0 - min_overlap).abs() < EXACT_TOLERANCE;
    Ok(PairingReport {
        status: if paired {
            PairingStatus::Paired
        } else {
            PairingStatus::Unpaired
        },
        site: Some(site),
        max_mismatch,
        min_overlap,
        n_eigenspaces: spaces.len(),
    })
}

/// Built-in clusters: chains of 2 to 6 sites, the 4-cycle, the 5-site
/// cross and the 4-site star.
pub fn suite_clusters() -> Vec<Lattice> {
    let names = [
        "chain(2)", "chain(3)", "chain(4)", "chain(5)", "chain(6)", "cycle(4)", "star(4)", "star(3)",
    ];
    names
        .iter()
        .map(|n| build_preset(n).expect("built-in cluster expressions are valid"))
        .collect()
}

pub const SUITE_EPSILONS: [f64; 4] = [
    0.0,
    0.05 * std::f64::consts::PI,
    0.1 * std::f64::consts::PI,
    0.2 * std::f64::consts::PI,
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub lattice: String,
    pub epsilon: f64,
    pub site: Option<usize>,
    /// `None` when the check does not apply to this cluster.
    pub distance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    fn measured(check: &str, lattice: &Lattice, epsilon: f64, site: Option<usize>, distance: f64) -> Self {
        Self {
            check: check.into(),
            lattice: lattice.name().into(),
            epsilon,
            site,
            distance: Some(distance),
            pass: distance < EXACT_TOLERANCE,
            note: None,
        }
    }

    fn from_result(
        check: &str,
        lattice: &Lattice,
        epsilon: f64,
        site: Option<usize>,
        r: Result<f64>,
    ) -> Self {
        match r {
            Ok(d) => Self::measured(check, lattice, epsilon, site, d),
            // A check that does not apply is not a failure of the identity.
            Err(Error::Precondition(msg)) => Self {
                check: check.into(),
                lattice: lattice.name().into(),
                epsilon,
                site,
                distance: None,
                pass: true,
                note: Some(msg),
            },
            Err(e) => Self {
                check: check.into(),
                lattice: lattice.name().into(),
                epsilon,
                site,
                distance: None,
                pass: false,
                note: Some(e.to_string()),
            },
        }
    }
}

/// Every identity on every built-in cluster. The factorisations run at all
/// [`SUITE_EPSILONS`]; the conjugation, pump algebra and pairing checks at
/// `eps = 0`, where they are exact.
pub fn run_suite() -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for lattice in suite_clusters() {
        for &eps in &SUITE_EPSILONS {
            out.push(CheckRecord::from_result(
                "two_period_cz",
                &lattice,
                eps,
                None,
                check_two_period_cz(&lattice, eps),
            ));
            out.push(CheckRecord::from_result(
                "two_period_ising",
                &lattice,
                eps,
                None,
                check_two_period_ising(&lattice, eps),
            ));
            out.push(CheckRecord::from_result(
                "exact_heff_cz",
                &lattice,
                eps,
                None,
                check_exact_heff_cz(&lattice, eps),
            ));
        }
        for site in 0..lattice.n_sites() {
            for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                let check = format!("cluster_conjugation_{pauli:?}").to_lowercase();
                out.push(CheckRecord::from_result(
                    &check,
                    &lattice,
                    0.0,
                    Some(site),
                    check_cluster_conjugation(&lattice, site, pauli),
                ));
            }
            for model in [Model::Cz, Model::Ising] {
                let check = format!("anticommutation_{}", model.name()).to_lowercase();
                out.push(CheckRecord::from_result(
                    &check,
                    &lattice,
                    0.0,
                    Some(site),
                    check_anticommutation(&lattice, site, 0.0, model),
                ));
            }
        }
        out.push(match quasienergy_pi_pairs(&lattice, 0.0) {
            Ok(r) => CheckRecord {
                check: "pi_pairing".into(),
                lattice: lattice.name().into(),
                epsilon: 0.0,
                site: r.site,
                distance: (r.status != PairingStatus::NotRequired)
                    .then_some(r.max_mismatch.max((1.0 - r.min_overlap).abs())),
                pass: r.status != PairingStatus::Unpaired,
                note: (r.status == PairingStatus::NotRequired)
                    .then(|| "no pumped site; pairing not required".into()),
            },
            Err(e) => CheckRecord {
                check: "pi_pairing".into(),
                lattice: lattice.name().into(),
                epsilon: 0.0,
                site: None,
                distance: None,
                pass: false,
                note: Some(e.to_string()),
            },
        });
    }
    out
}
