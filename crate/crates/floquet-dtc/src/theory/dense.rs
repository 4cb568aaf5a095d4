//! Dense unitaries assembled by row operations, independent of the
//! statevector kernels so the two can cross-check each other.

use nalgebra::DMatrix;

use crate::circuit::{FloquetParams, Model};
use crate::error::{Error, Result};
use crate::lattice::{CoordinationClass, Lattice};
use crate::statevector::{Pauli, PauliString, C64};

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// A Pauli with a real sign, such as `-Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub const fn plus(pauli: Pauli) -> Self {
        Self {
            negative: false,
            pauli,
        }
    }

    pub const fn minus(pauli: Pauli) -> Self {
        Self {
            negative: true,
            pauli,
        }
    }
}

/// Per-site kick axes of the modified cluster circuit and the per-site
/// pumped phase (`Z` on pumped sites, identity elsewhere).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliAssignment {
    pub kick: Vec<SignedPauli>,
    pub pumped: Vec<bool>,
}

impl PauliAssignment {
    /// Kick axis by coordination class `Q1..Q4` for which the two-period
    /// Ising identity holds exactly.
    pub const TABLE: [SignedPauli; 4] = [
        SignedPauli::minus(Pauli::Y),
        SignedPauli::minus(Pauli::X),
        SignedPauli::plus(Pauli::Y),
        SignedPauli::plus(Pauli::X),
    ];

    pub fn new(lattice: &Lattice) -> Self {
        Self::from_table(lattice, Self::TABLE)
    }

    pub fn from_table(lattice: &Lattice, table: [SignedPauli; 4]) -> Self {
        let n = lattice.n_sites();
        let kick = (0..n)
            .map(|j| {
                table[match lattice.coordination_class(j) {
                    CoordinationClass::Q1 => 0,
                    CoordinationClass::Q2 => 1,
                    CoordinationClass::Q3 => 2,
                    CoordinationClass::Q4 => 3,
                }]
            })
            .collect();
        let pumped = (0..n)
            .map(|j| lattice.coordination_class(j).is_pumped())
            .collect();
        Self { kick, pumped }
    }
}

/// Which one-period unitary to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `RZZ(theta_J)` on every bond after `RX(theta_x)` on every site.
    Ising,
    /// `CZ` on every bond after `RX(theta_x)` on every site.
    Cz,
    /// The `CZ` cycle followed by `Z` on every pumped site.
    CzPumped,
    /// `CZ` on every bond after `exp(-i theta_x F_j / 2)` with the per-site
    /// axes of [`PauliAssignment`].
    CzModified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

fn check_capacity(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::Capacity {
            what: "dense matrix",
            qubits: n,
            limit,
        });
    }
    Ok(())
}

impl DenseUnitary {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits, MAX_DENSE_QUBITS)?;
        let dim = 1 << n_qubits;
        Ok(Self {
            n_qubits,
            matrix: DMatrix::identity(dim, dim),
        })
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidCircuit(format!(
                "{}x{} is not a register operator",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_capacity(n_qubits, MAX_DENSE_QUBITS)?;
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// `max |U^dagger U - I|` elementwise.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        max_abs_diff(&g, &id)
    }

    /// `self = op * self` for a 2x2 operator on `site`.
    pub fn left_single(&mut self, site: usize, op: [[C64; 2]; 2]) {
        let bit = 1 << site;
        let cols = self.matrix.ncols();
        for i in (0..self.dim()).filter(|i| i & bit == 0) {
            let j = i | bit;
            for c in 0..cols {
                let (x, y) = (self.matrix[(i, c)], self.matrix[(j, c)]);
                self.matrix[(i, c)] = op[0][0] * x + op[0][1] * y;
                self.matrix[(j, c)] = op[1][0] * x + op[1][1] * y;
            }
        }
    }

    /// `self = D * self` for the diagonal operator `D_ii = phase(i)`.
    pub fn left_diagonal(&mut self, phase: impl Fn(usize) -> C64) {
        for i in 0..self.dim() {
            let mut row = self.matrix.row_mut(i);
            row *= phase(i);
        }
    }

    /// `self = other * self`.
    pub fn left_mul(&mut self, other: &DenseUnitary) {
        self.matrix = &other.matrix * &self.matrix;
    }

    pub fn mul(&self, other: &DenseUnitary) -> DenseUnitary {
        DenseUnitary {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn adjoint(&self) -> DenseUnitary {
        DenseUnitary {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `min_phi |A - e^{i phi} B|_F / |A|_F`, attained at `phi = arg tr(B^dagger A)`.
pub fn phase_invariant_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes differ");
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let num: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Dense matrix of a Pauli string on `n` qubits.
pub fn pauli_matrix(n: usize, pauli: &PauliString) -> Result<DMatrix<C64>> {
    check_capacity(n, MAX_DENSE_QUBITS)?;
    if pauli.max_site() >= n {
        return Err(Error::InvalidCircuit(format!("{pauli} acts outside {n} qubits")));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut row = col;
        let mut amp = C64::new(1.0, 0.0);
        for (site, p) in pauli.ops() {
            let bit = (col >> site) & 1 == 1;
            row ^= match p {
                Pauli::Z => 0,
                _ => 1 << site,
            };
            amp *= match (p, bit) {
                (Pauli::X, _) | (Pauli::Z, false) => C64::new(1.0, 0.0),
                (Pauli::Z, true) => C64::new(-1.0, 0.0),
                (Pauli::Y, false) => C64::new(0.0, 1.0),
                (Pauli::Y, true) => C64::new(0.0, -1.0),
            };
        }
        m[(row, col)] = amp;
    }
    Ok(m)
}

/// `exp(-i theta P / 2)` for a signed single-site Pauli.
fn rotation(axis: SignedPauli, theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let s = if axis.negative { -s } else { s };
    let c = C64::new(c, 0.0);
    let z = C64::new(0.0, 0.0);
    match axis.pauli {
        Pauli::X => [[c, C64::new(0.0, -s)], [C64::new(0.0, -s), c]],
        Pauli::Y => [[c, C64::new(-s, 0.0)], [C64::new(s, 0.0), c]],
        Pauli::Z => [[c + C64::new(0.0, -s), z], [z, c + C64::new(0.0, s)]],
    }
}

fn bit(i: usize, s: usize) -> bool {
    (i >> s) & 1 == 1
}

/// One Floquet period as a dense matrix. `params.model` is ignored in
/// favour of `variant`; `theta_j` only enters the Ising variant.
pub fn dense_unitary(lattice: &Lattice, params: FloquetParams, variant: Variant) -> Result<DenseUnitary> {
    let n = lattice.n_sites();
    let mut u = DenseUnitary::identity(n)?;
    let bonds: Vec<(usize, usize)> = lattice.edges().iter().map(|e| (e.a, e.b)).collect();
    match variant {
        Variant::CzModified => {
            let assignment = PauliAssignment::new(lattice);
            for (j, &axis) in assignment.kick.iter().enumerate() {
                u.left_single(j, rotation(axis, params.theta_x));
            }
        }
        _ => {
            for j in 0..n {
                u.left_single(j, rotation(SignedPauli::plus(Pauli::X), params.theta_x));
            }
        }
    }
    match variant {
        Variant::Ising => {
            let theta = params.theta_j;
            u.left_diagonal(|i| {
                let k: f64 = bonds
                    .iter()
                    .map(|&(a, b)| if bit(i, a) == bit(i, b) { 1.0 } else { -1.0 })
                    .sum();
                C64::cis(-theta * k / 2.0)
            });
        }
        _ => {
            u.left_diagonal(|i| {
                let odd = bonds.iter().filter(|&&(a, b)| bit(i, a) && bit(i, b)).count();
                C64::new(if odd % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            });
        }
    }
    if variant == Variant::CzPumped {
        let pumped = lattice.charge_pump_set();
        u.left_diagonal(|i| {
            let ones = pumped.iter().filter(|&&j| bit(i, j)).count();
            C64::new(if ones % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        });
    }
    Ok(u)
}

pub(crate) fn params_for(model: Model, theta_x: f64) -> FloquetParams {
    match model {
        Model::Ising => FloquetParams::ising(theta_x),
        Model::Cz => FloquetParams::cz(theta_x),
    }
}
