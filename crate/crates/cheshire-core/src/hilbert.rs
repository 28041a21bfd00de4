//! Exact complex linear algebra over the 4-dimensional spin ⊗ path space.
//!
//! The basis order is fixed as `[↑I, ↓I, ↑II, ↓II]`: spin quantized along +z,
//! I/II the two interferometer paths. Everything downstream (beamline elements,
//! weak values, detector rates) is built on the types here.

use num_complex::Complex64;

/// Tolerance for exact-algebra checks: hermiticity and unitarity flags,
/// norm preservation, state-vector comparisons. Dimension-4 double-precision
/// arithmetic stays well inside this.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// A 2×2 complex matrix, used for single-factor (spin-only or path-only) operators.
pub type Mat2 = [[Complex64; 2]; 2];

/// Index into the fixed `[↑I, ↓I, ↑II, ↓II]` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    UpI = 0,
    DownI = 1,
    UpII = 2,
    DownII = 3,
}

impl Basis {
    /// All four basis labels in storage order.
    pub const ALL: [Basis; 4] = [Basis::UpI, Basis::DownI, Basis::UpII, Basis::DownII];
}

/// Spin directions with closed-form unit spinors in the z-basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinDirection {
    PlusX,
    MinusX,
    PlusZ,
    MinusZ,
}

/// Unit spinor for the given direction: `|S_x;±⟩ = (|↑⟩ ± |↓⟩)/√2`,
/// `|S_z;±⟩` the z-basis vectors.
pub fn spin_state(direction: SpinDirection) -> [Complex64; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match direction {
        SpinDirection::PlusX => [h, h],
        SpinDirection::MinusX => [h, -h],
        SpinDirection::PlusZ => [one, zero],
        SpinDirection::MinusZ => [zero, one],
    }
}

/// 2×2 identity.
pub fn identity2() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

/// Pauli σ_z in the z-basis.
pub fn sigma_z() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, -one]]
}

/// A pure state of the spin ⊗ path system. Amplitudes are stored in the fixed
/// basis order; sub-normalized states arise after absorption.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinPathState {
    amp: [Complex64; 4],
}

impl SpinPathState {
    /// Build a state from raw amplitudes. All amplitudes must be finite.
    pub fn new(amp: [Complex64; 4]) -> Self {
        assert!(
            amp.iter().all(|a| a.re.is_finite() && a.im.is_finite()),
            "state amplitudes must be finite"
        );
        Self { amp }
    }

    /// Build a state from one spinor per path: `path_i ⊗ |I⟩ + path_ii ⊗ |II⟩`.
    pub fn from_path_spinors(path_i: [Complex64; 2], path_ii: [Complex64; 2]) -> Self {
        Self::new([path_i[0], path_i[1], path_ii[0], path_ii[1]])
    }

    /// Amplitude of one basis component.
    pub fn amplitude(&self, basis: Basis) -> Complex64 {
        self.amp[basis as usize]
    }

    /// All four amplitudes in basis order.
    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amp
    }

    /// Squared norm Σ|amp_k|².
    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest elementwise amplitude difference to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Inner product `⟨bra|ket⟩`, conjugate-linear in the first argument.
pub fn inner(bra: &SpinPathState, ket: &SpinPathState) -> Complex64 {
    bra.amp
        .iter()
        .zip(ket.amp.iter())
        .map(|(b, k)| b.conj() * k)
        .sum()
}

/// Apply an operator to a state (matrix-vector product).
pub fn apply(op: &BeamOperator, s: &SpinPathState) -> SpinPathState {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (r, out_r) in out.iter_mut().enumerate() {
        for c in 0..4 {
            *out_r += op.m[r][c] * s.amp[c];
        }
    }
    SpinPathState::new(out)
}

/// A 4×4 operator on the spin ⊗ path space: beamline elements and observables.
///
/// The `hermitian`/`unitary` flags are computed from the matrix at construction,
/// elementwise to [`ALGEBRA_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct BeamOperator {
    m: [[Complex64; 4]; 4],
    hermitian: bool,
    unitary: bool,
}

impl BeamOperator {
    /// Wrap a matrix, computing the hermitian/unitary flags. Entries must be finite.
    pub fn from_matrix(m: [[Complex64; 4]; 4]) -> Self {
        assert!(
            m.iter()
                .flatten()
                .all(|a| a.re.is_finite() && a.im.is_finite()),
            "operator entries must be finite"
        );
        let hermitian = max_dev_from_adjoint(&m) <= ALGEBRA_TOL;
        let unitary = max_dev_from_unitarity(&m) <= ALGEBRA_TOL;
        Self {
            m,
            hermitian,
            unitary,
        }
    }

    /// The 4×4 identity.
    pub fn identity() -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self::from_matrix(m)
    }

    /// Diagonal operator from four diagonal entries.
    pub fn from_diagonal(d: [Complex64; 4]) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = d[i];
        }
        Self::from_matrix(m)
    }

    /// Matrix entry at (row, col).
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Borrow the raw matrix.
    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = self.m[c][r].conj();
            }
        }
        Self::from_matrix(m)
    }

    /// Matrix product `self · rhs` (rhs applied first when acting on kets).
    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                for k in 0..4 {
                    *entry += self.m[r][k] * rhs.m[k][c];
                }
            }
        }
        Self::from_matrix(m)
    }

    /// Linear combination `a·self + b·rhs`, flags recomputed.
    pub fn linear_combination(&self, a: Complex64, rhs: &Self, b: Complex64) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a * self.m[r][c] + b * rhs.m[r][c];
            }
        }
        Self::from_matrix(m)
    }

    /// Largest elementwise difference to another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }
}

/// Kronecker product of a spin operator and a path operator in the fixed basis:
/// row index = 2·path + spin, so `tensor(σ_z, Π_I)` is `diag(+1, −1, 0, 0)`.
pub fn tensor(spin_op: Mat2, path_op: Mat2) -> BeamOperator {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for p in 0..2 {
        for s in 0..2 {
            for q in 0..2 {
                for t in 0..2 {
                    m[2 * p + s][2 * q + t] = path_op[p][q] * spin_op[s][t];
                }
            }
        }
    }
    BeamOperator::from_matrix(m)
}

fn max_dev_from_adjoint(m: &[[Complex64; 4]; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            worst = worst.max((m[r][c] - m[c][r].conj()).norm());
        }
    }
    worst
}

fn max_dev_from_unitarity(m: &[[Complex64; 4]; 4]) -> f64 {
    // max |m†m − 1| elementwise
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                acc += m[k][r].conj() * m[k][c];
            }
            let target = if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}
