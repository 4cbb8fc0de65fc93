//! Dense 4×4 complex linear algebra for two-qubit operators.
//!
//! Basis ordering is `|q1 q2⟩ ∈ {|00⟩, |01⟩, |10⟩, |11⟩}`, so qubit 1 is the
//! left tensor factor.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{HERMITIAN_TOL, UNITARITY_TOL};

pub type CMat4 = Matrix4<Complex64>;
pub type CMat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Single-qubit Pauli matrix.
pub fn pauli(axis: Axis) -> CMat2 {
    match axis {
        Axis::X => CMat2::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => CMat2::new(ZERO, -I, I, ZERO),
        Axis::Z => CMat2::new(ONE, ZERO, ZERO, -ONE),
    }
}

pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `σ^axis ⊗ I` for qubit 1, `I ⊗ σ^axis` for qubit 2.
pub fn pauli_on_qubit(axis: Axis, qubit: u8) -> HermitianGenerator {
    let p = pauli(axis);
    let id = CMat2::identity();
    let m = match qubit {
        1 => kron(&p, &id),
        2 => kron(&id, &p),
        _ => panic!("qubit index must be 1 or 2, got {qubit}"),
    };
    HermitianGenerator(m)
}

/// `σ₁^a σ₂^b`.
pub fn pauli_pair(a: Axis, b: Axis) -> HermitianGenerator {
    HermitianGenerator(kron(&pauli(a), &pauli(b)))
}

fn max_abs(m: &CMat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &CMat4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_deviation(m: &CMat4) -> f64 {
    let gram = max_abs(&(m.adjoint() * m - CMat4::identity()));
    let det = (m.determinant().norm() - 1.0).abs();
    gram.max(det)
}

/// Hermitian 4×4 operator, typically a Hamiltonian in units of angular frequency.
#[derive(Clone, PartialEq)]
pub struct HermitianGenerator(CMat4);

impl HermitianGenerator {
    pub fn new(m: CMat4) -> Result<Self> {
        let deviation = hermiticity_deviation(&m);
        if deviation > HERMITIAN_TOL * (1.0 + max_abs(&m)) || !deviation.is_finite() {
            return Err(Error::NotHermitian { deviation });
        }
        // Symmetrize so the eigensolver sees an exactly Hermitian matrix.
        Ok(Self((m + m.adjoint()).scale(0.5)))
    }

    pub(crate) fn from_trusted(m: CMat4) -> Self {
        debug_assert!(hermiticity_deviation(&m) < 1e-12);
        Self(m)
    }

    pub fn zero() -> Self {
        Self(CMat4::zeros())
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn into_matrix(self) -> CMat4 {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Weighted sum `Σ wᵢ Hᵢ`.
    pub fn combine<'a>(terms: impl IntoIterator<Item = (f64, &'a HermitianGenerator)>) -> Self {
        let mut acc = CMat4::zeros();
        for (w, h) in terms {
            if w != 0.0 {
                acc += h.0.scale(w);
            }
        }
        Self(acc)
    }
}

impl std::ops::Add for &HermitianGenerator {
    type Output = HermitianGenerator;
    fn add(self, rhs: &HermitianGenerator) -> HermitianGenerator {
        HermitianGenerator(self.0 + rhs.0)
    }
}

impl fmt::Debug for HermitianGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianGenerator{}", self.0)
    }
}

/// 4×4 unitary.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix(CMat4);

impl UnitaryMatrix {
    pub fn new(m: CMat4) -> Result<Self> {
        Self::with_tolerance(m, UNITARITY_TOL)
    }

    /// Accepts `m` when `U†U = I` and `|det U| = 1` hold within `tol`.
    pub fn with_tolerance(m: CMat4, tol: f64) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if deviation > tol || !deviation.is_finite() {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be unitary (products of unitaries,
    /// closed-form exponentials).
    pub(crate) fn from_trusted(m: CMat4) -> Self {
        debug_assert!(unitarity_deviation(&m) < 1e-9, "lost unitarity: {}", unitarity_deviation(&m));
        Self(m)
    }

    pub fn identity() -> Self {
        Self(CMat4::identity())
    }

    /// Local unitary `a ⊗ b`.
    pub fn local(a: &CMat2, b: &CMat2) -> Result<Self> {
        Self::new(kron(a, b))
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn into_matrix(self) -> CMat4 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    pub fn phase(&self, phi: f64) -> Self {
        Self(self.0 * Complex64::from_polar(1.0, phi))
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    /// Max-abs entry distance to `other`.
    pub fn distance(&self, other: &UnitaryMatrix) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0 * rhs.0)
    }
}

impl Mul for UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0 * rhs.0)
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitaryMatrix{}", self.0)
    }
}

/// `exp(-i H t)` through the eigendecomposition `H = V Λ V†`.
pub fn expm_hermitian(h: &HermitianGenerator, t: f64) -> UnitaryMatrix {
    if t == 0.0 {
        return UnitaryMatrix::identity();
    }
    let eig = SymmetricEigen::new(h.0);
    let v = eig.eigenvectors;
    let phases = CMat4::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t)));
    UnitaryMatrix::from_trusted(v * phases * v.adjoint())
}

/// Closed form `exp(-i θ P / 2)` for an involutory Hermitian `P` (`P² = I`).
pub fn exp_involution(p: &HermitianGenerator, theta: f64) -> UnitaryMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    UnitaryMatrix::from_trusted(CMat4::identity().scale(c) - p.0 * Complex64::new(0.0, s))
}

/// Phase-invariant gate agreement `|tr(U†V)| / 4`.
pub fn fidelity(u: &UnitaryMatrix, v: &UnitaryMatrix) -> f64 {
    let tr = (u.0.adjoint() * v.0).trace();
    (tr.norm() / 4.0).min(1.0)
}

/// Generic eigenvalues of a normal 4×4 matrix.
///
/// The Hermitian and anti-Hermitian parts of a normal matrix commute, so a
/// generic real combination of them shares its eigenvectors with `m`.
pub fn normal_eigenvalues(m: &CMat4) -> [Complex64; 4] {
    let re = (m + m.adjoint()).scale(0.5);
    let im = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    // Irrational weight keeps accidental degeneracies of the combination away.
    let mixed = re + im.scale(std::f64::consts::FRAC_1_SQRT_2 * 0.7390851332151607);
    let v = SymmetricEigen::new(mixed).eigenvectors;
    let d = v.adjoint() * m * v;
    [d[(0, 0)], d[(1, 1)], d[(2, 2)], d[(3, 3)]]
}
