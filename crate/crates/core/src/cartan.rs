//! Local-equivalence analysis of two-qubit gates.
//!
//! Gates are compared through the invariants of `m = U_Bᵀ U_B`, where `U_B` is
//! the gate written in the magic (Bell) basis. Local gates act on `U_B` as real
//! orthogonal matrices, so the spectrum of `m` depends only on the class.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{canonicalize_weyl, ClassVector};
use crate::qmat::{
    exp_involution, fidelity, normal_eigenvalues, pauli_on_qubit, pauli_pair, Axis, CMat4,
    HermitianGenerator, UnitaryMatrix,
};
use crate::tol::{CLUSTER_TOL, CNOT_CLASS_TOL};

/// Columns `(|00⟩+|11⟩, −i|00⟩+i|11⟩, −i|01⟩−i|10⟩, |01⟩−|10⟩)/√2`.
pub fn magic_basis() -> CMat4 {
    let s = FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x * s, 0.0);
    let i = |x: f64| Complex64::new(0.0, x * s);
    let z = Complex64::new(0.0, 0.0);
    CMat4::new(
        r(1.0), i(-1.0), z, z,
        z, z, i(-1.0), r(1.0),
        z, z, i(-1.0), r(-1.0),
        r(1.0), i(1.0), z, z,
    )
}

/// `m = U_Bᵀ U_B` with `U_B = B† U B`.
pub fn m_matrix(u: &CMat4) -> CMat4 {
    let b = magic_basis();
    let ub = b.adjoint() * u * b;
    ub.transpose() * ub
}

/// `U / det(U)^{1/4}`, a special-unitary representative of the gate.
pub fn special_unitary(u: &UnitaryMatrix) -> CMat4 {
    let root = u.determinant().powf(0.25);
    u.matrix().map(|z| z / root)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalInvariants {
    #[serde(with = "complex_pair")]
    pub g1: Complex64,
    pub g2: f64,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

impl LocalInvariants {
    /// Invariants of the CNOT class.
    pub const CNOT: LocalInvariants = LocalInvariants { g1: Complex64::new(0.0, 0.0), g2: 1.0 };
    pub const IDENTITY: LocalInvariants = LocalInvariants { g1: Complex64::new(1.0, 0.0), g2: 3.0 };

    pub fn distance(&self, other: &LocalInvariants) -> f64 {
        (self.g1 - other.g1).norm().max((self.g2 - other.g2).abs())
    }
}

pub fn local_invariants(u: &UnitaryMatrix) -> LocalInvariants {
    let m = m_matrix(u.matrix());
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = (m * m).trace();
    LocalInvariants { g1: tr * tr / (det * 16.0), g2: ((tr * tr - tr2) / (det * 4.0)).re }
}

/// Eigenvalues of `m` for the entangler `exp(-(i/2)(c1 σxσx + c2 σyσy + c3 σzσz))`,
/// ordered like the magic basis columns.
fn class_spectrum(c: ClassVector) -> [Complex64; 4] {
    let ClassVector { c1, c2, c3 } = c;
    [c1 - c2 + c3, -c1 + c2 + c3, c1 + c2 - c3, -(c1 + c2 + c3)].map(|x| Complex64::from_polar(1.0, -x))
}

/// Closed-form invariants of the class `c`, from the spectrum of `m`.
pub fn invariants_from_class(c: ClassVector) -> LocalInvariants {
    let lam = class_spectrum(c);
    let tr: Complex64 = lam.iter().sum();
    let tr2: Complex64 = lam.iter().map(|l| l * l).sum();
    LocalInvariants { g1: tr * tr / 16.0, g2: ((tr * tr - tr2) / 4.0).re }
}

/// `exp(-(i/2)(c1 σxσx + c2 σyσy + c3 σzσz))` as a product of three commuting
/// single-term exponentials.
pub fn entangler_from_class(c: ClassVector) -> UnitaryMatrix {
    let xx = exp_involution(&pauli_pair(Axis::X, Axis::X), c.c1);
    let yy = exp_involution(&pauli_pair(Axis::Y, Axis::Y), c.c2);
    let zz = exp_involution(&pauli_pair(Axis::Z, Axis::Z), c.c3);
    &(&xx * &yy) * &zz
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

// Snap eigenphases that coincide within CLUSTER_TOL onto a common value.
fn cluster_phases(mut phases: [f64; 4]) -> [f64; 4] {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if circular_distance(phases[i], phases[j]) < CLUSTER_TOL {
                phases[j] = phases[i];
            }
        }
    }
    phases
}

/// Canonical class vector of an arbitrary two-qubit unitary.
pub fn class_vector_from_unitary(u: &UnitaryMatrix) -> ClassVector {
    let su = special_unitary(u);
    let target = local_invariants(&UnitaryMatrix::from_trusted(su));
    let phases = cluster_phases(normal_eigenvalues(&m_matrix(&su)).map(|z| z.arg()));

    // θ = (−c1+c2−c3, c1−c2−c3, −c1−c2+c3, c1+c2+c3) up to labelling and 2π
    // shifts; every consistent choice lands in the same orbit, the residual
    // picks the numerically cleanest one.
    let mut best: Option<(f64, ClassVector)> = None;
    for top in 0..4 {
        let rest: Vec<usize> = (0..4).filter(|&i| i != top).collect();
        let winding = (phases.iter().sum::<f64>() / TAU).round();
        for absorb in 0..4 {
            let mut th = phases;
            th[absorb] -= TAU * winding;
            let c = ClassVector::new(
                0.5 * (th[rest[1]] + th[top]),
                0.5 * (th[rest[0]] + th[top]),
                0.5 * (th[rest[2]] + th[top]),
            );
            let c = canonicalize_weyl(c);
            let residual = invariants_from_class(c).distance(&target);
            if best.map_or(true, |(r, _)| residual < r) {
                best = Some((residual, c));
            }
        }
    }
    best.expect("candidates are non-empty").1
}

/// Distance of a gate's invariants from the CNOT class invariants `(0, 1)`.
pub fn cnot_class_residual(u: &UnitaryMatrix) -> f64 {
    local_invariants(u).distance(&LocalInvariants::CNOT)
}

/// The standard CNOT, control on qubit 1 (`|10⟩ ↔ |11⟩`).
pub fn canonical_cnot() -> UnitaryMatrix {
    let one = Complex64::new(1.0, 0.0);
    let mut m = CMat4::zeros();
    m[(0, 0)] = one;
    m[(1, 1)] = one;
    m[(2, 3)] = one;
    m[(3, 2)] = one;
    UnitaryMatrix::from_trusted(m)
}

fn local_rotation(terms: &[(f64, Axis, u8)]) -> UnitaryMatrix {
    // exp(iθσ) = exp(-i(-2θ)σ/2); the listed terms act on different qubits or
    // commute, so the product is exact.
    terms.iter().fold(UnitaryMatrix::identity(), |acc, &(theta, axis, q)| {
        &acc * &exp_involution(&pauli_on_qubit(axis, q), -2.0 * theta)
    })
}

/// Flanking rotations `K1 = e^{-iπ/4 σ1y} e^{iπ/4 (σ1x − σ2x)}` and `K2 = e^{iπ/4 σ1y}`.
pub fn cnot_flanks() -> (UnitaryMatrix, UnitaryMatrix) {
    let k1 = &local_rotation(&[(-FRAC_PI_4, Axis::Y, 1)])
        * &local_rotation(&[(FRAC_PI_4, Axis::X, 1), (-FRAC_PI_4, Axis::X, 2)]);
    let k2 = local_rotation(&[(FRAC_PI_4, Axis::Y, 1)]);
    (k1, k2)
}

/// `e^{iπ/4} K1 u K2`. Maps the `exp(-iπ σxσx/4)` entangler onto the standard CNOT;
/// other members of the class map to other CNOT-class gates.
pub fn assemble_cnot(u: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    let residual = cnot_class_residual(u);
    if residual > CNOT_CLASS_TOL {
        return Err(Error::NotCnotClass { residual, class: class_vector_from_unitary(u) });
    }
    let (k1, k2) = cnot_flanks();
    Ok((&(&k1 * u) * &k2).phase(FRAC_PI_4))
}

/// `U = e^{iφ} k1 U_ent k2` with local `k1`, `k2`.
#[derive(Debug, Clone)]
pub struct CartanFactorization {
    pub phase: f64,
    pub k1: UnitaryMatrix,
    pub class: ClassVector,
    pub u_ent: UnitaryMatrix,
    pub k2: UnitaryMatrix,
}

impl CartanFactorization {
    pub fn new(phase: f64, k1: UnitaryMatrix, class: ClassVector, k2: UnitaryMatrix) -> Self {
        let u_ent = entangler_from_class(class);
        Self { phase, k1, class, u_ent, k2 }
    }

    pub fn product(&self) -> UnitaryMatrix {
        (&(&self.k1 * &self.u_ent) * &self.k2).phase(self.phase)
    }

    /// Phase-invariant agreement of the product with `source`.
    pub fn fidelity_to(&self, source: &UnitaryMatrix) -> f64 {
        fidelity(&self.product(), source)
    }
}

/// True when `u` is a tensor product of single-qubit gates (identity class).
pub fn is_local(u: &UnitaryMatrix, tol: f64) -> bool {
    local_invariants(u).distance(&LocalInvariants::IDENTITY) <= tol
}

/// Hermitian generator of the entangler for class `c`: `(c1 σxσx + c2 σyσy + c3 σzσz)/2`.
pub fn entangler_generator(c: ClassVector) -> HermitianGenerator {
    HermitianGenerator::combine([
        (0.5 * c.c1, &pauli_pair(Axis::X, Axis::X)),
        (0.5 * c.c2, &pauli_pair(Axis::Y, Axis::Y)),
        (0.5 * c.c3, &pauli_pair(Axis::Z, Axis::Z)),
    ])
}

/// Angle of `c` folded into `[0, π)`; used by reports.
pub fn fold_angle(x: f64) -> f64 {
    x.rem_euclid(PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::expm_hermitian;
    use std::f64::consts::FRAC_PI_2;

    fn eq5() -> UnitaryMatrix {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let b = Complex64::new(0.0, -FRAC_1_SQRT_2);
        let z = Complex64::new(0.0, 0.0);
        UnitaryMatrix::new(CMat4::new(a, z, z, b, z, a, b, z, z, b, a, z, b, z, z, a)).unwrap()
    }

    fn swap() -> UnitaryMatrix {
        let one = Complex64::new(1.0, 0.0);
        let mut m = CMat4::zeros();
        m[(0, 0)] = one;
        m[(1, 2)] = one;
        m[(2, 1)] = one;
        m[(3, 3)] = one;
        UnitaryMatrix::new(m).unwrap()
    }

    #[test]
    fn magic_basis_is_unitary() {
        assert!(UnitaryMatrix::new(magic_basis()).is_ok());
    }

    #[test]
    fn invariant_anchors() {
        let id = local_invariants(&UnitaryMatrix::identity());
        assert!(id.distance(&LocalInvariants::IDENTITY) < 1e-14);
        let cnot = local_invariants(&eq5());
        assert!(cnot.distance(&LocalInvariants::CNOT) < 1e-14);
        let sw = local_invariants(&swap());
        assert!((sw.g1 - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((sw.g2 + 3.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let c = ClassVector::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        let a = invariants_from_class(c);
        let b = local_invariants(&entangler_from_class(c));
        assert!(a.distance(&b) < 1e-12);
        // (π/2)(1,1,1) is the SWAP class up to phase.
        assert!((a.g1 + 1.0).norm() < 1e-14 && (a.g2 + 3.0).abs() < 1e-14);
        assert!(invariants_from_class(ClassVector::CNOT).distance(&LocalInvariants::CNOT) < 1e-15);
    }

    #[test]
    fn entangler_anchors() {
        assert!(entangler_from_class(ClassVector::default()).distance(&UnitaryMatrix::identity()) < 1e-15);
        assert!(entangler_from_class(ClassVector::CNOT).distance(&eq5()) < 1e-15);
        let c = ClassVector::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        let joint = expm_hermitian(&entangler_generator(c), 1.0);
        assert!(entangler_from_class(c).distance(&joint) < 1e-13);
        let m = entangler_from_class(ClassVector::new(0.3, 0.7, -0.2)).into_matrix();
        assert!((m - m.transpose()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn extraction_anchors() {
        let c = class_vector_from_unitary(&eq5());
        assert!(c.max_abs_diff(ClassVector::CNOT) < 1e-12, "{c:?}");
        let c = class_vector_from_unitary(&swap());
        assert!(c.max_abs_diff(ClassVector::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)) < 1e-12, "{c:?}");
        let c = class_vector_from_unitary(&UnitaryMatrix::identity());
        assert!(c.max_abs_diff(ClassVector::default()) < 1e-12);
    }

    #[test]
    fn xx_line_is_straight() {
        let h = pauli_pair(Axis::X, Axis::X).scale(0.5);
        for &gt in &[0.1, 0.5, 1.0, 1.4, FRAC_PI_2] {
            let c = class_vector_from_unitary(&expm_hermitian(&h, gt));
            assert!(c.max_abs_diff(ClassVector::new(gt, 0.0, 0.0)) < 1e-10, "{gt}: {c:?}");
        }
    }

    #[test]
    fn assembly_gives_standard_cnot() {
        let cnot = assemble_cnot(&eq5()).unwrap();
        assert!(cnot.distance(&canonical_cnot()) < 1e-12);
        let c = class_vector_from_unitary(&canonical_cnot());
        assert!(c.max_abs_diff(ClassVector::CNOT) < 1e-12);
    }

    #[test]
    fn assembly_rejects_other_classes() {
        let twice = &eq5() * &eq5();
        match assemble_cnot(&twice) {
            Err(Error::NotCnotClass { class, .. }) => assert!(class.max_abs_diff(ClassVector::default()) < 1e-10),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn cnot_flanks_are_local() {
        let (k1, k2) = cnot_flanks();
        assert!(is_local(&k1, 1e-12) && is_local(&k2, 1e-12));
    }
}
