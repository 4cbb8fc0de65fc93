use std::f64::consts::FRAC_PI_3;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cartan::CartanFactorization;
use crate::lie::{pauli_product_in, ClassVector, Frame, GeneratorLabel, L0Element};
use crate::qmat::{exp_involution, CMat2, HermitianGenerator, UnitaryMatrix};

/// Exponents of the Cartan form
/// `U = e^{−αX1−βX2} · e^{−c1XX−c2YY−c3ZZ} · e^{−ζX1−ξX2}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SteeringState {
    pub alpha: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub zeta: f64,
    pub xi: f64,
}

impl SteeringState {
    pub const ZERO: SteeringState =
        SteeringState { alpha: 0.0, beta: 0.0, c1: 0.0, c2: 0.0, c3: 0.0, zeta: 0.0, xi: 0.0 };

    pub fn to_array(self) -> [f64; 7] {
        [self.alpha, self.beta, self.c1, self.c2, self.c3, self.zeta, self.xi]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self { alpha: a[0], beta: a[1], c1: a[2], c2: a[3], c3: a[4], zeta: a[5], xi: a[6] }
    }

    pub fn class(self) -> ClassVector {
        ClassVector::new(self.c1, self.c2, self.c3)
    }

    pub fn max_abs_diff(self, other: SteeringState) -> f64 {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// The three-factor product in the given frame.
    pub fn reconstruct(&self, frame: Frame) -> UnitaryMatrix {
        let (k1, ent, k2) = self.factors(frame);
        &(&k1 * &ent) * &k2
    }

    fn factors(&self, frame: Frame) -> (UnitaryMatrix, UnitaryMatrix, UnitaryMatrix) {
        use GeneratorLabel::*;
        // e^{−θ·(i/2)P} is exp_involution(P, θ); the two factors of each local
        // exponent act on different qubits and commute.
        let e = |label: GeneratorLabel, theta: f64| {
            exp_involution(&HermitianGenerator::from_trusted(pauli_product_in(frame, label)), theta)
        };
        let k1 = &e(X1, self.alpha) * &e(X2, self.beta);
        let ent = &(&e(XX, self.c1) * &e(YY, self.c2)) * &e(ZZ, self.c3);
        let k2 = &e(X1, self.zeta) * &e(X2, self.xi);
        (k1, ent, k2)
    }

    /// The reconstruction as `k1 · entangler_from_class(c) · k2`. In relabeled
    /// frames the entangler is rotated back to the standard Cartan triple and
    /// the rotation is absorbed into the local factors.
    pub fn factorization(&self, frame: Frame) -> CartanFactorization {
        let (k1, _, k2) = self.factors(frame);
        let r = frame_rotation(frame);
        CartanFactorization::new(0.0, &k1 * &r.adjoint(), self.class(), &r * &k2)
    }
}

/// Local rotation `R = r ⊗ r` with `R · P_frame · R† = P_standard` for every
/// generator.
pub fn frame_rotation(frame: Frame) -> UnitaryMatrix {
    let theta = match frame {
        Frame::X => return UnitaryMatrix::identity(),
        Frame::Y => -2.0 * FRAC_PI_3,
        Frame::Z => 2.0 * FRAC_PI_3,
    };
    // r = cos(θ/2) − i sin(θ/2) n·σ with n = (1,1,1)/√3.
    let (s, c) = (0.5 * theta).sin_cos();
    let w = s / 3f64.sqrt();
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let r = CMat2::new(z(c, -w), z(-w, -w), z(w, -w), z(c, w));
    UnitaryMatrix::local(&r, &r).expect("rotation is unitary")
}

/// Coefficients `u` of `iH = Σ u_l G_l`; equivalently `H = Σ u_l P_l / 2`.
///
/// Field names refer to the standard frame; in a relabeled frame they multiply
/// the relabeled generators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlVector {
    #[serde(default)]
    pub omega_1x: f64,
    #[serde(default)]
    pub omega_2x: f64,
    #[serde(default)]
    pub g_xx: f64,
    #[serde(default)]
    pub g_yy: f64,
    #[serde(default)]
    pub g_zz: f64,
    #[serde(default)]
    pub g_yz: f64,
    #[serde(default)]
    pub g_zy: f64,
}

impl ControlVector {
    pub fn to_l0(self) -> L0Element {
        L0Element { coeffs: [self.omega_1x, self.omega_2x, self.g_xx, self.g_yy, self.g_zz, self.g_yz, self.g_zy] }
    }

    pub fn from_l0(e: &L0Element) -> Self {
        let c = e.coeffs;
        Self { omega_1x: c[0], omega_2x: c[1], g_xx: c[2], g_yy: c[3], g_zz: c[4], g_yz: c[5], g_zy: c[6] }
    }

    pub fn scale(self, s: f64) -> Self {
        let mut e = self.to_l0();
        e.coeffs.iter_mut().for_each(|c| *c *= s);
        Self::from_l0(&e)
    }

    pub fn is_zero(&self) -> bool {
        self.to_l0().is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_l0().coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Ordering used by the linear system `M·ṡ = u`:
    /// `(g_xx, Ω1x, Ω2x, g_yy, g_zz, g_yz, g_zy)`.
    pub fn system_vector(&self) -> [f64; 7] {
        [self.g_xx, self.omega_1x, self.omega_2x, self.g_yy, self.g_zz, self.g_yz, self.g_zy]
    }

    pub fn hamiltonian(&self, frame: Frame) -> HermitianGenerator {
        let e = self.to_l0();
        let mut m = crate::qmat::CMat4::zeros();
        for l in GeneratorLabel::ALL {
            let w = e.get(l);
            if w != 0.0 {
                m += pauli_product_in(frame, l).scale(0.5 * w);
            }
        }
        HermitianGenerator::from_trusted(m)
    }
}

/// Products of sines and cosines that appear in the steering equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigIntermediates {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c22: f64,
    pub c33: f64,
    pub det_m: f64,
}

impl TrigIntermediates {
    pub fn new(s: &SteeringState) -> Self {
        let (sa, ca) = s.alpha.sin_cos();
        let (sb, cb) = s.beta.sin_cos();
        let (s2, c2) = s.c2.sin_cos();
        let (s3, c3) = s.c3.sin_cos();
        Self {
            a1: ca * cb,
            a2: sa * sb,
            a3: ca * sb,
            a4: sa * cb,
            c1: c2 * c3,
            c2: s2 * s3,
            c3: c2 * s3,
            c4: s2 * c3,
            c22: c2 * s2,
            c33: c3 * s3,
            // cos²c2 − cos²c3 in a cancellation-free form.
            det_m: (s.c3 - s.c2).sin() * (s.c2 + s.c3).sin(),
        }
    }
}

/// Coefficient matrix of the linear system linking the controls to the state
/// derivative. Rows follow [`ControlVector::system_vector`]; columns are
/// `(c1', α', β', c2', c3', ζ', ξ')`.
pub fn coefficient_matrix(s: &SteeringState) -> [[f64; 7]; 7] {
    let TrigIntermediates { a1, a2, a3, a4, c1, c2, c3, c4, .. } = TrigIntermediates::new(s);
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, c1, c2],
        [0.0, 0.0, 1.0, 0.0, 0.0, c2, c1],
        [0.0, 0.0, 0.0, a1, a2, -a3 * c3 + a4 * c4, a3 * c4 - a4 * c3],
        [0.0, 0.0, 0.0, a2, a1, a4 * c3 - a3 * c4, -a4 * c4 + a3 * c3],
        [0.0, 0.0, 0.0, a3, -a4, a1 * c3 + a2 * c4, -a1 * c4 - a2 * c3],
        [0.0, 0.0, 0.0, a4, -a3, -a2 * c3 - a1 * c4, a2 * c4 + a1 * c3],
    ]
}

/// State derivative reordered to match the columns of [`coefficient_matrix`].
pub fn system_ordering(d: &SteeringState) -> [f64; 7] {
    [d.c1, d.alpha, d.beta, d.c2, d.c3, d.zeta, d.xi]
}

/// `M · v`.
pub fn apply_matrix(m: &[[f64; 7]; 7], v: &[f64; 7]) -> [f64; 7] {
    let mut out = [0.0; 7];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}
