//! Right-hand sides of the steering equations for every ansatz.
//!
//! Each function returns the derivative of the full seven-parameter state, so
//! reduced systems fill their tied components (e.g. `ζ' = α'` under the
//! symmetric tracking ansatz) and can share one integrator and one
//! reconstruction routine.

use serde::{Deserialize, Serialize};

use super::state::{ControlVector, SteeringState, TrigIntermediates};
use crate::error::{Error, Result};
use crate::tol::DEGENERACY_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    /// All seven parameters free; singular wherever `cos²c2 = cos²c3`.
    FullSystem,
    /// `α = ζ`, `β = ξ`; exact for tracking drives without `YZ`, `ZY` terms.
    TrackingSymmetric,
    /// `c3 = 0`, `β = ξ = 0`; drives with `Ω2 = g_zz = g_yz = g_zy = 0`.
    Case1,
    /// `β = −α`, `ξ = −ζ`; drives with `Ω2 = −Ω1` and no `YZ`, `ZY` terms.
    Case2SymDetune,
    /// `c3 = c2`, `ξ = 0`; drives with `g_zz = g_yy` and no `YZ`, `ZY` terms.
    Case3,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 5] = [
        AnsatzKind::FullSystem,
        AnsatzKind::TrackingSymmetric,
        AnsatzKind::Case1,
        AnsatzKind::Case2SymDetune,
        AnsatzKind::Case3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::FullSystem => "full-system",
            AnsatzKind::TrackingSymmetric => "tracking-symmetric",
            AnsatzKind::Case1 => "case1",
            AnsatzKind::Case2SymDetune => "case2-sym-detune",
            AnsatzKind::Case3 => "case3",
        }
    }

    /// Whether an instantaneous control vector has the shape this ansatz needs.
    /// Proportionality across time (tracking) is checked by the caller.
    pub fn check_controls(self, u: &ControlVector) -> Result<()> {
        let tol = 1e-12 * (1.0 + u.max_abs());
        let fail = |reason: String| Err(Error::IncompatibleAnsatz { ansatz: self.name(), reason });
        let cross = u.g_yz.abs().max(u.g_zy.abs());
        match self {
            AnsatzKind::FullSystem => Ok(()),
            _ if cross > tol => fail(format!("cross couplings g_yz={}, g_zy={} must vanish", u.g_yz, u.g_zy)),
            AnsatzKind::TrackingSymmetric => Ok(()),
            AnsatzKind::Case1 if u.omega_2x.abs().max(u.g_zz.abs()) > tol => {
                fail(format!("needs Ω2 = g_zz = 0, got Ω2={}, g_zz={}", u.omega_2x, u.g_zz))
            }
            AnsatzKind::Case2SymDetune if (u.omega_2x + u.omega_1x).abs() > tol => {
                fail(format!("needs Ω2 = −Ω1, got Ω1={}, Ω2={}", u.omega_1x, u.omega_2x))
            }
            AnsatzKind::Case3 if (u.g_zz - u.g_yy).abs() > tol => {
                fail(format!("needs g_zz = g_yy, got g_yy={}, g_zz={}", u.g_yy, u.g_zz))
            }
            _ => Ok(()),
        }
    }

    pub fn rhs(self, s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
        match self {
            AnsatzKind::FullSystem => rhs_full(s, u, t),
            AnsatzKind::TrackingSymmetric => rhs_tracking(s, u, t),
            AnsatzKind::Case1 => rhs_case1(s, u, t),
            AnsatzKind::Case2SymDetune => rhs_case2(s, u, t),
            AnsatzKind::Case3 => rhs_case3(s, u, t),
        }
    }

    /// Projects a state onto the ansatz manifold (ties and zeros).
    pub fn constrain(self, s: SteeringState) -> SteeringState {
        match self {
            AnsatzKind::FullSystem => s,
            AnsatzKind::TrackingSymmetric => SteeringState { zeta: s.alpha, xi: s.beta, ..s },
            AnsatzKind::Case1 => SteeringState { beta: 0.0, c3: 0.0, xi: 0.0, ..s },
            AnsatzKind::Case2SymDetune => SteeringState { beta: -s.alpha, xi: -s.zeta, ..s },
            AnsatzKind::Case3 => SteeringState { c3: s.c2, xi: 0.0, ..s },
        }
    }
}

fn guard(t: f64, denominator: f64) -> Result<()> {
    if denominator.abs() < DEGENERACY_EPS || !denominator.is_finite() {
        return Err(Error::Singular { t, denominator });
    }
    Ok(())
}

/// Inverse of the seven-equation system; the first row is `c1' = g_xx`.
pub fn rhs_full(s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
    let TrigIntermediates { a1, a2, a3, a4, c3, c4, c22, c33, det_m, .. } = TrigIntermediates::new(s);
    let ControlVector { omega_1x, omega_2x, g_xx, g_yy, g_zz, g_yz, g_zy } = *u;

    let c2d = g_yy * a1 + g_zz * a2 + g_yz * a3 + g_zy * a4;
    let c3d = g_yy * a2 + g_zz * a1 - g_yz * a4 - g_zy * a3;

    // Without the four two-qubit drives the coupled block is homogeneous and
    // its solution is zero, singular or not.
    if g_yy == 0.0 && g_zz == 0.0 && g_yz == 0.0 && g_zy == 0.0 {
        return Ok(SteeringState { alpha: omega_1x, beta: omega_2x, c1: g_xx, ..SteeringState::ZERO });
    }
    // det M ~ c3² − c2² near the origin, so degeneracy is judged relative to
    // the size of the Cartan angles rather than in absolute terms.
    let scale = s.c2.sin().powi(2) + s.c3.sin().powi(2);
    let relative = if scale > 0.0 { det_m / scale } else { 0.0 };
    if relative.abs() < DEGENERACY_EPS || !det_m.is_finite() {
        return Err(Error::Singular { t, denominator: det_m });
    }

    let alpha = omega_1x
        + (g_yy * (a3 * c33 + a4 * c22) - g_zz * (a3 * c22 + a4 * c33) - g_yz * (a1 * c33 - a2 * c22)
            - g_zy * (a1 * c22 - a2 * c33))
            / det_m;
    let beta = omega_2x
        + (g_yy * (a3 * c22 + a4 * c33) - g_zz * (a3 * c33 + a4 * c22) - g_yz * (a1 * c22 - a2 * c33)
            - g_zy * (a1 * c33 - a2 * c22))
            / det_m;
    let zeta = (-g_yy * (a3 * c3 + a4 * c4) + g_zz * (a3 * c4 + a4 * c3) + g_yz * (a1 * c3 - a2 * c4)
        + g_zy * (a1 * c4 - a2 * c3))
        / det_m;
    let xi = (-g_yy * (a3 * c4 + a4 * c3) + g_zz * (a3 * c3 + a4 * c4) + g_yz * (a1 * c4 - a2 * c3)
        + g_zy * (a1 * c3 - a2 * c4))
        / det_m;

    Ok(SteeringState { alpha, beta, c1: g_xx, c2: c2d, c3: c3d, zeta, xi })
}

/// Symmetric ansatz `α = ζ`, `β = ξ`. The denominator `(cos c2 + cos c3)²`
/// equals 4 at the origin, so this system needs no seed.
pub fn rhs_tracking(s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
    let TrigIntermediates { a1, a2, c1, c2, .. } = TrigIntermediates::new(s);
    let den = (s.c2.cos() + s.c3.cos()).powi(2);
    guard(t, den)?;
    let alpha = (u.omega_1x * (1.0 + c1) - u.omega_2x * c2) / den;
    let beta = (u.omega_2x * (1.0 + c1) - u.omega_1x * c2) / den;
    Ok(SteeringState {
        alpha,
        beta,
        c1: u.g_xx,
        c2: u.g_yy * a1 + u.g_zz * a2,
        c3: u.g_yy * a2 + u.g_zz * a1,
        zeta: alpha,
        xi: beta,
    })
}

/// `c3 = 0`, `β = ξ = 0`: state `(α, c1, c2, ζ)`.
pub fn rhs_case1(s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
    let (sa, ca) = s.alpha.sin_cos();
    let (s2, c2) = s.c2.sin_cos();
    let g2 = u.g_yy;
    let (alpha, zeta) = if g2 * sa == 0.0 {
        (u.omega_1x, 0.0)
    } else {
        guard(t, s2)?;
        (u.omega_1x - g2 * sa * c2 / s2, g2 * sa / s2)
    };
    Ok(SteeringState { alpha, c1: u.g_xx, c2: g2 * ca, zeta, ..SteeringState::ZERO })
}

/// `β = −α`, `ξ = −ζ`: state `(α, c1, c2, c3, ζ)`.
///
/// The `α'` correction `(C33 − C22)/(cos²c2 − cos²c3)` simplifies to
/// `cot(c2 + c3)`, which keeps the system regular on `c2 = c3`.
pub fn rhs_case2(s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
    let (sa, ca) = s.alpha.sin_cos();
    let (g2, g3) = (u.g_yy, u.g_zz);
    let mix = (g2 + g3) * ca * sa;
    let (alpha, zeta) = if mix == 0.0 {
        (u.omega_1x, 0.0)
    } else {
        let (ss, cs) = (s.c2 + s.c3).sin_cos();
        guard(t, ss)?;
        (u.omega_1x - mix * cs / ss, mix / ss)
    };
    Ok(SteeringState {
        alpha,
        beta: -alpha,
        c1: u.g_xx,
        c2: g2 * ca * ca - g3 * sa * sa,
        c3: g3 * ca * ca - g2 * sa * sa,
        zeta,
        xi: -zeta,
    })
}

/// `c3 = c2`, `ξ = 0`: state `(α, β, c1, c2, ζ)`.
pub fn rhs_case3(s: &SteeringState, u: &ControlVector, t: f64) -> Result<SteeringState> {
    let g2 = u.g_yy;
    let diff = (s.beta - s.alpha).sin();
    let sum = (s.alpha - s.beta).cos();
    let (s2, c2) = s.c2.sin_cos();
    let (alpha, beta, zeta) = if g2 * diff == 0.0 {
        (u.omega_1x, u.omega_2x, 0.0)
    } else {
        guard(t, c2 * s2)?;
        (u.omega_1x + g2 * diff * c2 / s2, u.omega_2x + g2 * diff * s2 / c2, -g2 * diff / (c2 * s2))
    };
    let c2d = g2 * sum;
    Ok(SteeringState { alpha, beta, c1: u.g_xx, c2: c2d, c3: c2d, zeta, xi: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steer::state::{apply_matrix, coefficient_matrix, system_ordering};
    use std::f64::consts::PI;

    fn controls() -> ControlVector {
        ControlVector { omega_1x: 0.7, omega_2x: -0.3, g_xx: 1.1, g_yy: 0.9, g_zz: 0.2, g_yz: 0.4, g_zy: -0.6 }
    }

    #[test]
    fn only_xx_moves_c1() {
        let s = SteeringState { alpha: 0.4, beta: 0.1, c1: 0.2, c2: 0.3, c3: 0.8, zeta: 1.0, xi: -0.5 };
        let u = ControlVector { g_xx: 2.5, ..Default::default() };
        let d = rhs_full(&s, &u, 0.0).unwrap();
        assert_eq!(d, SteeringState { c1: 2.5, ..SteeringState::ZERO });
        assert_eq!(rhs_full(&SteeringState::ZERO, &ControlVector::default(), 0.0).unwrap(), SteeringState::ZERO);
    }

    #[test]
    fn pure_yy_at_zero_locals() {
        let s = SteeringState { c2: PI / 6.0, c3: PI / 12.0, ..SteeringState::ZERO };
        let u = ControlVector { g_yy: 1.0, ..Default::default() };
        let d = rhs_full(&s, &u, 0.0).unwrap();
        assert!((d.c2 - 1.0).abs() < 1e-15);
        assert_eq!(d.c3, 0.0);
        // A3 = A4 = 0 removes every correction term.
        assert_eq!((d.alpha, d.beta, d.c1, d.zeta, d.xi), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn forward_substitution_recovers_controls() {
        let s = SteeringState { alpha: 0.3, beta: -1.2, c1: 0.5, c2: 0.9, c3: 0.2, zeta: 0.4, xi: 2.0 };
        let u = controls();
        let d = rhs_full(&s, &u, 0.0).unwrap();
        let back = apply_matrix(&coefficient_matrix(&s), &system_ordering(&d));
        for (a, b) in back.iter().zip(u.system_vector()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn full_system_is_singular_on_the_diagonal() {
        let s = SteeringState { c2: 0.4, c3: 0.4, ..SteeringState::ZERO };
        assert!(matches!(rhs_full(&s, &controls(), 1.5), Err(Error::Singular { t, .. }) if t == 1.5));
    }

    #[test]
    fn reduced_systems_at_zero_alpha() {
        let u = ControlVector { omega_1x: 0.8, omega_2x: 0.0, g_xx: 1.0, g_yy: 0.6, ..Default::default() };
        let s = SteeringState { c1: 0.2, c2: 0.3, ..SteeringState::ZERO };
        let d = rhs_case1(&s, &u, 0.0).unwrap();
        assert_eq!((d.alpha, d.c2, d.zeta), (0.8, 0.6, 0.0));

        let u2 = ControlVector { omega_1x: 0.8, omega_2x: -0.8, g_xx: 1.0, g_yy: 0.6, g_zz: 0.25, ..Default::default() };
        let s2 = SteeringState { c2: 0.3, c3: 0.1, ..SteeringState::ZERO };
        let d = rhs_case2(&s2, &u2, 0.0).unwrap();
        assert_eq!((d.alpha, d.c2, d.c3, d.zeta), (0.8, 0.6, 0.25, 0.0));

        let u3 = ControlVector { omega_1x: 0.8, omega_2x: 0.3, g_xx: 1.0, g_yy: 0.6, g_zz: 0.6, ..Default::default() };
        let s3 = SteeringState { c2: 0.3, c3: 0.3, ..SteeringState::ZERO };
        let d = rhs_case3(&s3, &u3, 0.0).unwrap();
        assert_eq!((d.alpha, d.beta, d.c2, d.zeta), (0.8, 0.3, 0.6, 0.0));
    }

    #[test]
    fn case2_cotangent_matches_quotient_form() {
        let s = SteeringState { alpha: 0.37, beta: -0.37, c1: 0.1, c2: 0.8, c3: 0.3, zeta: 0.2, xi: -0.2 };
        let u = ControlVector { omega_1x: 0.5, omega_2x: -0.5, g_yy: 0.7, g_zz: -0.4, ..Default::default() };
        let d = rhs_case2(&s, &u, 0.0).unwrap();
        let (sa, ca) = s.alpha.sin_cos();
        let t = TrigIntermediates::new(&s);
        let literal = u.omega_1x - (u.g_yy + u.g_zz) * ca * sa * (t.c33 - t.c22) / t.det_m;
        assert!((d.alpha - literal).abs() < 1e-13);
    }

    #[test]
    fn reduced_systems_agree_with_full_system_on_their_manifolds() {
        // The reduced manifolds are invariant: the forward system is satisfied
        // exactly, even where M itself is singular (Case 3).
        let u = controls();
        let checks: [(AnsatzKind, ControlVector, SteeringState); 3] = [
            (
                AnsatzKind::Case1,
                ControlVector { omega_2x: 0.0, g_zz: 0.0, g_yz: 0.0, g_zy: 0.0, ..u },
                SteeringState { alpha: 0.3, c1: 0.1, c2: 0.7, zeta: 0.5, ..SteeringState::ZERO },
            ),
            (
                AnsatzKind::Case2SymDetune,
                ControlVector { omega_2x: -u.omega_1x, g_yz: 0.0, g_zy: 0.0, ..u },
                SteeringState { alpha: 0.3, beta: -0.3, c1: 0.1, c2: 0.7, c3: 0.2, zeta: 0.5, xi: -0.5 },
            ),
            (
                AnsatzKind::Case3,
                ControlVector { g_zz: u.g_yy, g_yz: 0.0, g_zy: 0.0, ..u },
                SteeringState { alpha: 0.3, beta: -0.4, c1: 0.1, c2: 0.7, c3: 0.7, zeta: 0.5, xi: 0.0 },
            ),
        ];
        for (ansatz, u, s) in checks {
            let reduced = ansatz.rhs(&s, &u, 0.0).unwrap();
            let back = apply_matrix(&coefficient_matrix(&s), &system_ordering(&reduced));
            for (a, b) in back.iter().zip(u.system_vector()) {
                assert!((a - b).abs() < 1e-12, "{ansatz:?}: {back:?} vs {:?}", u.system_vector());
            }
        }
    }

    #[test]
    fn compatibility_checks() {
        assert!(AnsatzKind::Case1.check_controls(&controls()).is_err());
        let u = ControlVector { omega_1x: 1.0, omega_2x: -1.0, g_yy: 1.0, ..Default::default() };
        assert!(AnsatzKind::Case2SymDetune.check_controls(&u).is_ok());
        assert!(AnsatzKind::Case3.check_controls(&u).is_err());
        assert!(AnsatzKind::FullSystem.check_controls(&controls()).is_ok());
    }
}
