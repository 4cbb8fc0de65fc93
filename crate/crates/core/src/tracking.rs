//! Closed-form solutions for tracking drives
//! `iH(t) = γ(t)[Ω1X1 + Ω2X2 + g1(t)XX + g2YY + g3ZZ]`.
//!
//! With `α = ζ` and `β = ξ` the class coordinates and local angles depend on
//! time only through the envelope area `A(t) = ∫γ`, so every quantity here is
//! a function of `A` evaluated by quadrature.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::cartan::cnot_class_residual;
use crate::design::{ConstraintReport, DesignSolution, RabiValue};
use crate::envelope::{envelope_area, integrate_on, Envelope};
use crate::error::{Error, Result};
use crate::lie::{ClassVector, Frame};
use crate::quad;
use crate::steer::{direct_propagate, ControlVector, Drive, HamiltonianSpec, SteeringState};
use crate::tol::DEGENERACY_EPS;
use crate::units::time_to_half_pi_over_g;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingHamiltonian {
    pub frame: Frame,
    pub omega1: f64,
    pub omega2: f64,
    pub g1: f64,
    /// Optional time profile multiplying `g1`.
    #[serde(default)]
    pub g1_profile: Envelope,
    pub g2: f64,
    pub g3: f64,
    #[serde(default)]
    pub gamma: Envelope,
}

impl TrackingHamiltonian {
    pub fn constant(frame: Frame, omega1: f64, omega2: f64, g1: f64, g2: f64, g3: f64) -> Self {
        Self { frame, omega1, omega2, g1, g1_profile: Envelope::unit(), g2, g3, gamma: Envelope::unit() }
    }

    pub fn with_envelope(mut self, gamma: Envelope) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn amplitudes(&self) -> ControlVector {
        ControlVector {
            omega_1x: self.omega1,
            omega_2x: self.omega2,
            g_xx: self.g1,
            g_yy: self.g2,
            g_zz: self.g3,
            ..Default::default()
        }
    }

    pub fn to_spec(&self) -> HamiltonianSpec {
        HamiltonianSpec {
            frame: self.frame,
            drive: Drive::Tracking {
                envelope: self.gamma.clone(),
                amplitudes: self.amplitudes(),
                xx_profile: self.g1_profile.clone(),
            },
        }
    }

    pub fn area(&self, t: f64) -> f64 {
        envelope_area(&self.gamma, t)
    }

    /// `∫_0^t γ g1`.
    pub fn c1(&self, t: f64) -> f64 {
        if self.g1_profile.is_constant() {
            self.g1 * self.g1_profile.value(0.0) * self.area(t)
        } else {
            self.g1 * integrate_on(&self.gamma, |tau| self.gamma.value(tau) * self.g1_profile.value(tau), 0.0, t)
        }
    }

    /// `(c2(A), c3(A))` on the full Cartan subalgebra.
    pub fn c23_at_area(&self, area: f64) -> (f64, f64) {
        let hp = half_angle(self.g2 + self.g3, self.omega1 - self.omega2, area);
        let hm = half_angle(self.g2 - self.g3, self.omega1 + self.omega2, area);
        (hp + hm, hp - hm)
    }

    /// `(α', β')` per unit envelope area, i.e. `dα/dA`, `dβ/dA`.
    fn alpha_beta_density(&self, area: f64) -> (f64, f64, f64) {
        let (c2, c3) = self.c23_at_area(area);
        let (s2, k2) = c2.sin_cos();
        let (s3, k3) = c3.sin_cos();
        let cc = k2 * k3;
        let ss = s2 * s3;
        let den = (k2 + k3).powi(2);
        ((self.omega1 * (1.0 + cc) - self.omega2 * ss) / den, (self.omega2 * (1.0 + cc) - self.omega1 * ss) / den, k2 + k3)
    }
}

/// `asin(a·sin(s·A/2))` with `a = num/s`, `s = √(num² + off²)`. At `off = 0`
/// the amplitude is one and the continuous branch is the linear `num·A/2`.
fn half_angle(num: f64, off: f64, area: f64) -> f64 {
    let s = num.hypot(off);
    if s == 0.0 {
        return 0.0;
    }
    if off.abs() <= 1e-15 * s {
        return 0.5 * num * area;
    }
    ((num / s) * (0.5 * s * area).sin()).asin()
}

/// `f± = sin((c2 ± c3)/2)` as functions of the envelope area.
pub fn f_plus_minus(h: &TrackingHamiltonian, area: f64) -> (f64, f64) {
    let f = |num: f64, off: f64| {
        let s = num.hypot(off);
        if s == 0.0 {
            0.0
        } else {
            (num / s) * (0.5 * s * area).sin()
        }
    };
    (f(h.g2 + h.g3, h.omega1 - h.omega2), f(h.g2 - h.g3, h.omega1 + h.omega2))
}

/// Class coordinates at time `t`, not reduced to the Weyl chamber.
pub fn class_vector_tracking(h: &TrackingHamiltonian, t: f64) -> ClassVector {
    let (c2, c3) = h.c23_at_area(h.area(t));
    ClassVector::new(h.c1(t), c2, c3)
}

/// `(α(t), β(t))`.
pub fn alpha_beta_tracking(h: &TrackingHamiltonian, t: f64) -> Result<(f64, f64)> {
    let v = alpha_beta_series(h, &[t])?;
    Ok(v[0])
}

/// `(α, β)` at increasing times; the integrals are accumulated in the area
/// variable between consecutive samples.
pub fn alpha_beta_series(h: &TrackingHamiltonian, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let areas: Vec<f64> = times.iter().map(|&t| h.area(t)).collect();
    if h.omega1 == 0.0 && h.omega2 == 0.0 {
        return Ok(vec![(0.0, 0.0); times.len()]);
    }
    if let Some(bad) = earliest_collapse(h, areas.iter().copied().fold(0.0, f64::max)) {
        return Err(Error::Domain { tau: time_for_area(h, bad, times.last().copied().unwrap_or(0.0)) });
    }
    let (rtol, atol) = (1e-13, 1e-16);
    let mut out = Vec::with_capacity(times.len());
    let (mut a, mut b, mut prev) = (0.0, 0.0, 0.0);
    for &area in &areas {
        a += quad::integrate(|x| h.alpha_beta_density(x).0, prev, area, rtol, atol);
        b += quad::integrate(|x| h.alpha_beta_density(x).1, prev, area, rtol, atol);
        prev = area;
        out.push((a, b));
    }
    Ok(out)
}

// Earliest area in [0, max_area] where cos c2 + cos c3 vanishes.
fn earliest_collapse(h: &TrackingHamiltonian, max_area: f64) -> Option<f64> {
    const GRID: usize = 4096;
    let sum = |x: f64| h.alpha_beta_density(x).2;
    let mut prev_x = 0.0;
    let mut prev = sum(0.0);
    for i in 1..=GRID {
        let x = max_area * i as f64 / GRID as f64;
        let v = sum(x);
        if v.signum() != prev.signum() {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sum(mid).signum() != prev.signum() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        if v.abs() < DEGENERACY_EPS.sqrt() {
            // A touching zero: locate the minimum of |sum| near this node.
            let dx = max_area / GRID as f64;
            let (mut lo, mut hi) = (prev_x, (x + dx).min(max_area));
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..200 {
                let a = hi - phi * (hi - lo);
                let b = lo + phi * (hi - lo);
                if sum(a).abs() < sum(b).abs() {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev_x = x;
        prev = v;
    }
    None
}

/// Inverse of the envelope area on `[0, t_max]` by bisection (the area is
/// non-decreasing for non-negative envelopes).
pub fn time_for_area(h: &TrackingHamiltonian, area: f64, t_max: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h.area(mid) < area {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Full analytic steering state at time `t`.
pub fn analytic_state(h: &TrackingHamiltonian, t: f64) -> Result<SteeringState> {
    let c = class_vector_tracking(h, t);
    let (alpha, beta) = alpha_beta_tracking(h, t)?;
    Ok(SteeringState { alpha, beta, c1: c.c1, c2: c.c2, c3: c.c3, zeta: alpha, xi: beta })
}

/// Analytic states at increasing times.
pub fn analytic_series(h: &TrackingHamiltonian, times: &[f64]) -> Result<Vec<SteeringState>> {
    let ab = alpha_beta_series(h, times)?;
    Ok(times
        .iter()
        .zip(ab)
        .map(|(&t, (alpha, beta))| {
            let c = class_vector_tracking(h, t);
            SteeringState { alpha, beta, c1: c.c1, c2: c.c2, c3: c.c3, zeta: alpha, xi: beta }
        })
        .collect())
}

/// Rabi amplitudes placing the endpoint on the `XX` axis at `c1_target`:
/// `Ω1,2 = ½[√((2πn g1/c1)² − (g2−g3)²) ± √((2πm g1/c1)² − (g2+g3)²)]`.
pub fn rabi_for_axis_point(g1: f64, g2: f64, g3: f64, c1_target: f64, n: u32, m: u32) -> Result<(f64, f64)> {
    if c1_target == 0.0 || g1 == 0.0 {
        return Err(Error::InvalidInput("c1 target and g1 must be nonzero".into()));
    }
    let scale = 2.0 * PI * g1 / c1_target;
    let r_n = (scale * n as f64).powi(2) - (g2 - g3).powi(2);
    let r_m = (scale * m as f64).powi(2) - (g2 + g3).powi(2);
    if r_n < 0.0 {
        return Err(Error::Infeasible { what: format!("n = {n}: (2πn g1/c1)² < (g2 − g3)²"), radicand: r_n });
    }
    if r_m < 0.0 {
        return Err(Error::Infeasible { what: format!("m = {m}: (2πm g1/c1)² < (g2 + g3)²"), radicand: r_m });
    }
    let (a, b) = (r_n.sqrt(), r_m.sqrt());
    Ok((0.5 * (a + b), 0.5 * (a - b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "device", rename_all = "kebab-case")]
pub enum DeviceModel {
    /// `(γ/2)[Ω1σ1x + g(σxσx + σyσy)]`, phase qubits with rf bias.
    #[serde(rename = "capacitive", alias = "capacitive-rf")]
    CapacitiveRf { g: f64, omega1: f64 },
    /// `(γ/2)[Ω1σ1x + Ω2σ2x + g(σxσx + σyσy + kσzσz)]`, flux qubits with rf bias.
    InductiveRf { g: f64, k: f64, omega1: f64, omega2: f64 },
    /// `(γ/2)[Ω1(σ1z − σ2z) + g(kσzσz + σxσx + σyσy)]`, flux qubits with dc detuning.
    #[serde(rename = "dc-detune", alias = "inductive-dc-detune")]
    InductiveDcDetune { g: f64, k: f64, omega1: f64 },
}

impl DeviceModel {
    pub fn g(&self) -> f64 {
        match *self {
            DeviceModel::CapacitiveRf { g, .. }
            | DeviceModel::InductiveRf { g, .. }
            | DeviceModel::InductiveDcDetune { g, .. } => g,
        }
    }

    pub fn k(&self) -> f64 {
        match *self {
            DeviceModel::CapacitiveRf { .. } => 0.0,
            DeviceModel::InductiveRf { k, .. } | DeviceModel::InductiveDcDetune { k, .. } => k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DeviceModel::CapacitiveRf { .. } => "capacitive",
            DeviceModel::InductiveRf { .. } => "inductive-rf",
            DeviceModel::InductiveDcDetune { .. } => "dc-detune",
        }
    }

    /// The dc-detuned model is written over `(Z1, Z2, ZZ, XX, YY)`.
    pub fn frame(&self) -> Frame {
        match self {
            DeviceModel::InductiveDcDetune { .. } => Frame::Z,
            _ => Frame::X,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g() > 0.0 && self.g().is_finite()) {
            return Err(Error::InvalidInput(format!("coupling g must be positive, got {}", self.g())));
        }
        Ok(())
    }

    pub fn tracking_hamiltonian(&self, gamma: Envelope) -> TrackingHamiltonian {
        let frame = self.frame();
        let h = match *self {
            DeviceModel::CapacitiveRf { g, omega1 } => TrackingHamiltonian::constant(frame, omega1, 0.0, g, g, 0.0),
            DeviceModel::InductiveRf { g, k, omega1, omega2 } => {
                TrackingHamiltonian::constant(frame, omega1, omega2, g, g, k * g)
            }
            DeviceModel::InductiveDcDetune { g, k, omega1 } => {
                TrackingHamiltonian::constant(frame, omega1, -omega1, k * g, g, g)
            }
        };
        h.with_envelope(gamma)
    }

    /// Envelope area `∫γ` that brings `c1` to `π/2`.
    pub fn cnot_area(&self) -> f64 {
        match *self {
            DeviceModel::InductiveDcDetune { g, k, .. } => FRAC_PI_2 / (k * g),
            _ => FRAC_PI_2 / self.g(),
        }
    }

    /// The same model with its Rabi amplitudes replaced.
    pub fn with_rabi(&self, omega1: f64, omega2: f64) -> Self {
        match *self {
            DeviceModel::CapacitiveRf { g, .. } => DeviceModel::CapacitiveRf { g, omega1 },
            DeviceModel::InductiveRf { g, k, .. } => DeviceModel::InductiveRf { g, k, omega1, omega2 },
            DeviceModel::InductiveDcDetune { g, k, .. } => DeviceModel::InductiveDcDetune { g, k, omega1 },
        }
    }
}

/// Rabi amplitudes and envelope area that land the model on the CNOT class,
/// verified by propagating with `γ = 1` to the returned time.
pub fn cnot_condition(model: &DeviceModel, n: u32, m: u32) -> Result<DesignSolution> {
    model.validate()?;
    let g = model.g();
    let (omega1, omega2, names): (f64, f64, &[&str]) = match *model {
        DeviceModel::CapacitiveRf { .. } => {
            let (o1, _) = rabi_for_axis_point(g, g, 0.0, FRAC_PI_2, n, n)?;
            (o1, 0.0, &["omega1"])
        }
        DeviceModel::InductiveRf { k, .. } => {
            let (o1, o2) = rabi_for_axis_point(g, g, k * g, FRAC_PI_2, n, m)?;
            (o1, o2, &["omega1", "omega2"])
        }
        DeviceModel::InductiveDcDetune { k, .. } => {
            let radicand = (2.0 * k * n as f64).powi(2) - 1.0;
            if radicand <= 0.0 {
                return Err(Error::Infeasible { what: format!("k = {k}, n = {n}: needs (2kn)² > 1"), radicand });
            }
            (g * radicand.sqrt(), 0.0, &["omega1"])
        }
    };
    let solved = model.with_rabi(omega1, omega2);
    let area = solved.cnot_area();
    let u = direct_propagate(&solved.tracking_hamiltonian(Envelope::unit()).to_spec(), area);
    let residual = cnot_class_residual(&u);
    let rabi: Vec<RabiValue> =
        names.iter().zip([omega1, omega2]).map(|(name, v)| RabiValue { name: name.to_string(), over_g: v / g }).collect();
    let t_half_pi = time_to_half_pi_over_g(area, g);
    let eta = crate::design::efficiency(area, g);
    let constraints = ConstraintReport::evaluate(&rabi, eta, model.k());
    Ok(DesignSolution { model: solved.name().to_string(), g, k: model.k(), t_cnot: area, t_half_pi, rabi, eta, residual, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::class_vector_from_unitary;
    use crate::qmat::fidelity;

    fn inductive() -> TrackingHamiltonian {
        DeviceModel::InductiveRf { g: 1.0, k: 0.1, omega1: 3.8716, omega2: 0.0258 }.tracking_hamiltonian(Envelope::unit())
    }

    #[test]
    fn f_vanishes_at_zero_area_and_saturates_without_drive() {
        assert_eq!(f_plus_minus(&inductive(), 0.0), (0.0, 0.0));
        let h = TrackingHamiltonian::constant(Frame::X, 0.0, 0.0, 1.0, 1.0, 0.0);
        let (fp, fm) = f_plus_minus(&h, PI);
        assert!((fp - 1.0).abs() < 1e-15 && (fm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inductive_endpoint_on_xx_axis() {
        let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.1, FRAC_PI_2, 1, 1).unwrap();
        let h = DeviceModel::InductiveRf { g: 1.0, k: 0.1, omega1: o1, omega2: o2 }.tracking_hamiltonian(Envelope::unit());
        let (fp, fm) = f_plus_minus(&h, FRAC_PI_2);
        assert!(fp.abs() < 1e-14 && fm.abs() < 1e-14);
        let c = class_vector_tracking(&h, FRAC_PI_2);
        assert!(c.max_abs_diff(ClassVector::CNOT) < 1e-14);
    }

    #[test]
    fn rabi_values() {
        let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.1, FRAC_PI_2, 1, 1).unwrap();
        assert!((o1 - 3.8716).abs() < 5e-5 && (o2 - 0.0258).abs() < 5e-5);
        let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.0, FRAC_PI_2, 1, 1).unwrap();
        assert!((o1 - 15f64.sqrt()).abs() < 1e-14 && o2.abs() < 1e-15);
        assert!(matches!(rabi_for_axis_point(1.0, 10.0, 0.0, FRAC_PI_2, 1, 1), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn capacitive_closed_forms() {
        let om = 15f64.sqrt();
        let h = DeviceModel::CapacitiveRf { g: 1.0, omega1: om }.tracking_hamiltonian(Envelope::unit());
        for &t in &[0.2, 0.9, 1.4] {
            let c = class_vector_tracking(&h, t);
            let r = (1.0 + om * om).sqrt();
            let c2 = 2.0 * ((0.5 * r * t).sin() / r).asin();
            assert!(c.c3.abs() < 1e-15 && (c.c2 - c2).abs() < 1e-14);
            let (a, b) = alpha_beta_tracking(&h, t).unwrap();
            let direct = quad::integrate(
                |tau| om / (1.0 + (2.0 * ((0.5 * r * tau).sin() / r).asin()).cos()),
                0.0,
                t,
                1e-13,
                1e-16,
            );
            assert!(b == 0.0 && (a - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn dc_detune_symmetry() {
        let h = DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: 0.6633 }.tracking_hamiltonian(Envelope::unit());
        let (a, b) = alpha_beta_tracking(&h, 7.0).unwrap();
        assert!((a + b).abs() < 1e-12 && a != 0.0);
        let c = class_vector_tracking(&h, 7.0);
        assert!((c.c2 - c.c3).abs() < 1e-15);
    }

    #[test]
    fn undriven_alpha_beta_vanish() {
        let h = TrackingHamiltonian::constant(Frame::X, 0.0, 0.0, 1.0, 1.0, 0.3);
        assert_eq!(alpha_beta_tracking(&h, 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn domain_error_when_denominator_collapses() {
        // Ω1 = Ω2 makes f+ reach 1, so c2 + c3 sweeps past π.
        let h = TrackingHamiltonian::constant(Frame::X, 0.5, 0.5, 1.0, 1.0, 1.0);
        match alpha_beta_tracking(&h, 3.0) {
            Err(Error::Domain { tau }) => assert!((tau - FRAC_PI_2).abs() < 1e-6, "{tau}"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn analytic_state_reconstructs_propagator() {
        for model in [
            DeviceModel::CapacitiveRf { g: 1.0, omega1: 15f64.sqrt() },
            DeviceModel::InductiveRf { g: 1.0, k: 0.1, omega1: 3.8716, omega2: 0.0258 },
            DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: 0.6633 },
        ] {
            let area = model.cnot_area();
            let h = model.tracking_hamiltonian(Envelope::sin2(2.0 * area));
            for i in 1..=8 {
                let t = 2.0 * area * i as f64 / 8.0;
                let s = analytic_state(&h, t).unwrap();
                let f = fidelity(&s.reconstruct(h.frame), &direct_propagate(&h.to_spec(), t));
                assert!(1.0 - f < 1e-12, "{model:?} t={t}: {}", 1.0 - f);
            }
        }
    }

    #[test]
    fn table_one_first_row() {
        let sol = cnot_condition(&DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: 0.0 }, 6, 6).unwrap();
        assert!((sol.rabi[0].over_g - 0.6633).abs() < 5e-5);
        assert!((sol.t_half_pi - 10.0).abs() < 1e-12);
        assert!(sol.residual < 1e-8);
        let u = direct_propagate(
            &DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: sol.rabi[0].over_g }
                .tracking_hamiltonian(Envelope::unit())
                .to_spec(),
            sol.t_cnot,
        );
        assert!(class_vector_from_unitary(&u).max_abs_diff(ClassVector::CNOT) < 1e-8);
    }

    #[test]
    fn infeasible_detuning() {
        let r = cnot_condition(&DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: 0.0 }, 5, 5);
        assert!(matches!(r, Err(Error::Infeasible { radicand, .. }) if radicand <= 0.0));
    }

    #[test]
    fn capacitive_condition() {
        let sol = cnot_condition(&DeviceModel::CapacitiveRf { g: 2.0, omega1: 0.0 }, 1, 1).unwrap();
        assert!((sol.rabi[0].over_g - 15f64.sqrt()).abs() < 1e-12);
        assert!(sol.residual < 1e-8);
    }
}
