use serde::{Deserialize, Serialize};

use super::hamiltonian::{Drive, HamiltonianSpec};
use super::ode::{self, OdeOptions};
use super::propagate::{direct_propagate, Propagator, MAGNUS_STEPS};
use super::rhs::AnsatzKind;
use super::state::{ControlVector, SteeringState};
use crate::envelope::envelope_area;
use crate::error::{Error, Result};
use crate::lie::Frame;
use crate::qmat::fidelity;
use crate::quad;
use crate::tol::RECON_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest accepted `1 − fidelity` between reconstruction and propagation.
    pub recon_tol: f64,
    /// Length of the analytic seed interval as a fraction of `t_end`.
    pub seed_fraction: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, recon_tol: RECON_TOL, seed_fraction: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: SteeringState,
    pub recon_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub ansatz: AnsatzKind,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    pub fn worst_infidelity(&self) -> f64 {
        self.samples.iter().map(|s| 1.0 - s.recon_fidelity).fold(0.0, f64::max)
    }
}

/// `n` equally spaced times on `[0, t_end]` (both ends included).
pub fn sample_times(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn integrate(h: &HamiltonianSpec, ansatz: AnsatzKind, t_end: f64, n_samples: usize) -> Result<Trajectory> {
    integrate_with(h, ansatz, t_end, n_samples, &IntegrateOptions::default())
}

/// Integrates the steering equations of `ansatz` and checks every sample
/// against direct propagation.
pub fn integrate_with(
    h: &HamiltonianSpec,
    ansatz: AnsatzKind,
    t_end: f64,
    n_samples: usize,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("t_end must be finite and non-negative, got {t_end}")));
    }
    check_compatibility(h, ansatz, t_end)?;
    let times = sample_times(t_end, n_samples);
    let states = solve_states(h, ansatz, t_end, &times, opts)?;

    let mut samples = Vec::with_capacity(times.len());
    let mut propagator = (!h.is_tracking()).then(|| Propagator::new(h, t_end / MAGNUS_STEPS as f64));
    for (&t, state) in times.iter().zip(states) {
        let direct = match propagator.as_mut() {
            Some(p) => {
                p.advance_to(t);
                p.unitary().clone()
            }
            None => direct_propagate(h, t),
        };
        let recon_fidelity = fidelity(&state.reconstruct(h.frame), &direct);
        samples.push(TrajectorySample { t, state, recon_fidelity });
    }

    let traj = Trajectory { frame: h.frame, ansatz, samples };
    if let Some(worst) = traj.samples.iter().max_by(|a, b| b.recon_fidelity.total_cmp(&a.recon_fidelity)) {
        let infidelity = 1.0 - worst.recon_fidelity;
        if infidelity > opts.recon_tol || !infidelity.is_finite() {
            return Err(Error::Reconstruction { t: worst.t, infidelity, tolerance: opts.recon_tol });
        }
    }
    Ok(traj)
}

fn check_compatibility(h: &HamiltonianSpec, ansatz: AnsatzKind, t_end: f64) -> Result<()> {
    const PROBES: usize = 65;
    for t in sample_times(t_end, PROBES) {
        ansatz.check_controls(&h.controls(t))?;
    }
    if ansatz == AnsatzKind::TrackingSymmetric && !h.is_tracking() {
        return Err(Error::IncompatibleAnsatz {
            ansatz: ansatz.name(),
            reason: "needs a tracking drive (one envelope shared by all controls)".into(),
        });
    }
    Ok(())
}

fn solve_states(
    h: &HamiltonianSpec,
    ansatz: AnsatzKind,
    t_end: f64,
    times: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<SteeringState>> {
    let ode_opts = OdeOptions { rtol: opts.rtol, atol: opts.atol, ..OdeOptions::default() };
    let rhs = |t: f64, y: &ode::State| -> Result<ode::State> {
        let s = SteeringState::from_array(*y);
        Ok(ansatz.rhs(&s, &h.controls(t), t)?.to_array())
    };

    if ansatz == AnsatzKind::TrackingSymmetric {
        let ys = ode::integrate(rhs, 0.0, [0.0; 7], times, &ode_opts)?;
        return Ok(ys.into_iter().map(|y| ansatz.constrain(SteeringState::from_array(y))).collect());
    }

    // Every other system is 0/0 at the origin: start from a short-time
    // solution at δ and integrate from there.
    let delta = seed_time(h, t_end, opts.seed_fraction);
    let seeder = Seeder::new(h, ansatz)?;
    let (early, late): (Vec<f64>, Vec<f64>) = times.iter().partition(|&&t| t <= delta);
    let mut states: Vec<SteeringState> = early.iter().map(|&t| seeder.at(t)).collect::<Result<_>>()?;
    if !late.is_empty() {
        let y0 = seeder.at(delta)?.to_array();
        let ys = ode::integrate(rhs, delta, y0, &late, &ode_opts)?;
        states.extend(ys.into_iter().map(|y| ansatz.constrain(SteeringState::from_array(y))));
    }
    Ok(states)
}

/// End of the seed interval. For tracking drives the interval covers a fixed
/// fraction of the envelope area rather than of the time span, so envelopes
/// that start at zero (sin², ramps) still leave the degenerate origin.
fn seed_time(h: &HamiltonianSpec, t_end: f64, fraction: f64) -> f64 {
    let Drive::Tracking { envelope, .. } = &h.drive else {
        return fraction * t_end;
    };
    let total = envelope_area(envelope, t_end);
    if !(total > 0.0) {
        return fraction * t_end;
    }
    let target = fraction * total;
    let (mut lo, mut hi) = (0.0, t_end);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if envelope_area(envelope, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Short-time solutions near `t = 0`.
struct Seeder<'a> {
    h: &'a HamiltonianSpec,
    ansatz: AnsatzKind,
    tracking: bool,
}

impl<'a> Seeder<'a> {
    fn new(h: &'a HamiltonianSpec, ansatz: AnsatzKind) -> Result<Self> {
        let tracking = match &h.drive {
            Drive::Tracking { amplitudes, .. } => amplitudes.g_yz == 0.0 && amplitudes.g_zy == 0.0,
            Drive::General(_) => false,
        };
        let u0 = h.controls(0.0);
        if ansatz == AnsatzKind::FullSystem && !tracking && (u0.g_yz != 0.0 || u0.g_zy != 0.0) {
            return Err(Error::IncompatibleAnsatz {
                ansatz: ansatz.name(),
                reason: "YZ/ZY drives at t = 0 make the Cartan-form parameters discontinuous at the origin".into(),
            });
        }
        Ok(Self { h, ansatz, tracking })
    }

    fn at(&self, t: f64) -> Result<SteeringState> {
        if t == 0.0 {
            return Ok(SteeringState::ZERO);
        }
        if self.tracking && self.ansatz == AnsatzKind::FullSystem {
            // The symmetric solution is the exact one for tracking drives and
            // its system is regular at the origin.
            let rhs = |t: f64, y: &ode::State| -> Result<ode::State> {
                let s = SteeringState::from_array(*y);
                Ok(AnsatzKind::TrackingSymmetric.rhs(&s, &self.h.controls(t), t)?.to_array())
            };
            let y = ode::integrate(rhs, 0.0, [0.0; 7], &[t], &OdeOptions { rtol: 1e-13, atol: 1e-16, ..Default::default() })?;
            return Ok(SteeringState::from_array(y[0]));
        }
        let area = |pick: fn(&ControlVector) -> f64| {
            quad::integrate(|tau| pick(&self.h.controls(tau)), 0.0, t, 1e-13, 1e-18)
        };
        let o1 = area(|u| u.omega_1x);
        let o2 = area(|u| u.omega_2x);
        let (g1, g2, g3) = (area(|u| u.g_xx), area(|u| u.g_yy), area(|u| u.g_zz));
        let s = match self.ansatz {
            AnsatzKind::Case3 => SteeringState {
                alpha: 0.5 * (o1 + o2),
                beta: o2,
                c1: g1,
                c2: g2,
                c3: g2,
                zeta: 0.5 * (o1 - o2),
                xi: 0.0,
            },
            _ => SteeringState { alpha: 0.5 * o1, beta: 0.5 * o2, c1: g1, c2: g2, c3: g3, zeta: 0.5 * o1, xi: 0.5 * o2 },
        };
        Ok(self.ansatz.constrain(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::Envelope;
    use crate::lie::ClassVector;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn pure_xx_draws_the_c1_axis() {
        let h = HamiltonianSpec::constant(Frame::X, ControlVector { g_xx: 1.0, ..Default::default() });
        for ansatz in [AnsatzKind::TrackingSymmetric, AnsatzKind::FullSystem] {
            let traj = integrate(&h, ansatz, FRAC_PI_2, 11).unwrap();
            let end = traj.last().unwrap().state;
            assert!(end.class().max_abs_diff(ClassVector::CNOT) < 1e-12);
            assert!(end.alpha.abs() + end.beta.abs() + end.zeta.abs() + end.xi.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_stays_at_origin() {
        for ansatz in AnsatzKind::ALL {
            let traj = integrate(&HamiltonianSpec::zero(), ansatz, 1.0, 5).unwrap();
            assert!(traj.samples.iter().all(|s| s.state == SteeringState::ZERO && s.recon_fidelity == 1.0));
        }
    }

    #[test]
    fn tracking_reconstruction_with_sin2_envelope() {
        let amps = ControlVector { omega_1x: 3.0, omega_2x: 0.2, g_xx: 1.0, g_yy: 1.0, g_zz: 0.1, ..Default::default() };
        let h = HamiltonianSpec::tracking(Frame::X, Envelope::sin2(3.0), amps);
        let traj = integrate(&h, AnsatzKind::TrackingSymmetric, 3.0, 50).unwrap();
        assert!(traj.worst_infidelity() < 1e-12);
        assert_eq!(traj.samples.len(), 50);
    }

    #[test]
    fn full_system_from_tracking_seed() {
        let amps = ControlVector { omega_1x: 3.0, omega_2x: 0.2, g_xx: 1.0, g_yy: 1.0, g_zz: 0.1, ..Default::default() };
        let h = HamiltonianSpec::constant(Frame::X, amps);
        let full = integrate(&h, AnsatzKind::FullSystem, 0.8, 20).unwrap();
        let sym = integrate(&h, AnsatzKind::TrackingSymmetric, 0.8, 20).unwrap();
        for (a, b) in full.samples.iter().zip(&sym.samples) {
            assert!(a.state.max_abs_diff(b.state) < 1e-8, "{:?} vs {:?}", a.state, b.state);
        }
    }

    #[test]
    fn full_system_with_vanishing_envelope_start() {
        let amps = ControlVector { omega_1x: 0.8, g_xx: 1.0, g_yy: 0.6, g_zz: 0.2, ..Default::default() };
        let h = HamiltonianSpec::tracking(Frame::X, Envelope::sin2(2.0), amps);
        let full = integrate(&h, AnsatzKind::FullSystem, 1.0, 6).unwrap();
        let sym = integrate(&h, AnsatzKind::TrackingSymmetric, 1.0, 6).unwrap();
        for (a, b) in full.samples.iter().zip(&sym.samples) {
            assert!(a.state.max_abs_diff(b.state) < 1e-8, "{:?} vs {:?}", a.state, b.state);
        }
    }

    #[test]
    fn incompatible_drives_are_rejected() {
        let h = HamiltonianSpec::constant(Frame::X, ControlVector { omega_2x: 1.0, g_yy: 1.0, ..Default::default() });
        assert!(matches!(integrate(&h, AnsatzKind::Case1, 1.0, 3), Err(Error::IncompatibleAnsatz { .. })));
        let g = HamiltonianSpec::general(Frame::X, |_| ControlVector { g_yy: 1.0, ..Default::default() });
        assert!(matches!(
            integrate(&g, AnsatzKind::TrackingSymmetric, 1.0, 3),
            Err(Error::IncompatibleAnsatz { .. })
        ));
    }

    #[test]
    fn case1_with_time_dependent_controls() {
        let h = HamiltonianSpec::general(Frame::X, |t| ControlVector {
            omega_1x: 0.9 + 0.2 * (1.3 * t).sin(),
            g_xx: 1.0 + 0.1 * t,
            g_yy: 0.8 - 0.1 * (2.0 * t).cos(),
            ..Default::default()
        });
        let traj = integrate(&h, AnsatzKind::Case1, 1.5, 30).unwrap();
        assert!(traj.worst_infidelity() < 1e-9, "{}", traj.worst_infidelity());
    }
}
