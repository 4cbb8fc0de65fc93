use std::fmt;
use std::sync::Arc;

use crate::envelope::Envelope;
use crate::lie::Frame;
use crate::qmat::HermitianGenerator;

use super::state::ControlVector;

/// Time-dependent control function `t ↦ u(t)`.
#[derive(Clone)]
pub struct ControlFn(Arc<dyn Fn(f64) -> ControlVector + Send + Sync>);

impl ControlFn {
    pub fn new(f: impl Fn(f64) -> ControlVector + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> ControlVector {
        (self.0)(t)
    }
}

impl fmt::Debug for ControlFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ControlFn(..)")
    }
}

#[derive(Debug, Clone)]
pub enum Drive {
    /// `u(t) = γ(t) · amplitudes`, except `g_xx(t) = γ(t) · p(t) · amplitudes.g_xx`
    /// with the optional profile `p` (XX is central, so it may vary freely).
    Tracking { envelope: Envelope, amplitudes: ControlVector, xx_profile: Envelope },
    /// Arbitrary piecewise-continuous controls.
    General(ControlFn),
}

/// Hamiltonian `H(t) = Σ u_l(t) P_l / 2` over the generators of a frame.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub frame: Frame,
    pub drive: Drive,
}

impl HamiltonianSpec {
    pub fn tracking(frame: Frame, envelope: Envelope, amplitudes: ControlVector) -> Self {
        Self { frame, drive: Drive::Tracking { envelope, amplitudes, xx_profile: Envelope::unit() } }
    }

    pub fn constant(frame: Frame, amplitudes: ControlVector) -> Self {
        Self::tracking(frame, Envelope::unit(), amplitudes)
    }

    pub fn general(frame: Frame, f: impl Fn(f64) -> ControlVector + Send + Sync + 'static) -> Self {
        Self { frame, drive: Drive::General(ControlFn::new(f)) }
    }

    pub fn zero() -> Self {
        Self::constant(Frame::X, ControlVector::default())
    }

    pub fn controls(&self, t: f64) -> ControlVector {
        match &self.drive {
            Drive::Tracking { envelope, amplitudes, xx_profile } => {
                let mut u = amplitudes.scale(envelope.value(t));
                u.g_xx *= xx_profile.value(t);
                u
            }
            Drive::General(f) => f.eval(t),
        }
    }

    pub fn hamiltonian(&self, t: f64) -> HermitianGenerator {
        self.controls(t).hamiltonian(self.frame)
    }

    pub fn is_tracking(&self) -> bool {
        matches!(self.drive, Drive::Tracking { .. })
    }
}
