//! Direct solution of `dU/dt = −iH(t)U`, `U(0) = I`.

use num_complex::Complex64;

use super::hamiltonian::{Drive, HamiltonianSpec};
use super::state::ControlVector;
use crate::envelope::{envelope_area, integrate_on};
use crate::lie::{pauli_product_in, GeneratorLabel};
use crate::qmat::{exp_involution, expm_hermitian, HermitianGenerator, UnitaryMatrix};

/// Default number of Magnus steps across a propagation window.
pub const MAGNUS_STEPS: usize = 4000;

/// `U(t)`. Tracking drives commute with themselves at all times and use one
/// exact exponential; other drives use fourth-order Magnus steps.
pub fn direct_propagate(h: &HamiltonianSpec, t: f64) -> UnitaryMatrix {
    match &h.drive {
        Drive::Tracking { envelope, amplitudes, xx_profile } => {
            let area = envelope_area(envelope, t);
            let rest = ControlVector { g_xx: 0.0, ..*amplitudes };
            let base = expm_hermitian(&rest.hamiltonian(h.frame), area);
            if amplitudes.g_xx == 0.0 {
                return base;
            }
            let xx_area = if xx_profile.is_constant() {
                area * xx_profile.value(0.0)
            } else {
                integrate_on(envelope, |tau| envelope.value(tau) * xx_profile.value(tau), 0.0, t)
            };
            let xx = HermitianGenerator::from_trusted(pauli_product_in(h.frame, GeneratorLabel::XX));
            &base * &exp_involution(&xx, amplitudes.g_xx * xx_area)
        }
        Drive::General(_) => {
            let mut p = Propagator::new(h, t / MAGNUS_STEPS as f64);
            p.advance_to(t);
            p.unitary().clone()
        }
    }
}

/// Product of `n` midpoint exponentials with piecewise-constant controls.
pub fn propagate_sliced(h: &HamiltonianSpec, t: f64, n: usize) -> UnitaryMatrix {
    let dt = t / n as f64;
    (0..n).fold(UnitaryMatrix::identity(), |u, j| {
        let step = expm_hermitian(&h.hamiltonian((j as f64 + 0.5) * dt), dt);
        &step * &u
    })
}

/// Incremental fourth-order Magnus propagator.
pub struct Propagator<'a> {
    h: &'a HamiltonianSpec,
    max_step: f64,
    t: f64,
    u: UnitaryMatrix,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a HamiltonianSpec, max_step: f64) -> Self {
        Self { h, max_step: max_step.abs(), t: 0.0, u: UnitaryMatrix::identity() }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.u
    }

    pub fn advance_to(&mut self, target: f64) {
        let span = target - self.t;
        if span <= 0.0 {
            return;
        }
        let n = if self.max_step > 0.0 { (span / self.max_step).ceil().max(1.0) as usize } else { 1 };
        let dt = span / n as f64;
        for j in 0..n {
            let a = self.t + j as f64 * dt;
            self.u = &magnus_step(self.h, a, dt) * &self.u;
        }
        self.t = target;
    }
}

fn magnus_step(h: &HamiltonianSpec, a: f64, dt: f64) -> UnitaryMatrix {
    let off = 3f64.sqrt() / 6.0;
    let h1 = h.hamiltonian(a + (0.5 - off) * dt);
    let h2 = h.hamiltonian(a + (0.5 + off) * dt);
    // exp(Ω) with Ω = −i(dt/2)(H1+H2) − (√3 dt²/12)[H2, H1], written as exp(−iK).
    let (m1, m2) = (h1.matrix(), h2.matrix());
    let comm = m2 * m1 - m1 * m2;
    let k = (m1 + m2).scale(0.5 * dt) - comm * Complex64::new(0.0, 3f64.sqrt() * dt * dt / 12.0);
    expm_hermitian(&HermitianGenerator::from_trusted((k + k.adjoint()).scale(0.5)), 1.0)
}
