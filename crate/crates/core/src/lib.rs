//! Single-step CNOT synthesis from exchange Hamiltonians.
//!
//! The crate is organized bottom-up:
//!
//! * [`qmat`]: 4×4 complex matrices, Pauli constructors, exact exponentials.
//! * [`lie`]: the seven-generator algebra `L0`, its commutator table and the
//!   Weyl chamber.
//! * [`cartan`]: local invariants, class-vector extraction, entanglers.
//! * [`steer`]: the Cartan-form steering ODEs and direct propagation.
//! * [`tracking`]: closed-form tracking-control solutions and device models.
//! * [`design`]: constrained CNOT designs solved by Newton continuation.

pub mod cartan;
pub mod design;
pub mod envelope;
pub mod error;
pub mod lie;
pub mod qmat;
pub mod quad;
pub mod steer;
pub mod tables;
pub mod tol;
pub mod tracking;
pub mod units;

pub use cartan::{
    assemble_cnot, canonical_cnot, class_vector_from_unitary, entangler_from_class,
    invariants_from_class, local_invariants, LocalInvariants,
};
pub use error::{Error, Result};
pub use lie::{canonicalize_weyl, ClassVector, Frame, GeneratorLabel, L0Element};
pub use qmat::{expm_hermitian, fidelity, pauli_on_qubit, Axis, HermitianGenerator, UnitaryMatrix};
pub use steer::{
    direct_propagate, integrate, AnsatzKind, ControlVector, HamiltonianSpec, SteeringState, Trajectory,
};
pub use tracking::{
    alpha_beta_tracking, class_vector_tracking, cnot_condition, rabi_for_axis_point, DeviceModel,
    TrackingHamiltonian,
};
pub use design::{
    build_design_hamiltonian, cnot_residual, continuation_scan, efficiency, solve_design, DesignModel,
    DesignParams, DesignSolution, DesignVariant,
};
pub use tables::TableId;
