//! Steering equations for the Cartan-form parameters and direct propagation.

pub mod hamiltonian;
pub mod integrate;
pub mod ode;
pub mod propagate;
pub mod rhs;
pub mod state;

pub use hamiltonian::{ControlFn, Drive, HamiltonianSpec};
pub use integrate::{integrate, integrate_with, sample_times, IntegrateOptions, Trajectory, TrajectorySample};
pub use propagate::{direct_propagate, propagate_sliced, Propagator};
pub use rhs::{rhs_case1, rhs_case2, rhs_case3, rhs_full, rhs_tracking, AnsatzKind};
pub use state::{coefficient_matrix, frame_rotation, ControlVector, SteeringState, TrigIntermediates};
