//! Numerical tolerances shared across the crate.

/// Max-abs deviation allowed in `U†U - I` and `|det U| - 1`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Max-abs deviation allowed in `H - H†`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Reconstruction infidelity accepted along a steering trajectory.
pub const RECON_TOL: f64 = 1e-8;

/// Smallest admissible magnitude of a steering-system denominator.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Eigenvalue clustering radius used when reading class vectors off a spectrum.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Invariant residual above which a gate is reported outside the CNOT class.
pub const CNOT_CLASS_TOL: f64 = 1e-6;
