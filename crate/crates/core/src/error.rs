use thiserror::Error;

use crate::lie::ClassVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("gate is not in the CNOT class: invariant residual {residual:.3e}, class {class}")]
    NotCnotClass { residual: f64, class: ClassVector },

    #[error("singular steering state at t = {t:.6e} (denominator {denominator:.3e})")]
    Singular { t: f64, denominator: f64 },

    #[error("Hamiltonian is incompatible with the {ansatz} ansatz: {reason}")]
    IncompatibleAnsatz { ansatz: &'static str, reason: String },

    #[error("reconstruction infidelity {infidelity:.3e} at t = {t:.6e} exceeds tolerance {tolerance:.1e}")]
    Reconstruction { t: f64, infidelity: f64, tolerance: f64 },

    #[error("denominator (cos c2 + cos c3)^2 collapses at τ = {tau:.6e}")]
    Domain { tau: f64 },

    #[error("infeasible parameters: {what} (radicand {radicand:.6})")]
    Infeasible { what: String, radicand: f64 },

    #[error("root finder did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("integration failed at t = {t:.6e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
