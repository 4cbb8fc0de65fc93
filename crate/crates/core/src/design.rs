//! Constant-drive CNOT designs under amplitude and speed limits.
//!
//! Each design fixes the coupling `g` and anisotropy `k` and searches for the
//! gate time and two free Rabi amplitudes at which `exp(−iHt)` falls in the
//! CNOT class.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::cartan::{local_invariants, m_matrix, special_unitary};
use crate::error::{Error, Result};
use crate::qmat::{expm_hermitian, pauli_on_qubit, pauli_pair, Axis, HermitianGenerator, UnitaryMatrix};
use crate::units::{from_half_pi, time_to_half_pi_over_g};

pub const MAX_RABI_RATIO: f64 = 1.0;
pub const MIN_EFFICIENCY: f64 = 2.5;
pub const MAX_ANISOTROPY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignVariant {
    /// `Ω1(σ1x − σ1y) + Ω2(σ2x − σ2y) + Ω3(σ1z − σ2z)`.
    SymDcMinus,
    /// `Ω1(σ1x + σ1y) + Ω2(σ2x + σ2y) + Ω3(σ1z − σ2z)`.
    SymDcPlus,
    /// `Ω1(σ1x − σ1y) + Ω2(σ2x − σ2y) + Ω3σ1z − Ω4σ2z`.
    AsymDcMinus,
    /// `Ω1(σ1x + σ1y) + Ω2(σ2x + σ2y) + Ω3σ1z − Ω4σ2z`.
    AsymDcPlus,
}

impl DesignVariant {
    pub fn is_symmetric(self) -> bool {
        matches!(self, DesignVariant::SymDcMinus | DesignVariant::SymDcPlus)
    }

    fn y_sign(self) -> f64 {
        match self {
            DesignVariant::SymDcMinus | DesignVariant::AsymDcMinus => -1.0,
            DesignVariant::SymDcPlus | DesignVariant::AsymDcPlus => 1.0,
        }
    }

    /// Name of the free detuning amplitude.
    pub fn detuning_name(self) -> &'static str {
        if self.is_symmetric() {
            "omega3"
        } else {
            "omega4"
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DesignVariant::SymDcMinus => "sym-dc-minus",
            DesignVariant::SymDcPlus => "sym-dc-plus",
            DesignVariant::AsymDcMinus => "asym-dc-minus",
            DesignVariant::AsymDcPlus => "asym-dc-plus",
        }
    }

    /// Starting point at `k = 0` on the branch the continuation follows.
    pub fn default_seed(self) -> DesignParams {
        if self.is_symmetric() {
            DesignParams { t_half_pi: 1.5958, omega2: 0.0, omega_z: 0.7555 }
        } else {
            DesignParams { t_half_pi: 1.5538, omega2: 0.0, omega_z: 0.4025 }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignModel {
    pub variant: DesignVariant,
    pub g: f64,
    pub k: f64,
}

impl DesignModel {
    pub fn new(variant: DesignVariant, g: f64, k: f64) -> Self {
        Self { variant, g, k }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidInput(format!("coupling g must be positive, got {}", self.g)));
        }
        if !self.k.is_finite() {
            return Err(Error::InvalidInput(format!("anisotropy k must be finite, got {}", self.k)));
        }
        Ok(())
    }
}

/// Unknowns of a design: gate time in units of `π/2g` and the two free Rabi
/// amplitudes in units of `g` (`Ω2` and `Ω3` or `Ω4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    pub t_half_pi: f64,
    pub omega2: f64,
    pub omega_z: f64,
}

impl DesignParams {
    fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.t_half_pi, self.omega2, self.omega_z)
    }

    fn from_vector(v: &Vector3<f64>) -> Self {
        Self { t_half_pi: v[0], omega2: v[1], omega_z: v[2] }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::from_vector(&(self.to_vector() * factor))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiValue {
    pub name: String,
    pub over_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Every listed Rabi amplitude satisfies `|Ω| ≤ g`.
    pub rabi_within_g: bool,
    /// `η ≥ 2.5`.
    pub efficiency_ok: bool,
    /// `|k| < 0.5`.
    pub anisotropy_ok: bool,
}

impl ConstraintReport {
    pub fn evaluate(rabi: &[RabiValue], eta: f64, k: f64) -> Self {
        Self {
            rabi_within_g: rabi.iter().all(|r| r.over_g.abs() <= MAX_RABI_RATIO + 1e-12),
            efficiency_ok: eta >= MIN_EFFICIENCY - 1e-12,
            anisotropy_ok: k.abs() < MAX_ANISOTROPY,
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.rabi_within_g && self.efficiency_ok && self.anisotropy_ok
    }
}

/// A CNOT-class gate design: a row of the design tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub model: String,
    pub g: f64,
    pub k: f64,
    /// Gate time in the units of `1/g` (seconds when `g` is in rad/s).
    pub t_cnot: f64,
    /// Gate time in units of `π/2g`.
    pub t_half_pi: f64,
    pub rabi: Vec<RabiValue>,
    pub eta: f64,
    /// Distance of the gate's local invariants from the CNOT values `(0, 1)`.
    pub residual: f64,
    pub constraints: ConstraintReport,
}

impl DesignSolution {
    pub fn rabi(&self, name: &str) -> Option<f64> {
        self.rabi.iter().find(|r| r.name == name).map(|r| r.over_g)
    }

    /// Unknown vector of a design row (only meaningful for design models).
    pub fn params(&self) -> DesignParams {
        let z = self.rabi("omega3").or_else(|| self.rabi("omega4")).unwrap_or(0.0);
        DesignParams { t_half_pi: self.t_half_pi, omega2: self.rabi("omega2").unwrap_or(0.0), omega_z: z }
    }
}

/// `η = 2π / (g t)`.
pub fn efficiency(t_gate: f64, g: f64) -> f64 {
    2.0 * PI / (g * t_gate)
}

/// `H/2`-normalized design Hamiltonian with `γ = 1`; `omega2`, `omega_z` in rad/s.
pub fn build_design_hamiltonian(model: &DesignModel, omega2: f64, omega_z: f64) -> HermitianGenerator {
    let g = model.g;
    let s = model.variant.y_sign();
    let p = |a, q| pauli_on_qubit(a, q);
    let x1 = p(Axis::X, 1);
    let y1 = p(Axis::Y, 1);
    let z1 = p(Axis::Z, 1);
    let x2 = p(Axis::X, 2);
    let y2 = p(Axis::Y, 2);
    let z2 = p(Axis::Z, 2);
    let (z1_amp, z2_amp) = if model.variant.is_symmetric() { (omega_z, -omega_z) } else { (g, -omega_z) };
    let xx = pauli_pair(Axis::X, Axis::X);
    let yy = pauli_pair(Axis::Y, Axis::Y);
    let zz = pauli_pair(Axis::Z, Axis::Z);
    let terms = [
        (g, &x1),
        (s * g, &y1),
        (omega2, &x2),
        (s * omega2, &y2),
        (z1_amp, &z1),
        (z2_amp, &z2),
        (g, &xx),
        (g, &yy),
        (g * model.k, &zz),
    ];
    HermitianGenerator::combine(terms.iter().map(|&(w, h)| (0.5 * w, h)))
}

/// Gate produced by running the design for `params.t_half_pi` units of `π/2g`.
pub fn design_unitary(model: &DesignModel, params: &DesignParams) -> UnitaryMatrix {
    let h = build_design_hamiltonian(model, params.omega2 * model.g, params.omega_z * model.g);
    expm_hermitian(&h, from_half_pi(params.t_half_pi) / model.g)
}

/// `(Re g1, Im g1, g2 − 1)` of `exp(−iHt)`; zero exactly on the CNOT class.
pub fn cnot_residual(model: &DesignModel, t: f64, rabi: [f64; 2]) -> [f64; 3] {
    let h = build_design_hamiltonian(model, rabi[0], rabi[1]);
    let inv = local_invariants(&expm_hermitian(&h, t));
    [inv.g1.re, inv.g1.im, inv.g2 - 1.0]
}

const REGULAR_LEN: usize = 34;

/// `m² + I` and `tr m` for the special-unitary gate; these vanish exactly on
/// the CNOT class and, unlike the invariants, have a simple root there.
fn regular_residual(model: &DesignModel, p: &DesignParams) -> SMatrix<f64, REGULAR_LEN, 1> {
    let su = special_unitary(&design_unitary(model, p));
    let m = m_matrix(&su);
    let r = m * m + crate::qmat::CMat4::identity();
    let tr = m.trace();
    let mut out = SMatrix::<f64, REGULAR_LEN, 1>::zeros();
    for (i, z) in r.iter().enumerate() {
        out[i] = z.re;
        out[16 + i] = z.im;
    }
    out[32] = tr.re;
    out[33] = tr.im;
    out
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub fd_step: f64,
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iterations: 100, fd_step: 1e-6, tolerance: 1e-13 }
    }
}

pub fn solve_design(model: &DesignModel, guess: &DesignParams) -> Result<DesignSolution> {
    solve_design_with(model, guess, &SolveOptions::default())
}

/// Levenberg–Marquardt on the regular residual with a central-difference
/// Jacobian.
pub fn solve_design_with(model: &DesignModel, guess: &DesignParams, opts: &SolveOptions) -> Result<DesignSolution> {
    model.validate()?;
    let mut x = guess.to_vector();
    let mut r = regular_residual(model, guess);
    let mut lambda = 1e-9;
    let mut iterations = 0;
    while iterations < opts.max_iterations && r.norm() > opts.tolerance {
        iterations += 1;
        let mut jac = SMatrix::<f64, REGULAR_LEN, 3>::zeros();
        for j in 0..3 {
            let mut e = Vector3::zeros();
            e[j] = opts.fd_step;
            let plus = regular_residual(model, &DesignParams::from_vector(&(x + e)));
            let minus = regular_residual(model, &DesignParams::from_vector(&(x - e)));
            jac.set_column(j, &((plus - minus) / (2.0 * opts.fd_step)));
        }
        let jtj: Matrix3<f64> = jac.transpose() * jac;
        let jtr: Vector3<f64> = jac.transpose() * r;
        let mut accepted = false;
        for _ in 0..30 {
            let damped = jtj + Matrix3::from_diagonal(&jtj.diagonal()) * lambda;
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = x + step;
            let r_trial = regular_residual(model, &DesignParams::from_vector(&trial));
            if r_trial.norm() < r.norm() {
                x = trial;
                r = r_trial;
                lambda = (lambda * 0.1).max(1e-12);
                accepted = true;
                if step.norm() < 1e-15 {
                    iterations = opts.max_iterations;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let params = DesignParams::from_vector(&x);
    if r.norm() > 1e-9 || !(params.t_half_pi > 0.0) {
        return Err(Error::NonConvergence { iterations, residual: r.norm() });
    }
    Ok(make_solution(model, &params))
}

fn make_solution(model: &DesignModel, p: &DesignParams) -> DesignSolution {
    let t_cnot = from_half_pi(p.t_half_pi) / model.g;
    let res = cnot_residual(model, t_cnot, [p.omega2 * model.g, p.omega_z * model.g]);
    let residual = res.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rabi = vec![
        RabiValue { name: "omega2".into(), over_g: p.omega2 },
        RabiValue { name: model.variant.detuning_name().into(), over_g: p.omega_z },
    ];
    let eta = efficiency(t_cnot, model.g);
    let constraints = ConstraintReport::evaluate(&rabi, eta, model.k);
    DesignSolution {
        model: model.variant.name().into(),
        g: model.g,
        k: model.k,
        t_cnot,
        t_half_pi: time_to_half_pi_over_g(t_cnot, model.g),
        rabi,
        eta,
        residual,
        constraints,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGap {
    pub k: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub solutions: Vec<DesignSolution>,
    pub gaps: Vec<ScanGap>,
}

/// Largest parameter change between neighbouring rows before the step is
/// treated as a jump to another branch.
const BRANCH_JUMP: f64 = 0.25;

/// Solves the design at each `k` in order, seeding every point with the
/// previous solution. A failed or jumping point is retried from the default
/// seed and, failing that, reported as a gap.
pub fn continuation_scan(variant: DesignVariant, g: f64, k_values: &[f64], seed: Option<DesignParams>) -> ScanReport {
    let mut solutions = Vec::new();
    let mut gaps = Vec::new();
    let fresh = seed.unwrap_or_else(|| variant.default_seed());
    let mut prev: Option<DesignParams> = None;
    for &k in k_values {
        let model = DesignModel::new(variant, g, k);
        let attempt = |start: &DesignParams| -> Result<DesignSolution> {
            let sol = solve_design(&model, start)?;
            let jump = (sol.params().to_vector() - start.to_vector()).amax();
            if jump > BRANCH_JUMP {
                return Err(Error::NonConvergence { iterations: 0, residual: jump });
            }
            Ok(sol)
        };
        let result = match prev {
            Some(p) => attempt(&p).or_else(|_| attempt(&fresh)),
            None => attempt(&fresh),
        };
        match result {
            Ok(sol) => {
                prev = Some(sol.params());
                solutions.push(sol);
            }
            Err(e) => gaps.push(ScanGap { k, reason: e.to_string() }),
        }
    }
    ScanReport { solutions, gaps }
}

/// Convenience: CNOT time of the bare `XX` coupling, `π/(2g)`.
pub fn xx_cnot_time(g: f64) -> f64 {
    FRAC_PI_2 / g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::class_vector_from_unitary;
    use crate::lie::ClassVector;

    #[test]
    fn bare_hamiltonian_terms() {
        let m = DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.2);
        let h = build_design_hamiltonian(&m, 0.0, 0.0);
        let expected = HermitianGenerator::combine([
            (0.5, &pauli_on_qubit(Axis::X, 1)),
            (-0.5, &pauli_on_qubit(Axis::Y, 1)),
            (0.5, &pauli_pair(Axis::X, Axis::X)),
            (0.5, &pauli_pair(Axis::Y, Axis::Y)),
            (0.1, &pauli_pair(Axis::Z, Axis::Z)),
        ]);
        assert!((h.matrix() - expected.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn asym_without_anisotropy_has_no_zz() {
        let m = DesignModel::new(DesignVariant::AsymDcMinus, 1.0, 0.0);
        let h = build_design_hamiltonian(&m, 0.3, 0.4);
        let zz = pauli_pair(Axis::Z, Axis::Z);
        let overlap = (zz.matrix() * h.matrix()).trace();
        assert!(overlap.norm() < 1e-15);
    }

    #[test]
    fn plus_and_minus_differ_only_in_y_signs() {
        let minus = build_design_hamiltonian(&DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.1), 0.2, 0.7);
        let plus = build_design_hamiltonian(&DesignModel::new(DesignVariant::SymDcPlus, 1.0, 0.1), 0.2, 0.7);
        let diff = HermitianGenerator::combine([(1.0, &plus), (-1.0, &minus)]);
        let expected = HermitianGenerator::combine([(1.0, &pauli_on_qubit(Axis::Y, 1)), (0.2, &pauli_on_qubit(Axis::Y, 2))]);
        assert!((diff.matrix() - expected.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn residual_anchors() {
        let m = DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.0);
        let r0 = cnot_residual(&m, 0.0, [0.0, 0.0]);
        assert!((r0[0] - 1.0).abs() < 1e-13 && r0[1].abs() < 1e-13 && (r0[2] - 2.0).abs() < 1e-13);
        let r = cnot_residual(&m, from_half_pi(1.595776), [0.0, 0.755502]);
        assert!(r.iter().all(|v| v.abs() < 1e-5), "{r:?}");
    }

    #[test]
    fn efficiency_units() {
        assert!((efficiency(from_half_pi(1.6), 1.0) - 2.5).abs() < 1e-15);
        assert!((efficiency(from_half_pi(1.595776), 1.0) - 2.5066).abs() < 5e-5);
    }

    #[test]
    fn solves_first_rows() {
        let sol = solve_design(&DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.0), &DesignVariant::SymDcMinus.default_seed()).unwrap();
        assert!((sol.t_half_pi - 1.595776).abs() < 1e-6);
        assert!(sol.rabi("omega2").unwrap().abs() < 1e-6);
        assert!((sol.rabi("omega3").unwrap() - 0.755502).abs() < 1e-6);
        assert!(sol.residual < 1e-10 && sol.constraints.all_satisfied());
        let u = design_unitary(&DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.0), &sol.params());
        assert!(class_vector_from_unitary(&u).max_abs_diff(ClassVector::CNOT) < 1e-8);

        let sol = solve_design(&DesignModel::new(DesignVariant::AsymDcMinus, 1.0, 0.0), &DesignVariant::AsymDcMinus.default_seed()).unwrap();
        assert!((sol.t_half_pi - 1.553771).abs() < 1e-6);
        assert!((sol.rabi("omega4").unwrap() - 0.402539).abs() < 1e-6);
    }

    #[test]
    fn perturbed_seeds_converge_to_the_same_row() {
        let model = DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.05);
        let base = DesignParams { t_half_pi: 1.594657, omega2: 0.013257, omega_z: 0.757500 };
        for f in [0.9, 1.1] {
            let sol = solve_design(&model, &base.scaled(f)).unwrap();
            assert!((sol.t_half_pi - 1.594657).abs() < 1e-6 && (sol.rabi("omega2").unwrap() - 0.013257).abs() < 1e-6);
        }
    }

    #[test]
    fn solution_is_independent_of_g() {
        let a = solve_design(&DesignModel::new(DesignVariant::AsymDcMinus, 1.0, 0.1), &DesignVariant::AsymDcMinus.default_seed()).unwrap();
        let b = solve_design(&DesignModel::new(DesignVariant::AsymDcMinus, 3.0, 0.1), &DesignVariant::AsymDcMinus.default_seed()).unwrap();
        assert!((a.t_half_pi - b.t_half_pi).abs() < 1e-9);
        assert!((b.t_cnot - a.t_cnot / 3.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_scan_equals_solve() {
        let scan = continuation_scan(DesignVariant::SymDcMinus, 1.0, &[0.0], None);
        let direct = solve_design(&DesignModel::new(DesignVariant::SymDcMinus, 1.0, 0.0), &DesignVariant::SymDcMinus.default_seed()).unwrap();
        assert_eq!(scan.solutions, vec![direct]);
        assert!(scan.gaps.is_empty());
    }

    #[test]
    fn rejects_bad_coupling() {
        let r = solve_design(&DesignModel::new(DesignVariant::SymDcMinus, -1.0, 0.0), &DesignVariant::SymDcMinus.default_seed());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
