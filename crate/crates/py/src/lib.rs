//! Python bindings: gate decomposition, device-model steering and the CNOT
//! design solvers.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use weylsteer_core as core;
use weylsteer_core::cartan;
use weylsteer_core::design::{self, DesignModel, DesignParams, DesignVariant};
use weylsteer_core::envelope::Envelope;
use weylsteer_core::lie::{canonicalize_weyl, ClassVector, Frame};
use weylsteer_core::qmat::{CMat4, UnitaryMatrix};
use weylsteer_core::steer::{self, AnsatzKind, ControlVector, HamiltonianSpec};
use weylsteer_core::tables::{self, TableId};
use weylsteer_core::tracking;

create_exception!(weylsteer, InfeasibleError, PyValueError, "No real Rabi frequencies exist for the requested parameters.");
create_exception!(weylsteer, NumericalError, PyRuntimeError, "A solver, integrator or reconstruction check failed.");

fn to_py(e: core::Error) -> PyErr {
    use core::Error as E;
    let msg = e.to_string();
    match e {
        E::Infeasible { .. } => InfeasibleError::new_err(msg),
        E::InvalidInput(_) | E::NotHermitian { .. } | E::NotUnitary { .. } | E::IncompatibleAnsatz { .. } => {
            PyValueError::new_err(msg)
        }
        _ => NumericalError::new_err(msg),
    }
}

type PyMatrix = Vec<Vec<Complex64>>;

fn to_unitary(rows: PyMatrix) -> PyResult<UnitaryMatrix> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let m = CMat4::from_fn(|i, j| rows[i][j]);
    UnitaryMatrix::with_tolerance(m, 1e-8).map_err(to_py)
}

fn from_matrix(m: &CMat4) -> PyMatrix {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

fn parse_frame(s: &str) -> PyResult<Frame> {
    match s.to_ascii_lowercase().as_str() {
        "x" => Ok(Frame::X),
        "y" => Ok(Frame::Y),
        "z" => Ok(Frame::Z),
        _ => Err(PyValueError::new_err(format!("frame must be 'x', 'y' or 'z', got {s:?}"))),
    }
}

fn parse_variant(s: &str) -> PyResult<DesignVariant> {
    match s {
        "sym-dc" | "sym-dc-minus" => Ok(DesignVariant::SymDcMinus),
        "sym-dc-plus" => Ok(DesignVariant::SymDcPlus),
        "asym-dc" | "asym-dc-minus" => Ok(DesignVariant::AsymDcMinus),
        "asym-dc-plus" => Ok(DesignVariant::AsymDcPlus),
        _ => Err(PyValueError::new_err(format!("unknown design variant {s:?}"))),
    }
}

fn parse_ansatz(s: &str) -> PyResult<AnsatzKind> {
    AnsatzKind::ALL
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| PyValueError::new_err(format!("unknown ansatz {s:?}")))
}

fn parse_envelope(kind: &str, period: Option<f64>, t_end: f64) -> PyResult<Envelope> {
    match kind {
        "constant" => Ok(Envelope::unit()),
        "sin2" => Ok(Envelope::sin2(period.unwrap_or(t_end))),
        _ => Err(PyValueError::new_err(format!("envelope must be 'constant' or 'sin2', got {kind:?}"))),
    }
}

/// Gate report: canonical class vector (radians), local invariants and the
/// distance from the CNOT invariants.
#[pyclass(module = "weylsteer", frozen, skip_from_py_object, get_all)]
#[derive(Clone)]
struct Decomposition {
    class_vector: (f64, f64, f64),
    g1: Complex64,
    g2: f64,
    cnot_residual: f64,
}

#[pymethods]
impl Decomposition {
    #[getter]
    fn is_cnot_class(&self) -> bool {
        self.cnot_residual < core::tol::CNOT_CLASS_TOL
    }

    fn class_half_pi(&self) -> (f64, f64, f64) {
        let [a, b, c] = ClassVector::new(self.class_vector.0, self.class_vector.1, self.class_vector.2).in_half_pi();
        (a, b, c)
    }

    fn __repr__(&self) -> String {
        let (a, b, c) = self.class_half_pi();
        format!("Decomposition(class=({a:.6}, {b:.6}, {c:.6})×π/2, g1={}, g2={:.6})", self.g1, self.g2)
    }
}

#[pyfunction]
fn decompose(u: PyMatrix) -> PyResult<Decomposition> {
    let u = to_unitary(u)?;
    let c = canonicalize_weyl(cartan::class_vector_from_unitary(&u));
    let inv = cartan::local_invariants(&u);
    Ok(Decomposition { class_vector: (c.c1, c.c2, c.c3), g1: inv.g1, g2: inv.g2, cnot_residual: cartan::cnot_class_residual(&u) })
}

#[pyfunction]
fn local_invariants(u: PyMatrix) -> PyResult<(Complex64, f64)> {
    let inv = cartan::local_invariants(&to_unitary(u)?);
    Ok((inv.g1, inv.g2))
}

/// `exp(−i(c1 XX + c2 YY + c3 ZZ)/2)`.
#[pyfunction]
fn entangler(c1: f64, c2: f64, c3: f64) -> PyMatrix {
    from_matrix(cartan::entangler_from_class(ClassVector::new(c1, c2, c3)).matrix())
}

/// Flanks a CNOT-class gate with the fixed local rotations that turn the
/// `XX` entangler into the standard CNOT.
#[pyfunction]
fn assemble_cnot(u: PyMatrix) -> PyResult<PyMatrix> {
    let c = cartan::assemble_cnot(&to_unitary(u)?).map_err(to_py)?;
    Ok(from_matrix(c.matrix()))
}

/// Cartan-form steering parameters at one time.
#[pyclass(module = "weylsteer", frozen, skip_from_py_object, get_all)]
#[derive(Clone)]
struct SteeringState {
    t: f64,
    alpha: f64,
    beta: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    zeta: f64,
    xi: f64,
    recon_fidelity: f64,
}

impl SteeringState {
    fn new(t: f64, s: steer::SteeringState, recon_fidelity: f64) -> Self {
        Self { t, alpha: s.alpha, beta: s.beta, c1: s.c1, c2: s.c2, c3: s.c3, zeta: s.zeta, xi: s.xi, recon_fidelity }
    }

    fn core(&self) -> steer::SteeringState {
        steer::SteeringState {
            alpha: self.alpha,
            beta: self.beta,
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            zeta: self.zeta,
            xi: self.xi,
        }
    }
}

#[pymethods]
impl SteeringState {
    /// Unitary rebuilt from the Cartan form in the given generator frame.
    #[pyo3(signature = (frame = "x"))]
    fn reconstruct(&self, frame: &str) -> PyResult<PyMatrix> {
        Ok(from_matrix(self.core().reconstruct(parse_frame(frame)?).matrix()))
    }

    fn as_tuple(&self) -> (f64, f64, f64, f64, f64, f64, f64) {
        (self.c1, self.c2, self.c3, self.alpha, self.beta, self.zeta, self.xi)
    }

    fn __repr__(&self) -> String {
        format!(
            "SteeringState(t={}, c=({}, {}, {}), alpha={}, beta={}, zeta={}, xi={})",
            self.t, self.c1, self.c2, self.c3, self.alpha, self.beta, self.zeta, self.xi
        )
    }
}

/// One of the three device Hamiltonians with tracking controls.
#[pyclass(module = "weylsteer", frozen, skip_from_py_object)]
#[derive(Clone)]
struct DeviceModel(tracking::DeviceModel);

#[pymethods]
impl DeviceModel {
    #[staticmethod]
    fn capacitive(g: f64, omega1: f64) -> Self {
        Self(tracking::DeviceModel::CapacitiveRf { g, omega1 })
    }

    #[staticmethod]
    fn inductive_rf(g: f64, k: f64, omega1: f64, omega2: f64) -> Self {
        Self(tracking::DeviceModel::InductiveRf { g, k, omega1, omega2 })
    }

    #[staticmethod]
    fn dc_detune(g: f64, k: f64, omega1: f64) -> Self {
        Self(tracking::DeviceModel::InductiveDcDetune { g, k, omega1 })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    /// Envelope area at which the class vector reaches `(π/2, 0, 0)`.
    fn cnot_area(&self) -> f64 {
        self.0.cnot_area()
    }

    /// Closed-form trajectory at `n_samples` points of `[0, t_end]`, each
    /// checked against direct propagation. `t_end` defaults to the CNOT time
    /// of a constant envelope.
    #[pyo3(signature = (t_end = None, n_samples = 200, envelope = "constant", period = None))]
    fn steer(&self, t_end: Option<f64>, n_samples: usize, envelope: &str, period: Option<f64>) -> PyResult<Vec<SteeringState>> {
        self.0.validate().map_err(to_py)?;
        let t_end = t_end.unwrap_or_else(|| self.0.cnot_area());
        let h = self.0.tracking_hamiltonian(parse_envelope(envelope, period, t_end)?);
        let spec = h.to_spec();
        let times = steer::sample_times(t_end, n_samples);
        let states = tracking::analytic_series(&h, &times).map_err(to_py)?;
        Ok(times
            .iter()
            .zip(states)
            .map(|(&t, s)| {
                let f = core::fidelity(&s.reconstruct(self.0.frame()), &steer::direct_propagate(&spec, t));
                SteeringState::new(t, s, f)
            })
            .collect())
    }

    /// `U(t)` by direct propagation with a constant envelope.
    fn propagate(&self, t: f64) -> PyMatrix {
        let spec = self.0.tracking_hamiltonian(Envelope::unit()).to_spec();
        from_matrix(steer::direct_propagate(&spec, t).matrix())
    }

    fn __repr__(&self) -> String {
        format!("DeviceModel({:?})", self.0)
    }
}

/// Integrates the steering ODE for `u(t) = γ(t)·controls` in a frame.
///
/// `controls` maps any of `omega_1x, omega_2x, g_xx, g_yy, g_zz, g_yz, g_zy`
/// to an amplitude.
#[pyfunction]
#[pyo3(signature = (controls, t_end, n_samples = 200, ansatz = "tracking-symmetric", frame = "x", envelope = "constant", period = None))]
fn steer_controls(
    controls: HashMap<String, f64>,
    t_end: f64,
    n_samples: usize,
    ansatz: &str,
    frame: &str,
    envelope: &str,
    period: Option<f64>,
) -> PyResult<Vec<SteeringState>> {
    let mut u = ControlVector::default();
    for (name, v) in controls {
        let slot = match name.as_str() {
            "omega_1x" => &mut u.omega_1x,
            "omega_2x" => &mut u.omega_2x,
            "g_xx" => &mut u.g_xx,
            "g_yy" => &mut u.g_yy,
            "g_zz" => &mut u.g_zz,
            "g_yz" => &mut u.g_yz,
            "g_zy" => &mut u.g_zy,
            other => return Err(PyValueError::new_err(format!("unknown control {other:?}"))),
        };
        *slot = v;
    }
    let h = HamiltonianSpec::tracking(parse_frame(frame)?, parse_envelope(envelope, period, t_end)?, u);
    let traj = steer::integrate(&h, parse_ansatz(ansatz)?, t_end, n_samples).map_err(to_py)?;
    Ok(traj.samples.iter().map(|s| SteeringState::new(s.t, s.state, s.recon_fidelity)).collect())
}

/// A CNOT-class design or closed-form condition.
#[pyclass(module = "weylsteer", frozen, skip_from_py_object)]
#[derive(Clone)]
struct DesignSolution(design::DesignSolution);

#[pymethods]
impl DesignSolution {
    #[getter]
    fn model(&self) -> String {
        self.0.model.clone()
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k
    }

    #[getter]
    fn t_cnot(&self) -> f64 {
        self.0.t_cnot
    }

    #[getter]
    fn t_half_pi(&self) -> f64 {
        self.0.t_half_pi
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    /// Rabi amplitudes in units of `g`, keyed by name.
    #[getter]
    fn rabi(&self) -> HashMap<String, f64> {
        self.0.rabi.iter().map(|r| (r.name.clone(), r.over_g)).collect()
    }

    #[getter]
    fn constraints_satisfied(&self) -> bool {
        self.0.constraints.all_satisfied()
    }

    fn __repr__(&self) -> String {
        let rabi: Vec<String> = self.0.rabi.iter().map(|r| format!("{}={:.6}", r.name, r.over_g)).collect();
        format!(
            "DesignSolution(model={}, k={}, t={:.6} π/2g, {}, eta={:.4})",
            self.0.model,
            self.0.k,
            self.0.t_half_pi,
            rabi.join(", "),
            self.0.eta
        )
    }
}

/// Rabi frequencies that place the tracking endpoint at `(c1, 0, 0)`.
#[pyfunction]
#[pyo3(signature = (g1, g2, g3, c1_target, n, m))]
fn rabi_for_axis_point(g1: f64, g2: f64, g3: f64, c1_target: f64, n: u32, m: u32) -> PyResult<(f64, f64)> {
    tracking::rabi_for_axis_point(g1, g2, g3, c1_target, n, m).map_err(to_py)
}

/// Closed-form CNOT condition for `"capacitive"`, `"inductive-rf"` or `"dc-detune"`.
#[pyfunction]
#[pyo3(signature = (model, n, m = None, g = 1.0, k = 0.0))]
fn cnot_condition(model: &str, n: u32, m: Option<u32>, g: f64, k: f64) -> PyResult<DesignSolution> {
    let device = match model {
        "capacitive" => tracking::DeviceModel::CapacitiveRf { g, omega1: 0.0 },
        "inductive-rf" => tracking::DeviceModel::InductiveRf { g, k, omega1: 0.0, omega2: 0.0 },
        "dc-detune" => tracking::DeviceModel::InductiveDcDetune { g, k, omega1: 0.0 },
        other => return Err(PyValueError::new_err(format!("unknown device model {other:?}"))),
    };
    tracking::cnot_condition(&device, n, m.unwrap_or(n)).map(DesignSolution).map_err(to_py)
}

/// Solves a constrained design from a seed `(t_half_pi, omega2, omega_z)`;
/// the variant's `k = 0` solution is the default seed.
#[pyfunction]
#[pyo3(signature = (variant, k, g = 1.0, seed = None))]
fn solve_design(variant: &str, k: f64, g: f64, seed: Option<(f64, f64, f64)>) -> PyResult<DesignSolution> {
    let v = parse_variant(variant)?;
    let seed = seed.map_or_else(|| v.default_seed(), |(t_half_pi, omega2, omega_z)| DesignParams { t_half_pi, omega2, omega_z });
    design::solve_design(&DesignModel::new(v, g, k), &seed).map(DesignSolution).map_err(to_py)
}

/// Continuation in `k`. Returns the solutions and a list of `(k, reason)`
/// gaps where no solution on the branch was found.
#[pyfunction]
#[pyo3(signature = (variant, k_values, g = 1.0))]
fn continuation_scan(variant: &str, k_values: Vec<f64>, g: f64) -> PyResult<(Vec<DesignSolution>, Vec<(f64, String)>)> {
    let report = design::continuation_scan(parse_variant(variant)?, g, &k_values, None);
    Ok((
        report.solutions.into_iter().map(DesignSolution).collect(),
        report.gaps.into_iter().map(|gap| (gap.k, gap.reason)).collect(),
    ))
}

#[pyfunction]
fn efficiency(t_gate: f64, g: f64) -> f64 {
    design::efficiency(t_gate, g)
}

/// Regenerated rows of table 1, 2 or 3, in the column order of `table_columns`.
#[pyfunction]
fn regenerate_table(number: u32) -> PyResult<Vec<Vec<f64>>> {
    let id = TableId::from_number(number).map_err(to_py)?;
    Ok(tables::regenerate(id).map_err(to_py)?.into_iter().map(|r| r.cells).collect())
}

#[pyfunction]
fn golden_table(number: u32) -> PyResult<Vec<Vec<f64>>> {
    Ok(TableId::from_number(number).map_err(to_py)?.golden())
}

#[pyfunction]
fn table_columns(number: u32) -> PyResult<Vec<&'static str>> {
    Ok(TableId::from_number(number).map_err(to_py)?.columns().to_vec())
}

#[pymodule]
fn weylsteer(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<Decomposition>()?;
    m.add_class::<SteeringState>()?;
    m.add_class::<DeviceModel>()?;
    m.add_class::<DesignSolution>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(local_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(entangler, m)?)?;
    m.add_function(wrap_pyfunction!(assemble_cnot, m)?)?;
    m.add_function(wrap_pyfunction!(steer_controls, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_for_axis_point, m)?)?;
    m.add_function(wrap_pyfunction!(cnot_condition, m)?)?;
    m.add_function(wrap_pyfunction!(solve_design, m)?)?;
    m.add_function(wrap_pyfunction!(continuation_scan, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(regenerate_table, m)?)?;
    m.add_function(wrap_pyfunction!(golden_table, m)?)?;
    m.add_function(wrap_pyfunction!(table_columns, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_parsers() {
        assert_eq!(parse_variant("sym-dc").unwrap(), DesignVariant::SymDcMinus);
        assert_eq!(parse_variant("asym-dc-plus").unwrap(), DesignVariant::AsymDcPlus);
        assert_eq!(parse_ansatz("case3").unwrap(), AnsatzKind::Case3);
        assert_eq!(parse_frame("Z").unwrap(), Frame::Z);
    }

    #[test]
    fn matrix_conversion_round_trip() {
        let u = cartan::canonical_cnot();
        let back = to_unitary(from_matrix(u.matrix())).unwrap();
        assert_eq!(back.distance(&u), 0.0);
    }
}
