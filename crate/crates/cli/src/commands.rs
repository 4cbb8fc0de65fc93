use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::Serialize;
use weylsteer_core::cartan::{
    class_vector_from_unitary, cnot_class_residual, invariants_from_class, local_invariants, LocalInvariants,
};
use weylsteer_core::design::{continuation_scan, design_unitary, solve_design, DesignModel, DesignParams, DesignSolution, DesignVariant};
use weylsteer_core::envelope::Envelope;
use weylsteer_core::lie::{canonicalize_weyl, ClassVector};
use weylsteer_core::qmat::{fidelity, UnitaryMatrix};
use weylsteer_core::steer::{direct_propagate, integrate_with, sample_times, HamiltonianSpec, IntegrateOptions, SteeringState};
use weylsteer_core::tables::{diff_against_golden, regenerate, TableId};
use weylsteer_core::tol::{CNOT_CLASS_TOL, RECON_TOL};
use weylsteer_core::tracking::{analytic_series, cnot_condition, DeviceModel};
use weylsteer_core::Error as CoreError;

use crate::error::{CliError, CliResult};
use crate::format::{clean, csv_num, format_matrix, parse_matrix, sig};
use crate::runspec::{ModelSpec, RunSpec};

/// Input matrices must be unitary to this tolerance.
pub const INPUT_UNITARITY_TOL: f64 = 1e-8;

/// Reconstruction tolerance, overridable through `WEYLSTEER_TOL`.
pub fn recon_tolerance() -> CliResult<f64> {
    match std::env::var("WEYLSTEER_TOL") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| CliError::parse(format!("WEYLSTEER_TOL must be a positive number, got {s:?}"))),
        Err(_) => Ok(RECON_TOL),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeReport {
    pub class_half_pi: [f64; 3],
    pub class_radians: [f64; 3],
    pub g1: [f64; 2],
    pub g2: f64,
    pub cnot_residual: f64,
    pub verdict: String,
}

fn verdict(inv: &LocalInvariants, cnot_residual: f64) -> &'static str {
    if cnot_residual < CNOT_CLASS_TOL {
        "CNOT-class"
    } else if inv.distance(&LocalInvariants::IDENTITY) < CNOT_CLASS_TOL {
        "identity-class"
    } else if inv.distance(&invariants_from_class(ClassVector::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2))) < CNOT_CLASS_TOL {
        "SWAP-class"
    } else {
        "other"
    }
}

pub fn decompose_unitary(u: &UnitaryMatrix) -> DecomposeReport {
    let class = canonicalize_weyl(class_vector_from_unitary(u));
    let inv = local_invariants(u);
    let residual = cnot_class_residual(u);
    DecomposeReport {
        class_half_pi: class.in_half_pi().map(|v| clean(v, 1e-12)),
        class_radians: class.to_array().map(|v| clean(v, 1e-12)),
        g1: [clean(inv.g1.re, 1e-14), clean(inv.g1.im, 1e-14)],
        g2: clean(inv.g2, 1e-14),
        cnot_residual: residual,
        verdict: verdict(&inv, residual).into(),
    }
}

pub fn decompose(text: &str) -> CliResult<DecomposeReport> {
    let m = parse_matrix(text)?;
    let u = UnitaryMatrix::with_tolerance(m, INPUT_UNITARITY_TOL)?;
    Ok(decompose_unitary(&u))
}

pub fn write_decompose(out: &mut dyn Write, r: &DecomposeReport, json: bool) -> CliResult<()> {
    if json {
        return write_json(out, r);
    }
    let short = |v: &[f64; 3]| v.iter().map(|x| sig(*x, 10)).collect::<Vec<_>>().join(", ");
    let text = format!(
        "class: ({}) ×π/2\nclass (radians): ({})\ng1: {} {} {}i\ng2: {}\nCNOT residual: {:.3e}\nverdict: {}\n",
        short(&r.class_half_pi),
        short(&r.class_radians),
        sig(r.g1[0], 12),
        if r.g1[1] < 0.0 { "-" } else { "+" },
        sig(r.g1[1].abs(), 12),
        sig(r.g2, 12),
        r.cnot_residual,
        r.verdict
    );
    emit(out, &text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteerRow {
    pub t: f64,
    pub state: SteeringState,
    pub recon_fidelity: f64,
}

/// Steering trajectory and the directly propagated endpoint.
pub struct SteerOutput {
    pub rows: Vec<SteerRow>,
    pub endpoint: UnitaryMatrix,
}

pub fn steer(spec: &RunSpec, recon_tol: f64) -> CliResult<SteerOutput> {
    let t_end = spec.t_end()?;
    let n = spec.grid.n_samples;
    match &spec.model {
        ModelSpec::Device(d) => steer_device(d, &spec.gamma, t_end, n, recon_tol),
        ModelSpec::Controls { frame, controls, ansatz } => {
            let h = HamiltonianSpec::tracking(*frame, spec.gamma.clone(), *controls);
            let opts = IntegrateOptions { recon_tol, ..Default::default() };
            let traj = integrate_with(&h, *ansatz, t_end, n, &opts)?;
            let rows =
                traj.samples.iter().map(|s| SteerRow { t: s.t, state: s.state, recon_fidelity: s.recon_fidelity }).collect();
            Ok(SteerOutput { rows, endpoint: direct_propagate(&h, t_end) })
        }
    }
}

fn steer_device(d: &DeviceModel, gamma: &Envelope, t_end: f64, n: usize, recon_tol: f64) -> CliResult<SteerOutput> {
    let h = d.tracking_hamiltonian(gamma.clone());
    let spec = h.to_spec();
    let times = sample_times(t_end, n);
    let states = analytic_series(&h, &times)?;
    let mut rows = Vec::with_capacity(n);
    for (&t, state) in times.iter().zip(states) {
        let f = fidelity(&state.reconstruct(d.frame()), &direct_propagate(&spec, t));
        if 1.0 - f > recon_tol {
            return Err(CoreError::Reconstruction { t, infidelity: 1.0 - f, tolerance: recon_tol }.into());
        }
        rows.push(SteerRow { t, state, recon_fidelity: f });
    }
    Ok(SteerOutput { rows, endpoint: direct_propagate(&spec, t_end) })
}

pub const STEER_COLUMNS: [&str; 9] = ["t", "c1", "c2", "c3", "alpha", "beta", "zeta", "xi", "recon_fidelity"];

pub fn write_steer_csv(out: &mut dyn Write, rows: &[SteerRow], units: crate::runspec::Units) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::parse(format!("writing CSV: {e}"));
    w.write_record(STEER_COLUMNS).map_err(io)?;
    for r in rows {
        let s = r.state;
        let angles = [s.c1, s.c2, s.c3, s.alpha, s.beta, s.zeta, s.xi].map(|a| csv_num(units.convert(a)));
        let mut record = vec![csv_num(r.t)];
        record.extend(angles);
        record.push(csv_num(r.recon_fidelity));
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::parse(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn write_matrix(out: &mut dyn Write, u: &UnitaryMatrix) -> CliResult<()> {
    emit(out, &format_matrix(u.matrix()))
}

/// Model selector of `weylsteer solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveModel {
    Capacitive,
    InductiveRf,
    DcDetune,
    Design(DesignVariant),
}

impl std::str::FromStr for SolveModel {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "capacitive" => SolveModel::Capacitive,
            "inductive-rf" => SolveModel::InductiveRf,
            "dc-detune" => SolveModel::DcDetune,
            "sym-dc" | "sym-dc-minus" => SolveModel::Design(DesignVariant::SymDcMinus),
            "sym-dc-plus" => SolveModel::Design(DesignVariant::SymDcPlus),
            "asym-dc" | "asym-dc-minus" => SolveModel::Design(DesignVariant::AsymDcMinus),
            "asym-dc-plus" => SolveModel::Design(DesignVariant::AsymDcPlus),
            other => return Err(CliError::parse(format!("unknown model {other:?}"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub model: SolveModel,
    pub g: f64,
    pub k: f64,
    pub n: u32,
    pub m: Option<u32>,
    pub seed: Option<DesignParams>,
}

/// Continuation step used when a design is solved without a seed file.
const SOLVE_K_STEP: f64 = 0.025;

pub fn solve(req: &SolveRequest) -> CliResult<(DesignSolution, f64)> {
    let m = req.m.unwrap_or(req.n);
    let (solution, u) = match req.model {
        SolveModel::Design(variant) => {
            let model = DesignModel::new(variant, req.g, req.k);
            let sol = match req.seed {
                Some(seed) => solve_design(&model, &seed)?,
                None => continue_to(variant, req.g, req.k)?,
            };
            let u = design_unitary(&model, &sol.params());
            (sol, u)
        }
        device => {
            let model = match device {
                SolveModel::Capacitive => DeviceModel::CapacitiveRf { g: req.g, omega1: 0.0 },
                SolveModel::InductiveRf => DeviceModel::InductiveRf { g: req.g, k: req.k, omega1: 0.0, omega2: 0.0 },
                _ => DeviceModel::InductiveDcDetune { g: req.g, k: req.k, omega1: 0.0 },
            };
            let sol = cnot_condition(&model, req.n, m)?;
            let o1 = sol.rabi("omega1").unwrap_or(0.0) * req.g;
            let o2 = sol.rabi("omega2").unwrap_or(0.0) * req.g;
            let solved = model.with_rabi(o1, o2);
            let u = direct_propagate(&solved.tracking_hamiltonian(Envelope::unit()).to_spec(), sol.t_cnot);
            (sol, u)
        }
    };
    let class_residual = canonicalize_weyl(class_vector_from_unitary(&u)).max_abs_diff(ClassVector::CNOT);
    Ok((solution, class_residual))
}

/// Follows the published branch from `k = 0` to `k` in small steps.
fn continue_to(variant: DesignVariant, g: f64, k: f64) -> CliResult<DesignSolution> {
    let steps = (k.abs() / SOLVE_K_STEP).ceil().max(1.0) as usize;
    let ks: Vec<f64> = (0..=steps).map(|i| k * i as f64 / steps as f64).collect();
    let scan = continuation_scan(variant, g, &ks, None);
    if let Some(gap) = scan.gaps.iter().find(|gap| gap.k == k) {
        return Err(CliError::Numerical(format!("no design found at k = {k}: {}", gap.reason)));
    }
    scan.solutions
        .into_iter()
        .last()
        .filter(|s| s.k == k)
        .ok_or_else(|| CliError::Numerical(format!("continuation did not reach k = {k}")))
}

#[derive(Serialize)]
struct SolveJson<'a> {
    #[serde(flatten)]
    solution: &'a DesignSolution,
    class_residual: f64,
}

pub fn write_solve(out: &mut dyn Write, sol: &DesignSolution, class_residual: f64, json: bool) -> CliResult<()> {
    if json {
        return write_json(out, &SolveJson { solution: sol, class_residual });
    }
    let mut text = format!(
        "model: {}\ng: {}\nk: {}\nt_CNOT: {} (π/2g) = {}\n",
        sol.model,
        sig(sol.g, 12),
        sig(sol.k, 12),
        sig(sol.t_half_pi, 7),
        sig(sol.t_cnot, 12)
    );
    for r in &sol.rabi {
        text.push_str(&format!("{}/g: {}\n", r.name, sig(r.over_g, 7)));
    }
    text.push_str(&format!("eta: {}\n", sig(sol.eta, 5)));
    text.push_str(&format!("invariant residual: {:.3e}\nclass residual: {:.3e}\n", sol.residual, class_residual));
    let c = sol.constraints;
    text.push_str(&format!(
        "constraints: |Ω| ≤ g {}, η ≥ 2.5 {}, |k| < 0.5 {}\n",
        yes_no(c.rabi_within_g),
        yes_no(c.efficiency_ok),
        yes_no(c.anisotropy_ok)
    ));
    emit(out, &text)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

/// Regenerates a table as CSV. With `diff`, mismatches against the published
/// values are listed on `err` and reported as an error.
pub fn table(out: &mut dyn Write, err: &mut dyn Write, number: u32, diff: bool) -> CliResult<()> {
    let id = TableId::from_number(number)?;
    let rows = regenerate(id)?;
    {
        let mut w = csv::Writer::from_writer(&mut *out);
        let io = |e: csv::Error| CliError::parse(format!("writing CSV: {e}"));
        w.write_record(id.columns()).map_err(io)?;
        for r in &rows {
            w.write_record(r.cells.iter().map(|v| csv_num(*v))).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::parse(format!("writing CSV: {e}")))?;
    }
    if diff {
        let mismatches = diff_against_golden(id, &rows);
        if !mismatches.is_empty() {
            for m in &mismatches {
                let line = format!(
                    "row {} {}: computed {} expected {} (tolerance {})\n",
                    m.row + 1,
                    m.column,
                    sig(m.computed, 8),
                    sig(m.expected, 8),
                    m.tolerance
                );
                emit(err, &line)?;
            }
            return Err(CliError::Mismatch(format!("table {number}: {} cells outside tolerance", mismatches.len())));
        }
        emit(err, &format!("table {number}: all {} rows match\n", rows.len()))?;
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::parse(e.to_string()))?;
    emit(out, &(text + "\n"))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<output>".into(), source })
}
