//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! its measured error and runtime; the test fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::{Duration, Instant};

use nalgebra::{Complex, SMatrix};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weylsteer_core::cartan::{assemble_cnot, canonical_cnot, class_vector_from_unitary, local_invariants, LocalInvariants};
use weylsteer_core::design::DesignVariant;
use weylsteer_core::envelope::Envelope;
use weylsteer_core::lie::{commutator, generator_matrix, ClassVector, Frame, GeneratorLabel};
use weylsteer_core::qmat::{expm_hermitian, fidelity, pauli_pair, Axis, CMat2, CMat4, HermitianGenerator, UnitaryMatrix};
use weylsteer_core::steer::state::{apply_matrix, system_ordering};
use weylsteer_core::steer::{
    coefficient_matrix, direct_propagate, integrate, propagate_sliced, rhs_full, AnsatzKind, ControlVector, HamiltonianSpec,
    SteeringState,
};
use weylsteer_core::tables::{diff_against_golden, regenerate, TableId, TableRow};
use weylsteer_core::tracking::{analytic_series, rabi_for_axis_point, DeviceModel};
use weylsteer_core::{canonicalize_weyl, DesignModel};

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn run(id: u32, name: &'static str, budget: Option<u64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let budget = budget.map(Duration::from_secs);
    let in_time = budget.map_or(true, |b| elapsed <= b);
    Outcome { id, name, pass: ok && in_time, detail, elapsed, budget }
}

fn random_hermitian(rng: &mut StdRng, scale: f64) -> HermitianGenerator {
    let a = CMat4::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianGenerator::new((a + a.adjoint()).scale(0.5 * scale)).unwrap()
}

fn random_unitary(rng: &mut StdRng) -> UnitaryMatrix {
    expm_hermitian(&random_hermitian(rng, 2.0), 1.0)
}

fn random_su2(rng: &mut StdRng) -> CMat2 {
    let (a, b, c): (f64, f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let n = (a * a + b * b + c * c).sqrt();
    let (s, co) = (n.sin() / n, n.cos());
    let i = Complex64::i();
    CMat2::new(
        Complex64::new(co, 0.0) - i * (c * s),
        -i * (a * s) - Complex64::new(b * s, 0.0),
        -i * (a * s) + Complex64::new(b * s, 0.0),
        Complex64::new(co, 0.0) + i * (c * s),
    )
}

/// `min_φ max|U − e^{iφ}V|` with the optimal phase taken from `tr(V†U)`.
fn phase_distance(u: &UnitaryMatrix, v: &UnitaryMatrix) -> f64 {
    let tr = (v.matrix().adjoint() * u.matrix()).trace();
    v.phase(tr.arg()).distance(u)
}

fn max_cell_error(table: TableId, rows: &[TableRow]) -> f64 {
    rows.iter()
        .zip(table.golden())
        .flat_map(|(r, g)| r.cells.iter().zip(g).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

fn table_criterion(table: TableId) -> (bool, String) {
    match regenerate(table) {
        Ok(rows) => {
            let diffs = diff_against_golden(table, &rows);
            let detail = format!("{} rows, max cell error {:.2e}, {} mismatches", rows.len(), max_cell_error(table, &rows), diffs.len());
            (diffs.is_empty() && rows.len() == 17, detail)
        }
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_5() -> (bool, String) {
    let mut worst_inv: f64 = 0.0;
    let mut worst_class: f64 = 0.0;
    let mut count = 0;
    for table in [TableId::DcDetune, TableId::Symmetric, TableId::Asymmetric] {
        let rows = match regenerate(table) {
            Ok(r) => r,
            Err(e) => return (false, e.to_string()),
        };
        for row in rows {
            let s = &row.solution;
            let u = if table == TableId::DcDetune {
                let model = DeviceModel::InductiveDcDetune { g: s.g, k: s.k, omega1: s.rabi("omega1").unwrap() * s.g };
                direct_propagate(&model.tracking_hamiltonian(Envelope::unit()).to_spec(), s.t_cnot)
            } else {
                let variant = if table == TableId::Symmetric { DesignVariant::SymDcMinus } else { DesignVariant::AsymDcMinus };
                weylsteer_core::design::design_unitary(&DesignModel::new(variant, s.g, s.k), &s.params())
            };
            worst_inv = worst_inv.max(local_invariants(&u).distance(&LocalInvariants::CNOT));
            worst_class = worst_class.max(class_vector_from_unitary(&u).max_abs_diff(ClassVector::CNOT));
            count += 1;
        }
    }
    // The inductive-rf inline point as well.
    let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.1, FRAC_PI_2, 1, 1).unwrap();
    let model = DeviceModel::InductiveRf { g: 1.0, k: 0.1, omega1: o1, omega2: o2 };
    let u = direct_propagate(&model.tracking_hamiltonian(Envelope::unit()).to_spec(), model.cnot_area());
    worst_inv = worst_inv.max(local_invariants(&u).distance(&LocalInvariants::CNOT));
    worst_class = worst_class.max(class_vector_from_unitary(&u).max_abs_diff(ClassVector::CNOT));
    count += 1;
    (
        worst_inv < 1e-6 && worst_class < 1e-6,
        format!("{count} gates, invariant error {worst_inv:.2e}, class error {worst_class:.2e}"),
    )
}

fn criterion_6() -> (bool, String) {
    let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.1, FRAC_PI_2, 1, 1).unwrap();
    let models = [
        DeviceModel::CapacitiveRf { g: 1.0, omega1: 15f64.sqrt() },
        DeviceModel::InductiveRf { g: 1.0, k: 0.1, omega1: o1, omega2: o2 },
        DeviceModel::InductiveDcDetune { g: 1.0, k: 0.1, omega1: 0.44f64.sqrt() },
    ];
    let mut worst_state: f64 = 0.0;
    let mut worst_recon: f64 = 0.0;
    for model in models {
        let area = model.cnot_area();
        for (gamma, t_end) in [(Envelope::unit(), area), (Envelope::sin2(2.0 * area), 2.0 * area)] {
            let h = model.tracking_hamiltonian(gamma);
            let traj = match integrate(&h.to_spec(), AnsatzKind::TrackingSymmetric, t_end, 200) {
                Ok(t) => t,
                Err(e) => return (false, format!("{}: {e}", model.name())),
            };
            let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
            let analytic = match analytic_series(&h, &times) {
                Ok(a) => a,
                Err(e) => return (false, format!("{}: {e}", model.name())),
            };
            for (s, a) in traj.samples.iter().zip(&analytic) {
                worst_state = worst_state.max(s.state.max_abs_diff(*a));
                let direct = direct_propagate(&h.to_spec(), s.t);
                worst_recon = worst_recon.max(1.0 - fidelity(&a.reconstruct(model.frame()), &direct));
                worst_recon = worst_recon.max(1.0 - s.recon_fidelity);
            }
        }
    }
    (
        worst_state < 1e-8 && worst_recon <= 1e-8,
        format!("max state difference {worst_state:.2e}, max infidelity {worst_recon:.2e}"),
    )
}

fn criterion_7() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for a in GeneratorLabel::ALL {
        for b in GeneratorLabel::ALL {
            let (ma, mb) = (generator_matrix(a), generator_matrix(b));
            let brute = ma * mb - mb * ma;
            let table = commutator(a, b).to_matrix(Frame::X);
            worst = worst.max((brute - table).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    (worst <= 1e-14, format!("49 pairs, max deviation {worst:.2e}"))
}

fn criterion_8() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst_det: f64 = 0.0;
    let mut worst_fwd: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..1000 {
        let mut r = || rng.gen_range(-3.2..3.2);
        let s = SteeringState { alpha: r(), beta: r(), c1: r(), c2: r(), c3: r(), zeta: r(), xi: r() };
        let m = coefficient_matrix(&s);
        let mm = SMatrix::<f64, 7, 7>::from_fn(|i, j| m[i][j]);
        let d = mm.determinant();
        let expected = s.c2.cos().powi(2) - s.c3.cos().powi(2);
        worst_det = worst_det.max((d - expected).abs());
        if expected.abs() > 0.05 {
            let u = ControlVector {
                omega_1x: r(),
                omega_2x: r(),
                g_xx: r(),
                g_yy: r(),
                g_zz: r(),
                g_yz: r(),
                g_zy: r(),
            };
            let dot = rhs_full(&s, &u, 0.0).unwrap();
            let back = apply_matrix(&m, &system_ordering(&dot));
            let err = back.iter().zip(u.system_vector()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst_fwd = worst_fwd.max(err);
            checked += 1;
        }
    }
    (
        worst_det <= 1e-13 && worst_fwd <= 1e-10,
        format!("det error {worst_det:.2e} over 1000 states, forward error {worst_fwd:.2e} over {checked}"),
    )
}

fn criterion_9() -> (bool, String) {
    let g = 1.0;
    let h = pauli_pair(Axis::X, Axis::X).scale(0.5 * g);
    let u = expm_hermitian(&h, FRAC_PI_2 / g);
    let s = FRAC_PI_4.cos();
    let mut expected = CMat4::identity().scale(s);
    let xx = pauli_pair(Axis::X, Axis::X);
    expected -= xx.matrix() * Complex::new(0.0, s);
    let e_matrix = (u.matrix() - expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let e_class = class_vector_from_unitary(&u).max_abs_diff(ClassVector::CNOT);
    let e_cnot = match assemble_cnot(&u) {
        Ok(c) => c.distance(&canonical_cnot()),
        Err(_) => f64::INFINITY,
    };
    (
        e_matrix <= 1e-12 && e_class <= 1e-10 && e_cnot <= 1e-10,
        format!("matrix {e_matrix:.2e}, class {e_class:.2e}, assembled CNOT {e_cnot:.2e}"),
    )
}

fn criterion_10() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst_inv: f64 = 0.0;
    let mut worst_class: f64 = 0.0;
    for _ in 0..1000 {
        let u = random_unitary(&mut rng);
        let left = UnitaryMatrix::local(&random_su2(&mut rng), &random_su2(&mut rng)).unwrap();
        let right = UnitaryMatrix::local(&random_su2(&mut rng), &random_su2(&mut rng)).unwrap();
        let v = &(&left * &u) * &right;
        worst_inv = worst_inv.max(local_invariants(&u).distance(&local_invariants(&v)));
        let (cu, cv) = (class_vector_from_unitary(&u), class_vector_from_unitary(&v));
        worst_class = worst_class.max(canonicalize_weyl(cu).max_abs_diff(canonicalize_weyl(cv)));
    }
    (
        worst_inv <= 1e-10 && worst_class <= 1e-8,
        format!("1000 trials, invariant change {worst_inv:.2e}, class change {worst_class:.2e}"),
    )
}

fn smooth(rng: &mut StdRng, base: f64, amp: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    let (a, w, p) = (rng.gen_range(-amp..amp), rng.gen_range(0.5..2.5), rng.gen_range(0.0..6.28));
    let b = base + rng.gen_range(-0.1..0.1);
    move |t: f64| b + a * (w * t + p).sin()
}

fn criterion_11() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut worst_distance: f64 = 0.0;
    let trials = 5;
    for ansatz in [AnsatzKind::Case1, AnsatzKind::Case2SymDetune, AnsatzKind::Case3] {
        for _ in 0..trials {
            let o1 = smooth(&mut rng, 0.8, 0.3);
            let o2 = smooth(&mut rng, 0.4, 0.2);
            let gx = smooth(&mut rng, 1.0, 0.2);
            let gy = smooth(&mut rng, 0.5, 0.15);
            let gz = smooth(&mut rng, 0.2, 0.1);
            let h = HamiltonianSpec::general(Frame::X, move |t| {
                let mut u = ControlVector { omega_1x: o1(t), g_xx: gx(t), g_yy: gy(t), ..Default::default() };
                match ansatz {
                    AnsatzKind::Case1 => {}
                    AnsatzKind::Case2SymDetune => {
                        u.omega_2x = -u.omega_1x;
                        u.g_zz = gz(t);
                    }
                    _ => {
                        u.omega_2x = o2(t);
                        u.g_zz = u.g_yy;
                    }
                }
                u
            });
            let t_end = 1.2;
            let traj = match integrate(&h, ansatz, t_end, 40) {
                Ok(t) => t,
                Err(e) => return (false, format!("{}: {e}", ansatz.name())),
            };
            let end = traj.last().unwrap();
            let oracle = propagate_sliced(&h, t_end, 1000);
            let recon = end.state.reconstruct(Frame::X);
            worst_oracle = worst_oracle.max(1.0 - fidelity(&recon, &oracle));
            worst_distance = worst_distance.max(phase_distance(&recon, &oracle));
            worst = worst.max(traj.worst_infidelity());
        }
    }
    (
        worst <= 1e-7 && worst_oracle <= 1e-7,
        format!(
            "{} runs, max infidelity {worst:.2e} (Magnus), {worst_oracle:.2e} (1000 slices, matrix distance {worst_distance:.2e})",
            3 * trials
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        run(1, "dc-detune table", Some(1), || table_criterion(TableId::DcDetune)),
        run(2, "inductive-rf inline Rabi values", Some(1), || {
            let (o1, o2) = rabi_for_axis_point(1.0, 1.0, 0.1, FRAC_PI_2, 1, 1).unwrap();
            let err = (o1 - 3.8716).abs().max((o2 - 0.0258).abs());
            (err < 5e-5, format!("Ω1 = {o1:.6}, Ω2 = {o2:.6}"))
        }),
        run(3, "symmetric design table", Some(60), || table_criterion(TableId::Symmetric)),
        run(4, "asymmetric design table", Some(60), || table_criterion(TableId::Asymmetric)),
        run(5, "CNOT-class landing", None, criterion_5),
        run(6, "analytic / ODE / propagator agreement", Some(30), criterion_6),
        run(7, "commutator table", None, criterion_7),
        run(8, "coefficient determinant and forward check", None, criterion_8),
        run(9, "XX entangler anchor", None, criterion_9),
        run(10, "local invariance", None, criterion_10),
        run(11, "reduced ansatz reconstruction", Some(60), criterion_11),
    ];
    for o in &outcomes {
        let budget = o.budget.map(|b| format!(" (budget {}s)", b.as_secs())).unwrap_or_default();
        println!(
            "{} criterion {:>2} {}: {} [{:.3}s{}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail,
            o.elapsed.as_secs_f64(),
            budget
        );
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
