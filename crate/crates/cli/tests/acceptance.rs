//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use bhclone::bell::{chsh_max_numeric, correlation_data, horodecki, u_eigenvalues_closed_form};
use bhclone::linalg::{hermitian_eigenvalues, BellState, ComplexMatrix, TwoQubitState};
use bhclone::machine::{build_two_clone_state, clone_fidelity, validate_machine, InputState};
use bhclone::separability::{
    case_iib_bounds, ppt_entangled, w3_closed_form, w3_w4_from_matrix, w4_closed_form,
};
use bhclone::sweep::{linspace, locate_boundary, BoundaryCriterion};
use bhclone::teleport::{
    fidelity_max, simulate_protocol_exact, simulate_protocol_mc, CLASSICAL_LIMIT,
};
use bhclone::{tolerance, MachineParameter};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const GRID: usize = 129;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn point(xi: f64, alpha2: f64) -> (MachineParameter, InputState) {
    (
        validate_machine(xi).expect("xi in range"),
        InputState::from_alpha2(alpha2).expect("alpha2 in range"),
    )
}

fn state(xi: f64, alpha2: f64) -> TwoQubitState {
    let (m, s) = point(xi, alpha2);
    build_two_clone_state(m, s)
}

fn full_grid() -> Vec<(f64, f64)> {
    let xs = linspace(1.0 / 6.0, 0.5, GRID);
    let ys = linspace(0.0, 1.0, GRID);
    xs.iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect()
}

fn entanglement_region_equivalence() -> Check {
    let mut compared = 0;
    let mut skipped = 0;
    let mut genuine = Vec::new();
    for (xi, a2) in full_grid() {
        let (m, s) = point(xi, a2);
        let w3 = w3_closed_form(m, s);
        let w4 = w4_closed_form(m, s);
        let by_determinants = w3 < -tolerance::SIGN || w4 < -tolerance::SIGN;
        let oracle = ppt_entangled(&build_two_clone_state(m, s));
        let statistic = w3.min(w4);
        if statistic.abs() <= tolerance::BOUNDARY_BAND
            || oracle.min_pt_eigenvalue.abs() <= tolerance::BOUNDARY_BAND
        {
            skipped += 1;
            continue;
        }
        compared += 1;
        if by_determinants != oracle.entangled {
            genuine.push((xi, a2));
        }
    }
    ensure(genuine.is_empty(), || {
        format!(
            "{} genuine disagreements, first at {:?}",
            genuine.len(),
            genuine[0]
        )
    })?;
    Ok(format!(
        "{compared} cells compared, {skipped} inside the 1e-8 band, 0 disagreements"
    ))
}

fn case_i_inseparable() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for xi in [1.0 / 6.0, 0.5] {
        for a2 in linspace(0.0, 1.0, 101) {
            let (m, s) = point(xi, a2);
            let w4 = w4_closed_form(m, s);
            let (_, w4_matrix) = w3_w4_from_matrix(&build_two_clone_state(m, s));
            ensure(w4 < 0.0 && w4_matrix < 0.0, || {
                format!("W4 = {w4} (matrix {w4_matrix}) at xi = {xi}, alpha2 = {a2}")
            })?;
            worst = worst.max(w4).max(w4_matrix);
        }
    }
    Ok(format!("202 points, largest W4 = {worst:.6e}"))
}

fn boundary(criterion: BoundaryCriterion) -> Check {
    let (lo, hi) = criterion.default_bracket();
    let b = locate_boundary(criterion, lo, hi, 1e-12).map_err(|e| e.to_string())?;
    ensure(b.residual < 1e-9, || {
        format!(
            "xi* = {:.12} vs {:.12}, residual {:.3e}",
            b.xi_star, b.target, b.residual
        )
    })?;
    Ok(format!(
        "xi* = {:.12}, residual {:.3e}",
        b.xi_star, b.residual
    ))
}

fn chsh_threshold() -> Check {
    boundary(BoundaryCriterion::ChshViolation)
}

fn teleport_threshold() -> Check {
    let located = boundary(BoundaryCriterion::TeleportUseful)?;
    let mut worst: f64 = 0.0;
    for xi in linspace(0.25, 0.5, 25) {
        for a2 in [0.0, 0.3, 0.5, 1.0] {
            let f = fidelity_max(&state(xi, a2)).f_max;
            worst = worst.max((f - (1.0 + 4.0 * xi) / 3.0).abs());
        }
    }
    for xi in linspace(1.0 / 6.0, 0.25, 25) {
        for a2 in [0.0, 0.3, 0.5, 1.0] {
            let f = fidelity_max(&state(xi, a2)).f_max;
            worst = worst.max((f - CLASSICAL_LIMIT).abs());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("f_max closed-form error {worst:.3e}")
    })?;
    Ok(format!("{located}; f_max closed-form error {worst:.3e}"))
}

fn maximal_point() -> Check {
    let mut details = Vec::new();
    for a2 in [0.0, 0.5, 0.8, 1.0] {
        let rho = state(0.5, a2);
        let eig = rho.eigenvalues();
        let top = eig[3];
        ensure((top - 1.0).abs() <= 1e-12, || {
            format!("largest eigenvalue {top} at alpha2 = {a2}")
        })?;
        let psi_plus = TwoQubitState::bell(BellState::PsiPlus);
        let gap = rho.matrix().max_abs_diff(psi_plus.matrix());
        ensure(gap <= 1e-12, || {
            format!("distance to Psi+ {gap:.3e} at alpha2 = {a2}")
        })?;
        let m = horodecki(&rho).m_value;
        ensure((m - 2.0).abs() <= 1e-12, || {
            format!("M = {m} at alpha2 = {a2}")
        })?;
        let f = fidelity_max(&rho).f_max;
        ensure((f - 1.0).abs() <= 1e-12, || {
            format!("f_max = {f} at alpha2 = {a2}")
        })?;
        let p = simulate_protocol_exact(&rho).f_protocol;
        ensure((p - 1.0).abs() <= 1e-12, || {
            format!("protocol fidelity {p} at alpha2 = {a2}")
        })?;
        details.push(gap);
    }
    Ok(format!(
        "pure Psi+ for all tested alpha2, max deviation {:.3e}",
        details.iter().copied().fold(0.0, f64::max)
    ))
}

fn horodecki_oracle() -> Check {
    let xis = [
        1.0 / 6.0,
        0.2,
        0.25,
        0.3,
        1.0 / (2.0 * 2f64.sqrt()),
        0.4,
        0.5,
    ];
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst: f64 = 0.0;
    for xi in xis {
        for a2 in alphas {
            let rho = state(xi, a2);
            let numeric = chsh_max_numeric(&rho, 1e-8)
                .map_err(|e| e.to_string())?
                .value;
            let analytic = horodecki(&rho).chsh_analytic();
            let d = (numeric - analytic).abs();
            ensure(d <= 1e-5, || {
                format!("numeric {numeric} vs 2 sqrt M {analytic} at ({xi}, {a2})")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "35 points, largest |numeric - 2 sqrt M| = {worst:.3e}"
    ))
}

fn protocol_agreement() -> Check {
    let mut worst: f64 = 0.0;
    for xi in linspace(0.25, 0.5, 26) {
        for a2 in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let rho = state(xi, a2);
            let exact = simulate_protocol_exact(&rho).f_protocol;
            let d = (exact - fidelity_max(&rho).f_max).abs();
            ensure(d <= 1e-12, || {
                format!("exact {exact} differs by {d:.3e} at ({xi}, {a2})")
            })?;
            worst = worst.max(d);
        }
    }
    let rho = state(0.3, 0.5);
    let exact = simulate_protocol_exact(&rho).f_protocol;
    let mut worst_z: f64 = 0.0;
    for seed in 1..=20 {
        let mc = simulate_protocol_mc(&rho, 100_000, seed).map_err(|e| e.to_string())?;
        let z = (mc.mean - exact).abs() / mc.std_error;
        ensure((mc.mean - exact).abs() <= 3.0 * mc.std_error, || {
            format!(
                "seed {seed}: {} is {z:.2} standard errors from {exact}",
                mc.mean
            )
        })?;
        worst_z = worst_z.max(z);
    }
    Ok(format!(
        "exact vs f_max error {worst:.3e}; Monte Carlo worst |z| = {worst_z:.2} over 20 seeds"
    ))
}

fn closed_form_consistency() -> Check {
    let mut worst_u: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for (xi, a2) in full_grid() {
        let (m, s) = point(xi, a2);
        let rho = build_two_clone_state(m, s);
        let corr = correlation_data(&rho);
        let u = ComplexMatrix::from_real_rows(&corr.u_matrix()).map_err(|e| e.to_string())?;
        let solved = hermitian_eigenvalues(&u).map_err(|e| e.to_string())?;
        for (a, b) in solved.iter().zip(u_eigenvalues_closed_form(m)) {
            worst_u = worst_u.max((a - b).abs());
        }
        let (w3, w4) = w3_w4_from_matrix(&rho);
        worst_w = worst_w
            .max((w3 - w3_closed_form(m, s)).abs())
            .max((w4 - w4_closed_form(m, s)).abs());
    }
    ensure(worst_u <= 1e-10, || {
        format!("u eigenvalue error {worst_u:.3e}")
    })?;
    ensure(worst_w <= 1e-12, || format!("W3/W4 error {worst_w:.3e}"))?;
    Ok(format!("u error {worst_u:.3e}, W3/W4 error {worst_w:.3e}"))
}

fn clone_fidelity_check() -> Check {
    let mut worst: f64 = 0.0;
    for (xi, a2) in full_grid() {
        let (m, s) = point(xi, a2);
        worst = worst.max((clone_fidelity(m, s) - (1.0 - xi)).abs());
    }
    ensure(worst <= 1e-12, || {
        format!("largest |F - (1 - xi)| = {worst:.3e}")
    })?;
    for a2 in linspace(0.0, 1.0, 11) {
        let (m, s) = point(1.0 / 6.0, a2);
        let f = clone_fidelity(m, s);
        ensure((f - 5.0 / 6.0).abs() <= 1e-12, || {
            format!("F = {f} at xi = 1/6, alpha2 = {a2}")
        })?;
    }
    Ok(format!(
        "largest |F - (1 - xi)| = {worst:.3e}; 5/6 at xi = 1/6"
    ))
}

fn state_validity() -> Check {
    let psi_minus = BellState::PsiMinus.amplitudes();
    let (mut tr, mut herm, mut min_eig, mut singlet) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for (xi, a2) in full_grid() {
        let rho = state(xi, a2);
        let m = rho.matrix();
        tr = tr.max((m.trace() - 1.0).norm());
        herm = herm.max(m.hermiticity_defect());
        min_eig = min_eig.min(hermitian_eigenvalues(m).map_err(|e| e.to_string())?[0]);
        singlet = singlet.max(m.expectation(&psi_minus).map_err(|e| e.to_string())?.norm());
    }
    ensure(tr <= 1e-12, || format!("trace error {tr:.3e}"))?;
    ensure(herm <= 1e-12, || format!("Hermiticity defect {herm:.3e}"))?;
    ensure(min_eig >= -1e-10, || {
        format!("min eigenvalue {min_eig:.3e}")
    })?;
    ensure(singlet <= 1e-12, || {
        format!("<Psi-|rho|Psi-> = {singlet:.3e}")
    })?;
    Ok(format!(
        "{} states; trace {tr:.1e}, Hermiticity {herm:.1e}, min eigenvalue {min_eig:.3e}, singlet weight {singlet:.1e}",
        GRID * GRID
    ))
}

fn documented_discrepancies() -> Check {
    let mut failures = Vec::new();

    let at_02 = case_iib_bounds(validate_machine(0.2).unwrap()).map_err(|e| e.to_string())?;
    let gap = at_02.upper_alpha2.map(|u| (at_02.lower_alpha2 - u).abs());
    if !matches!(gap, Some(g) if g < 1e-12) {
        failures.push(format!("xi = 0.2: |lower - upper| = {gap:?}"));
    }

    let at_022 = case_iib_bounds(validate_machine(0.22).unwrap()).map_err(|e| e.to_string())?;
    let upper = at_022.upper_alpha2.unwrap_or(f64::NAN);
    if !at_022.nonempty {
        failures.push("xi = 0.22: interval is empty".into());
    }
    if (at_022.lower_alpha2 - 0.214286).abs() > 1e-6 {
        failures.push(format!(
            "xi = 0.22: lower = {:.8} vs 0.214286",
            at_022.lower_alpha2
        ));
    }
    if upper.is_nan() || (upper - 0.305620).abs() > 1e-6 {
        failures.push(format!(
            "xi = 0.22: upper = {upper:.8} vs 0.305620 (off by {:.2e})",
            (upper - 0.305620).abs()
        ));
    }

    let mut worst_c22: f64 = 0.0;
    for (xi, a2) in full_grid().into_iter().step_by(7) {
        let c22 = correlation_data(&state(xi, a2)).c[1][1];
        worst_c22 = worst_c22.max((c22.abs() - 2.0 * xi).abs());
    }
    if worst_c22 > 1e-12 {
        failures.push(format!("||c22| - 2 xi| = {worst_c22:.3e}"));
    }

    if failures.is_empty() {
        Ok(format!(
            "xi = 0.2 gap {:.1e}; xi = 0.22 bounds ({:.6}, {upper:.6}); c22 error {worst_c22:.1e}",
            gap.unwrap_or_default(),
            at_022.lower_alpha2
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn sweep_determinism() -> Check {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_bhclone"))
            .args(["sweep", "--xi", "1/6:1/2:33", "--alpha2", "0:1:21"])
            .env("BHCLONE_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run("4")?;
    let second = run("4")?;
    let serial = run("1")?;
    for out in [&first, &second, &serial] {
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
    }
    ensure(first.stdout == second.stdout, || "two runs differ".into())?;
    ensure(first.stdout == serial.stdout, || {
        "output depends on the thread count".into()
    })?;
    Ok(format!(
        "{} identical bytes across three runs",
        first.stdout.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "entanglement-region-equivalence",
            entanglement_region_equivalence,
        ),
        ("case-i-inseparable", case_i_inseparable),
        ("chsh-threshold", chsh_threshold),
        ("teleport-threshold", teleport_threshold),
        ("maximal-point", maximal_point),
        ("horodecki-oracle", horodecki_oracle),
        ("protocol-agreement", protocol_agreement),
        ("closed-form-consistency", closed_form_consistency),
        ("clone-fidelity", clone_fidelity_check),
        ("state-validity", state_validity),
        ("documented-discrepancies", documented_discrepancies),
        ("sweep-determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
