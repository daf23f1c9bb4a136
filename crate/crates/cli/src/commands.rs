use std::fmt;
use std::path::PathBuf;

use dirac_atm::config::Tolerances;
use dirac_atm::linear::{
    default_grid, exact_eigen_transcendental, fig2_curve, is_strictly_increasing, refined_crossing,
    solve_atm_levels, REFERENCE_ALPHAS, REFERENCE_ATM, REFERENCE_EXACT,
};
use dirac_atm::nonrel::{cao_quantization, limit_pair, LimitFamily, LIMIT_PARAMETERS};
use dirac_atm::quantization::{endpoint_cauchy_check, solve_levels, ENDPOINT_EXCLUSION};
use dirac_atm::shooting::property_check;
use dirac_atm::turning::Violation;
use dirac_atm::{
    evaluate_quantization, find_eigenvalues, validate_constraints, Error, Potential, RunConfig,
};
use serde_json::{json, Value};

use crate::output::{number, RunHeader, Sink};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Constraint(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Constraint(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Constraint(m) => write!(f, "{m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            e if e.is_constraint_violation() => Failure::Constraint(e.to_string()),
            e => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("writing output: {e}"))
    }
}

pub type Outcome = Result<Vec<Check>, Failure>;

/// One named pass/fail comparison.
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// A configured run: the merged config plus where results go.
pub struct Run {
    pub config: RunConfig,
    pub output_dir: PathBuf,
}

impl Run {
    fn tolerances(&self) -> Tolerances {
        self.config.tolerances
    }

    fn sink(&self, command: &str, args: Value) -> Result<Sink, Failure> {
        let mut config =
            serde_json::from_str::<Value>(&self.config.canonical()).unwrap_or(Value::Null);
        // where the files land is not part of what was computed
        if let Some(run) = config.get_mut("run").and_then(Value::as_object_mut) {
            run.remove("output_dir");
        }
        let effective = json!({
            "command": command,
            "config": config,
            "args": args,
        });
        Ok(Sink::new(
            &self.output_dir,
            RunHeader::new(command, &effective, self.tolerances()),
        )?)
    }

    fn potential(&self) -> Result<Potential, Failure> {
        Ok(self.config.build_potential()?)
    }
}

/// Window `(lo, hi)` holding at least `count` states, grown from the bottom of
/// the well until enough are found or the constraints stop holding.
fn derive_window(pot: &Potential, count: usize) -> Result<(f64, f64), Failure> {
    let lo = 1.0 + pot.minimum().1 + 1e-9;
    let mut span = 1.0;
    let mut last_good = None;
    for _ in 0..12 {
        let window = (lo, lo + span);
        if !validate_constraints(pot, window).passed() {
            return Ok(last_good.unwrap_or(window));
        }
        if find_eigenvalues(pot, window, count)?.len() >= count {
            return Ok(window);
        }
        last_good = Some(window);
        span *= 2.0;
    }
    Ok(last_good.unwrap_or((lo, lo + span)))
}

fn window_for(run: &Run, pot: &Potential, count: usize) -> Result<(f64, f64), Failure> {
    match run.config.run.window {
        Some([lo, hi]) => Ok((lo, hi)),
        None => derive_window(pot, count),
    }
}

fn ensure_constraints(pot: &Potential, window: (f64, f64)) -> Result<(), Failure> {
    let report = validate_constraints(pot, window);
    if report.passed() {
        return Ok(());
    }
    let reason = report
        .violations
        .iter()
        .map(|v| match v {
            Violation::Inadmissible { one_plus_theta_min } => {
                format!(
                    "1 + min potential = {} is negative",
                    number(*one_plus_theta_min)
                )
            }
            Violation::RootCount { epsilon, roots } => {
                format!(
                    "{roots} turning points at epsilon {} (exactly 2 required)",
                    number(*epsilon)
                )
            }
            Violation::NotConfining { epsilon } => {
                format!("epsilon {} is not confined", number(*epsilon))
            }
        })
        .next()
        .unwrap_or_default();
    Err(Failure::Constraint(format!(
        "constraint violation: {reason}"
    )))
}

fn levels(run: &Run) -> Vec<usize> {
    let mut levels = run.config.run.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    levels
}

pub fn eigen(run: &Run) -> Outcome {
    let pot = run.potential()?;
    let levels = levels(run);
    let top = levels.last().copied().unwrap_or(0);
    let window = window_for(run, &pot, top + 1)?;
    ensure_constraints(&pot, window)?;
    let tol = run.tolerances();
    let shot = find_eigenvalues(&pot, window, top + 1)?;
    let solved = solve_levels(&pot, &levels, window)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for s in &solved {
        let oracle = shot.get(s.n).map(|o| o.epsilon);
        let diff = oracle.map(|o| s.epsilon - o);
        let residual = s.report.residual_for(s.n) / std::f64::consts::PI;
        let agrees = diff.is_some_and(|d| d.abs() <= tol.cross_check);
        checks.push(check(
            format!("level {} cross-check", s.n),
            agrees,
            diff.map_or("no shooting state".into(), |d| {
                format!("|diff| = {}", number(d.abs()))
            }),
        ));
        checks.push(check(
            format!("level {} residual", s.n),
            residual.abs() <= tol.residual,
            format!("|total/pi - (n+1)| = {}", number(residual.abs())),
        ));
        rows.push(vec![
            s.n.to_string(),
            number(s.epsilon),
            oracle.map_or(String::new(), number),
            diff.map_or(String::new(), number),
            number(s.report.total_over_pi),
            number(residual),
        ]);
        records.push(json!({
            "n": s.n,
            "epsilon": s.epsilon,
            "shooting_epsilon": oracle,
            "report": s.report,
        }));
    }
    let mut sink = run.sink("eigen", json!({ "levels": levels, "window": window }))?;
    sink.csv(
        "eigen.csv",
        &[
            "n",
            "epsilon",
            "shooting_epsilon",
            "diff",
            "total_over_pi",
            "residual",
        ],
        &rows,
    )?;
    sink.json(
        "eigen.json",
        json!({ "window": [window.0, window.1], "levels": records }),
    )?;
    finish(sink, checks)
}

pub fn verify(run: &Run) -> Outcome {
    let pot = run.potential()?;
    let levels = levels(run);
    let top = levels.last().copied().unwrap_or(0);
    let window = window_for(run, &pot, top + 1)?;
    ensure_constraints(&pot, window)?;
    let tol = run.tolerances();
    let states = find_eigenvalues(&pot, window, top + 1)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for &n in &levels {
        let Some(s) = states.get(n) else {
            checks.push(check(
                format!("level {n}"),
                false,
                "state not found in window",
            ));
            continue;
        };
        let report = evaluate_quantization(&pot, s)?;
        let cauchy = endpoint_cauchy_check(&pot, s, ENDPOINT_EXCLUSION)?;
        let residual = report.residual_for(n) / std::f64::consts::PI;
        checks.push(check(
            format!("level {n} residual"),
            residual.abs() <= tol.residual && s.quantum_number == n,
            format!(
                "|total/pi - (n+1)| = {}, nodes = {}",
                number(residual.abs()),
                s.quantum_number
            ),
        ));
        rows.push(vec![
            n.to_string(),
            number(s.epsilon),
            number(report.wkb_integral),
            number(report.subwave_integral),
            number(report.boundary_jump),
            number(report.total_over_pi),
            number(residual),
            number(cauchy.change),
        ]);
        records.push(json!({ "n": n, "report": report, "cauchy": cauchy }));
    }
    let mut sink = run.sink("verify", json!({ "levels": levels, "window": window }))?;
    sink.csv(
        "verify.csv",
        &[
            "n",
            "epsilon",
            "wkb",
            "subwave",
            "boundary_jump",
            "total_over_pi",
            "residual",
            "cauchy_change",
        ],
        &rows,
    )?;
    sink.json("verify.json", json!({ "states": records }))?;
    finish(sink, checks)
}

fn reference_row(alpha: f64) -> Option<usize> {
    REFERENCE_ALPHAS.iter().position(|&a| a == alpha)
}

pub fn table1(run: &Run, alphas: &[f64], count: usize) -> Outcome {
    let tol = run.tolerances();
    let levels: Vec<usize> = (0..count).collect();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &alpha in alphas {
        let atm = solve_atm_levels(alpha, &levels)?;
        for (&n, &atm_nu) in levels.iter().zip(&atm) {
            let exact = exact_eigen_transcendental(alpha, n)?;
            let reference = reference_row(alpha).filter(|_| n < 5);
            let ref_exact = reference.map(|r| REFERENCE_EXACT[r][n]);
            let ref_atm = reference.map(|r| REFERENCE_ATM[r][n]);
            let diff_exact = ref_exact.map(|p| exact - p);
            let diff_atm = ref_atm.map(|p| atm_nu - p);
            let (passed, detail) = match (diff_exact, diff_atm) {
                (Some(de), Some(da)) => (
                    de.abs() <= tol.reference && da.abs() <= tol.reference,
                    format!(
                        "|diff exact| = {}, |diff atm| = {}",
                        number(de.abs()),
                        number(da.abs())
                    ),
                ),
                _ => {
                    let d = (exact - atm_nu).abs();
                    (d <= tol.reference, format!("|exact - atm| = {}", number(d)))
                }
            };
            checks.push(check(
                format!("alpha {} n {n}", number(alpha)),
                passed,
                detail,
            ));
            let opt = |v: Option<f64>| v.map_or(String::new(), number);
            rows.push(vec![
                number(alpha),
                n.to_string(),
                number(exact),
                number(atm_nu),
                opt(ref_exact),
                opt(ref_atm),
                opt(diff_exact),
                opt(diff_atm),
            ]);
        }
    }
    let mut sink = run.sink("table1", json!({ "alpha": alphas, "levels": count }))?;
    sink.csv(
        "table1.csv",
        &[
            "alpha",
            "n",
            "exact",
            "atm",
            "reference_exact",
            "reference_atm",
            "diff_exact",
            "diff_atm",
        ],
        &rows,
    )?;
    finish(sink, checks)
}

fn alpha_tag(alpha: f64) -> String {
    format!("{alpha}").replace('.', "p")
}

pub fn fig2(run: &Run, alphas: &[f64]) -> Outcome {
    let tol = run.tolerances();
    let mut sink = run.sink("fig2", json!({ "alpha": alphas }))?;
    let mut checks = Vec::new();
    for &alpha in alphas {
        let curve = fig2_curve(alpha, &default_grid(alpha))?;
        checks.push(check(
            format!("alpha {} monotone", number(alpha)),
            is_strictly_increasing(&curve),
            "",
        ));
        let top = curve.last().map_or(0.0, |p| p.i_over_pi).floor() as usize;
        for height in 1..=top {
            let nu = refined_crossing(alpha, &curve, height as f64)?;
            let exact = exact_eigen_transcendental(alpha, height - 1)?;
            let d = (nu - exact).abs();
            checks.push(check(
                format!("alpha {} crossing {height}", number(alpha)),
                d <= tol.reference,
                format!("nu = {}, |nu - exact| = {}", number(nu), number(d)),
            ));
        }
        let rows: Vec<Vec<String>> = curve
            .iter()
            .map(|p| vec![number(p.nu), number(p.i_over_pi)])
            .collect();
        sink.csv(
            &format!("fig2_alpha{}.csv", alpha_tag(alpha)),
            &["nu", "i_over_pi"],
            &rows,
        )?;
    }
    finish(sink, checks)
}

/// Largest relative Dirac-Schrödinger gap accepted at the smallest parameter.
const FINAL_GAP: f64 = 1e-3;

pub fn limits(run: &Run, families: &[LimitFamily], n: usize) -> Outcome {
    let tol = run.tolerances();
    let mut sink = run.sink("limits", json!({ "families": families, "n": n }))?;
    let mut checks = Vec::new();
    for &family in families {
        let mut rows = Vec::new();
        let mut gaps = Vec::new();
        for r in LIMIT_PARAMETERS {
            let (dirac, schr) = limit_pair(family, r, n)?;
            let cao = cao_quantization(&schr.problem().potential, 1.0, &schr)?;
            let shift = dirac.epsilon - 1.0;
            let e = schr.shifted_energy;
            let gap = ((shift - e) / e).abs();
            let cao_residual = cao.total_over_pi - (n + 1) as f64;
            checks.push(check(
                format!("{family:?} r {} Cao", number(r)),
                cao_residual.abs() <= tol.residual,
                format!("|total/pi - (n+1)| = {}", number(cao_residual.abs())),
            ));
            gaps.push(gap);
            rows.push(vec![
                number(r),
                number(shift),
                number(e),
                number(gap),
                number(cao.total_over_pi),
            ]);
        }
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let listed: Vec<String> = gaps.iter().map(|g| number(*g)).collect();
        checks.push(check(
            format!("{family:?} gap decreasing"),
            decreasing,
            listed.join(" "),
        ));
        let last = gaps.last().copied().unwrap_or(f64::NAN);
        checks.push(check(
            format!("{family:?} final gap"),
            last < FINAL_GAP,
            format!("{} against {}", number(last), number(FINAL_GAP)),
        ));
        let name = format!("limits_{}.csv", format!("{family:?}").to_lowercase());
        sink.csv(
            &name,
            &[
                "parameter",
                "dirac_shift",
                "schrodinger",
                "gap",
                "cao_total_over_pi",
            ],
            &rows,
        )?;
    }
    finish(sink, checks)
}

pub fn props(run: &Run) -> Outcome {
    let pot = run.potential()?;
    let window = match run.config.run.window {
        Some([lo, hi]) => (lo, hi),
        None => derive_window(&pot, 8)?,
    };
    ensure_constraints(&pot, window)?;
    let states = find_eigenvalues(&pot, window, 64)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for s in &states {
        let report = property_check(s);
        let cauchy = endpoint_cauchy_check(&pot, s, ENDPOINT_EXCLUSION)?;
        let violations = report.violations();
        checks.push(check(
            format!("state {}", s.quantum_number),
            violations.is_empty(),
            if violations.is_empty() {
                "no violations".into()
            } else {
                violations.join("; ")
            },
        ));
        let opt = |v: Option<f64>| v.map_or(String::new(), number);
        rows.push(vec![
            s.quantum_number.to_string(),
            number(s.epsilon),
            opt(report.p_left),
            opt(report.p_right),
            number(report.joint_floor),
            report.forbidden_nodes.to_string(),
            report.interlace.passed().to_string(),
            number(cauchy.change),
        ]);
        records.push(json!({ "n": s.quantum_number, "report": report, "cauchy": cauchy }));
    }
    if states.is_empty() {
        checks.push(check("states", false, "no bound states in window"));
    }
    let mut sink = run.sink("props", json!({ "window": window }))?;
    sink.csv(
        "props.csv",
        &[
            "n",
            "epsilon",
            "p_left",
            "p_right",
            "joint_floor",
            "forbidden_nodes",
            "interlace",
            "cauchy_change",
        ],
        &rows,
    )?;
    sink.json(
        "props.json",
        json!({ "window": [window.0, window.1], "states": records }),
    )?;
    finish(sink, checks)
}

fn finish(sink: Sink, checks: Vec<Check>) -> Outcome {
    for path in &sink.written {
        println!("wrote {}", path.display());
    }
    Ok(checks)
}
