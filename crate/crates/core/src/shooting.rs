//! Two-sided shooting oracle for bound states.
//!
//! Decaying solutions are integrated inward from both forbidden regions and
//! matched at the potential minimum. The Prüfer angle mismatch
//! `theta_R - theta_L` at the match point increases with the energy and hits
//! a multiple of pi exactly at eigenvalues.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, PlanarSystem, State, StepControl, Trajectory};
use crate::potential::Potential;
use crate::roots::bisect_secant;
use crate::turning::{find_turning_points, TurningPoints};

/// Decay exponent accumulated between a turning point and the far cutoff.
pub const FAR_FIELD_DECAY: f64 = 40.0;
/// Energy resolution of eigenvalue refinement.
pub const EIGEN_TOL: f64 = 1e-12;
/// Interior samples stored per accepted integration step.
const MESH_SUBDIVISION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A linear planar eigenproblem with confining forbidden regions on both sides.
pub trait BoundStateProblem {
    fn rhs(&self, energy: f64, x: f64, y: State) -> State;
    fn max_step(&self, energy: f64, x: f64) -> f64;
    fn turning_points(&self, energy: f64) -> Result<TurningPoints>;
    /// Local decay rate; zero in the allowed region.
    fn decay_rate(&self, energy: f64, x: f64) -> f64;
    /// State of the solution decaying away from the well on `side`.
    fn decaying_state(&self, energy: f64, x: f64, side: Side) -> State;
    fn match_point(&self) -> f64;
    fn breakpoints(&self) -> Vec<f64>;
    /// Component whose nodes define the quantum number.
    fn node_component(&self, energy: f64) -> usize;
}

/// A problem frozen at one energy.
pub struct AtEnergy<'a, P: ?Sized> {
    pub problem: &'a P,
    pub energy: f64,
}

impl<P: BoundStateProblem + ?Sized> PlanarSystem for AtEnergy<'_, P> {
    fn rhs(&self, x: f64, y: State) -> State {
        self.problem.rhs(self.energy, x, y)
    }

    fn max_step(&self, x: f64) -> f64 {
        self.problem.max_step(self.energy, x)
    }
}

/// `psi1' = (1 + theta + eps) psi2`, `psi2' = (1 + theta - eps) psi1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracProblem {
    pub potential: Potential,
}

impl DiracProblem {
    pub fn new(potential: Potential) -> Self {
        Self { potential }
    }
}

impl BoundStateProblem for DiracProblem {
    fn rhs(&self, eps: f64, x: f64, y: State) -> State {
        let m = 1.0 + self.potential.value(x);
        [(m + eps) * y[1], (m - eps) * y[0]]
    }

    fn max_step(&self, eps: f64, x: f64) -> f64 {
        1.0 / ((1.0 + self.potential.value(x)).abs() + eps.abs())
    }

    fn turning_points(&self, eps: f64) -> Result<TurningPoints> {
        find_turning_points(&self.potential, eps.abs())
    }

    fn decay_rate(&self, eps: f64, x: f64) -> f64 {
        let m = 1.0 + self.potential.value(x);
        ((m - eps.abs()) * (m + eps.abs())).max(0.0).sqrt()
    }

    fn decaying_state(&self, eps: f64, x: f64, side: Side) -> State {
        let m = 1.0 + self.potential.value(x);
        let gamma = self.decay_rate(eps, x);
        match side {
            Side::Left => [1.0, gamma / (m + eps)],
            Side::Right => [1.0, -gamma / (m + eps)],
        }
    }

    fn match_point(&self) -> f64 {
        self.potential.minimum().0
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.potential.breakpoints()
    }

    fn node_component(&self, eps: f64) -> usize {
        if eps < 0.0 {
            1
        } else {
            0
        }
    }
}

/// Far cutoff where the decay exponent measured from the turning point
/// reaches [`FAR_FIELD_DECAY`].
pub fn far_point<P: BoundStateProblem + ?Sized>(
    problem: &P,
    energy: f64,
    tp: TurningPoints,
    side: Side,
) -> f64 {
    let (start, dir) = match side {
        Side::Left => (tp.left, -1.0),
        Side::Right => (tp.right, 1.0),
    };
    let mut h = 1e-3 * tp.width().max(1e-3);
    let mut x = start;
    let mut exponent = 0.0;
    while exponent < FAR_FIELD_DECAY {
        exponent += problem.decay_rate(energy, x + 0.5 * dir * h) * h;
        x += dir * h;
        h *= 1.05;
    }
    x
}

/// Rotation angle from `a` to `b`, in `(-pi, pi]`.
fn rotation(a: State, b: State) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

/// Continuous Prüfer angle `atan2(y2, y1)` at the last node.
fn unwrapped_angle(traj: &Trajectory) -> f64 {
    let mut theta = traj.ys[0][1].atan2(traj.ys[0][0]);
    for w in traj.ys.windows(2) {
        theta += rotation(w[0], w[1]);
    }
    theta
}

/// Left- and right-decaying solutions at a fixed trial energy.
#[derive(Debug, Clone)]
pub struct Shot<P> {
    problem: P,
    pub energy: f64,
    pub turning_points: TurningPoints,
    pub match_point: f64,
    left: Trajectory,
    right: Trajectory,
    right_scale: f64,
    /// `theta_R - theta_L` at the match point.
    pub angle_mismatch: f64,
}

impl<P: BoundStateProblem + Clone> Shot<P> {
    pub fn new(problem: &P, energy: f64, control: StepControl) -> Result<Self> {
        let tp = problem.turning_points(energy)?;
        let xm = problem.match_point();
        let breaks = problem.breakpoints();
        let far_l = far_point(problem, energy, tp, Side::Left);
        let far_r = far_point(problem, energy, tp, Side::Right);
        let sys = AtEnergy { problem, energy };
        let left = integrate(
            &sys,
            far_l,
            xm,
            problem.decaying_state(energy, far_l, Side::Left),
            &breaks,
            control,
        )?;
        let right = integrate(
            &sys,
            far_r,
            xm,
            problem.decaying_state(energy, far_r, Side::Right),
            &breaks,
            control,
        )?;
        let (_, yl) = left.last();
        let (_, yr) = right.last();
        let right_scale = (yl[0] * yr[0] + yl[1] * yr[1]) / (yr[0] * yr[0] + yr[1] * yr[1]);
        let angle_mismatch = unwrapped_angle(&right) - unwrapped_angle(&left);
        Ok(Self {
            problem: problem.clone(),
            energy,
            turning_points: tp,
            match_point: xm,
            left,
            right,
            right_scale,
            angle_mismatch,
        })
    }

    pub fn problem(&self) -> &P {
        &self.problem
    }

    /// `(psi_L x psi_R) / (|psi_L| |psi_R|)` at the match point.
    pub fn mismatch(&self) -> f64 {
        self.angle_mismatch.sin()
    }

    /// Integrated range `(far left, far right)`.
    pub fn range(&self) -> (f64, f64) {
        (self.left.xs[0], self.right.xs[0])
    }

    /// Left branch up to the match point, right branch (scaled to agree in
    /// magnitude there) beyond it.
    pub fn eval(&self, x: f64) -> State {
        let sys = AtEnergy {
            problem: &self.problem,
            energy: self.energy,
        };
        if x <= self.match_point {
            self.left.eval(&sys, x)
        } else {
            let y = self.right.eval(&sys, x);
            [y[0] * self.right_scale, y[1] * self.right_scale]
        }
    }

    /// Samples of the spliced solution, ascending, with interior points
    /// added inside every integration step.
    pub(crate) fn samples(&self) -> (Vec<f64>, Vec<State>) {
        let sys = AtEnergy {
            problem: &self.problem,
            energy: self.energy,
        };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut push_branch = |traj: &Trajectory, scale: f64, reversed: bool| {
            let n = traj.len();
            let order: Vec<usize> = if reversed {
                (0..n).rev().collect()
            } else {
                (0..n).collect()
            };
            for (k, &i) in order.iter().enumerate() {
                if let Some(&last) = xs.last() {
                    if traj.xs[i] <= last {
                        continue;
                    }
                }
                if k > 0 {
                    let (a, b) = (traj.xs[order[k - 1]], traj.xs[i]);
                    for s in 1..MESH_SUBDIVISION {
                        let x = a + (b - a) * s as f64 / MESH_SUBDIVISION as f64;
                        if x > a && x < b {
                            let y = traj.eval(&sys, x);
                            xs.push(x);
                            ys.push([y[0] * scale, y[1] * scale]);
                        }
                    }
                }
                xs.push(traj.xs[i]);
                ys.push([traj.ys[i][0] * scale, traj.ys[i][1] * scale]);
            }
        };
        push_branch(&self.left, 1.0, false);
        push_branch(&self.right, self.right_scale, true);
        (xs, ys)
    }
}

/// Tabulated spinor on a strictly increasing mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorMesh {
    pub nodes: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
    pub epsilon: f64,
    pub node_count_psi1: usize,
    pub node_count_psi2: usize,
}

impl SpinorMesh {
    fn from_samples(
        xs: Vec<f64>,
        ys: &[State],
        epsilon: f64,
        window: Option<TurningPoints>,
    ) -> Self {
        let psi1: Vec<f64> = ys.iter().map(|y| y[0]).collect();
        let psi2: Vec<f64> = ys.iter().map(|y| y[1]).collect();
        let inside = |x: f64| window.is_none_or(|tp| tp.contains(x));
        let node_count_psi1 = sign_changes(&xs, &psi1, inside);
        let node_count_psi2 = sign_changes(&xs, &psi2, inside);
        Self {
            nodes: xs,
            psi1,
            psi2,
            epsilon,
            node_count_psi1,
            node_count_psi2,
        }
    }

    /// `int (psi1^2 + psi2^2)` by the trapezoid rule on the mesh.
    pub fn norm_squared(&self) -> f64 {
        let mut sum = 0.0;
        for i in 1..self.nodes.len() {
            let a = self.psi1[i - 1].powi(2) + self.psi2[i - 1].powi(2);
            let b = self.psi1[i].powi(2) + self.psi2[i].powi(2);
            sum += 0.5 * (a + b) * (self.nodes[i] - self.nodes[i - 1]);
        }
        sum
    }

    pub fn max_amplitude(&self) -> f64 {
        self.psi1
            .iter()
            .chain(&self.psi2)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn scale(&mut self, factor: f64) {
        self.psi1.iter_mut().for_each(|v| *v *= factor);
        self.psi2.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Sign changes of `values` between consecutive samples whose span lies in
/// the window (an exact zero counts once).
pub(crate) fn sign_changes(xs: &[f64], values: &[f64], inside: impl Fn(f64) -> bool) -> usize {
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for (x, &v) in xs.iter().zip(values) {
        if !inside(*x) {
            prev = None;
            continue;
        }
        if v == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if (p > 0.0) != (v > 0.0) {
                count += 1;
            }
        }
        prev = Some(v);
    }
    count
}

/// Integrates the Dirac system at a fixed energy.
pub fn integrate_spinor(
    pot: &Potential,
    epsilon: f64,
    from: f64,
    to: f64,
    initial: State,
) -> Result<SpinorMesh> {
    let problem = DiracProblem::new(pot.clone());
    let sys = AtEnergy {
        problem: &problem,
        energy: epsilon,
    };
    let traj = integrate(
        &sys,
        from,
        to,
        initial,
        &pot.breakpoints(),
        StepControl::default(),
    )?;
    let (mut xs, mut ys) = (traj.xs, traj.ys);
    if from > to {
        xs.reverse();
        ys.reverse();
    }
    Ok(SpinorMesh::from_samples(xs, &ys, epsilon, None))
}

/// Ratio `P = -psi2/psi1` of the decaying branch deep in a forbidden region.
pub fn asymptotic_decaying_ratio(
    pot: &Potential,
    epsilon: f64,
    side: Side,
    xi_far: f64,
) -> Result<f64> {
    let m = 1.0 + pot.value(xi_far);
    if !(m > epsilon.abs()) {
        return Err(Error::Precondition(format!(
            "xi = {xi_far} is not in the forbidden region at epsilon {epsilon}"
        )));
    }
    let y = DiracProblem::new(pot.clone()).decaying_state(epsilon, xi_far, side);
    Ok(-y[1] / y[0])
}

/// A normalized bound state of the Dirac problem.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub epsilon: f64,
    pub quantum_number: usize,
    pub turning_points: TurningPoints,
    pub mesh: SpinorMesh,
    shot: Shot<DiracProblem>,
    norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioValue {
    Finite(f64),
    Pole,
}

impl RatioValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            RatioValue::Finite(p) => Some(p),
            RatioValue::Pole => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct SolutionHeader {
    epsilon: f64,
    quantum_number: usize,
    turning_points: TurningPoints,
}

impl EigenSolution {
    fn from_shot(shot: Shot<DiracProblem>) -> Self {
        let (xs, ys) = shot.samples();
        let mut mesh = SpinorMesh::from_samples(xs, &ys, shot.energy, Some(shot.turning_points));
        let norm = mesh.norm_squared().sqrt();
        mesh.scale(1.0 / norm);
        let quantum_number = if shot.energy < 0.0 {
            mesh.node_count_psi2
        } else {
            mesh.node_count_psi1
        };
        Self {
            epsilon: shot.energy,
            quantum_number,
            turning_points: shot.turning_points,
            mesh,
            shot,
            norm,
        }
    }

    pub fn potential(&self) -> &Potential {
        &self.shot.problem().potential
    }

    /// Normalized spinor at `xi`, from the integrator rather than the mesh.
    pub fn spinor(&self, xi: f64) -> State {
        let y = self.shot.eval(xi);
        [y[0] / self.norm, y[1] / self.norm]
    }

    pub fn match_point(&self) -> f64 {
        self.shot.match_point
    }

    /// `P = -psi2/psi1`, a pole marker where `psi1` vanishes.
    pub fn ratio(&self, xi: f64) -> RatioValue {
        let y = self.spinor(xi);
        if y[0] == 0.0 {
            RatioValue::Pole
        } else {
            RatioValue::Finite(-y[1] / y[0])
        }
    }

    /// Zeros of one component strictly between the turning points.
    pub fn nodes(&self, component: usize) -> Vec<f64> {
        let tp = self.turning_points;
        let values = if component == 0 {
            &self.mesh.psi1
        } else {
            &self.mesh.psi2
        };
        let xs = &self.mesh.nodes;
        let mut out = Vec::new();
        for i in 1..xs.len() {
            let (a, b) = (xs[i - 1], xs[i]);
            if b <= tp.left || a >= tp.right {
                continue;
            }
            if (values[i - 1] > 0.0) == (values[i] > 0.0) {
                continue;
            }
            let root = bisect_secant(|x| Ok(self.spinor(x)[component]), a, b, 1e-14)
                .unwrap_or(0.5 * (a + b));
            if tp.contains(root) {
                out.push(root);
            }
        }
        out
    }

    /// `P` as a callable with poles at the `psi1` nodes.
    pub fn ratio_function(&self) -> impl Fn(f64) -> RatioValue + '_ {
        move |xi| self.ratio(xi)
    }

    /// Writes `# {json header}` followed by `xi,psi1,psi2` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        let mut out = BufWriter::new(file);
        self.write_csv_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let header = SolutionHeader {
            epsilon: self.epsilon,
            quantum_number: self.quantum_number,
            turning_points: self.turning_points,
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["xi", "psi1", "psi2"])?;
        for i in 0..self.mesh.nodes.len() {
            w.write_record([
                format!("{:e}", self.mesh.nodes[i]),
                format!("{:e}", self.mesh.psi1[i]),
                format!("{:e}", self.mesh.psi2[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eigenvalues of `problem` in `window`, ascending, with their shots.
pub fn find_levels<P: BoundStateProblem + Clone>(
    problem: &P,
    window: (f64, f64),
    max_states: usize,
) -> Result<Vec<Shot<P>>> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Bracket { lo, hi });
    }
    let control = StepControl::default();
    let phi = |e: f64| Shot::new(problem, e, control).map(|s| s.angle_mismatch);
    let (phi_lo, phi_hi) = (phi(lo)?, phi(hi)?);
    let first = (phi_lo / PI).floor() as i64 + 1;
    let last = (phi_hi / PI).floor() as i64;
    let mut out = Vec::new();
    let mut lower = lo;
    for k in first..=last {
        if out.len() >= max_states {
            break;
        }
        let target = k as f64 * PI;
        let e = bisect_secant(|e| Ok(phi(e)? - target), lower, hi, EIGEN_TOL)?;
        out.push(Shot::new(problem, e, control)?);
        lower = e;
    }
    Ok(out)
}

/// Dirac bound states with energies in `window`, ascending.
pub fn find_eigenvalues(
    pot: &Potential,
    window: (f64, f64),
    max_states: usize,
) -> Result<Vec<EigenSolution>> {
    let problem = DiracProblem::new(pot.clone());
    Ok(find_levels(&problem, window, max_states)?
        .into_iter()
        .map(EigenSolution::from_shot)
        .collect())
}

/// Normalized mismatch `sin(theta_R - theta_L)` at trial energy `epsilon`.
pub fn mismatch(pot: &Potential, epsilon: f64) -> Result<f64> {
    Ok(Shot::new(
        &DiracProblem::new(pot.clone()),
        epsilon,
        StepControl::default(),
    )?
    .mismatch())
}

/// Unnormalized left/right solutions at an arbitrary energy.
pub fn trial_shot(pot: &Potential, epsilon: f64) -> Result<Shot<DiracProblem>> {
    Shot::new(
        &DiracProblem::new(pot.clone()),
        epsilon,
        StepControl::default(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlaceReport {
    pub psi1_nodes: Vec<f64>,
    pub psi2_nodes: Vec<f64>,
    pub counts_close: bool,
    pub alternates: bool,
}

impl InterlaceReport {
    pub fn passed(&self) -> bool {
        self.counts_close && self.alternates
    }
}

/// Checks that the zeros of the two components strictly alternate between
/// the turning points.
pub fn node_interlace_check(sol: &EigenSolution) -> InterlaceReport {
    let psi1_nodes = sol.nodes(0);
    let psi2_nodes = sol.nodes(1);
    let counts_close = psi1_nodes.len().abs_diff(psi2_nodes.len()) <= 1;
    let mut merged: Vec<(f64, usize)> = psi1_nodes
        .iter()
        .map(|&x| (x, 0))
        .chain(psi2_nodes.iter().map(|&x| (x, 1)))
        .collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alternates = merged
        .windows(2)
        .all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0);
    InterlaceReport {
        psi1_nodes,
        psi2_nodes,
        counts_close,
        alternates,
    }
}

/// Bounded-state properties of one computed solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub epsilon: f64,
    pub p_left: Option<f64>,
    pub p_right: Option<f64>,
    /// `min max(|psi1|, |psi2|)` over the mesh, relative to the largest amplitude.
    pub joint_floor: f64,
    pub forbidden_nodes: usize,
    pub interlace: InterlaceReport,
}

/// Smallest allowed [`PropertyReport::joint_floor`].
pub const JOINT_FLOOR: f64 = 1e-10;

impl PropertyReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match (self.p_left, self.p_right) {
            (Some(l), Some(r)) if l.is_finite() && r.is_finite() => {
                if !(l < 0.0 && r > 0.0) {
                    out.push(format!(
                        "P(xi_L) = {l:e}, P(xi_R) = {r:e}: expected P(xi_L) < 0 < P(xi_R)"
                    ));
                }
            }
            _ => out.push("P is unbounded at a turning point".into()),
        }
        if !(self.joint_floor > JOINT_FLOOR) {
            out.push(format!(
                "components nearly vanish together (floor {:e})",
                self.joint_floor
            ));
        }
        if self.forbidden_nodes > 0 {
            out.push(format!(
                "{} node(s) in the forbidden region",
                self.forbidden_nodes
            ));
        }
        if !self.interlace.passed() {
            out.push("nodes of psi1 and psi2 do not interlace".into());
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

pub fn property_check(sol: &EigenSolution) -> PropertyReport {
    let tp = sol.turning_points;
    let mesh = &sol.mesh;
    let amp = mesh.max_amplitude();
    // the tails decay by construction; the lemma is checked where the
    // solution oscillates
    let joint_floor = mesh
        .nodes
        .iter()
        .zip(mesh.psi1.iter().zip(&mesh.psi2))
        .filter(|(x, _)| **x >= tp.left && **x <= tp.right)
        .map(|(_, (a, b))| a.abs().max(b.abs()))
        .fold(f64::INFINITY, f64::min)
        / amp;
    let outside = |x: f64| !tp.contains(x) && x != tp.left && x != tp.right;
    let forbidden_nodes = sign_changes(&mesh.nodes, &mesh.psi1, outside)
        + sign_changes(&mesh.nodes, &mesh.psi2, outside);
    PropertyReport {
        epsilon: sol.epsilon,
        p_left: sol.ratio(tp.left).finite(),
        p_right: sol.ratio(tp.right).finite(),
        joint_floor,
        forbidden_nodes,
        interlace: node_interlace_check(sol),
    }
}
