//! Schrödinger limit: `-psi''/(2m) + theta psi = e psi` in the same
//! dimensionless length and energy units as the Dirac problem (`hbar = c = 1`),
//! so `e` compares directly with `epsilon - 1`.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{State, StepControl};
use crate::potential::Potential;
use crate::quadrature::{self, QuadratureControl};
use crate::quantization::{ENDPOINT_EXCLUSION, FLAT_SLOPE};
use crate::shooting::{
    find_eigenvalues, find_levels, sign_changes, BoundStateProblem, EigenSolution, RatioValue,
    Shot, Side,
};
use crate::special::{airy_ai_prime_zero, airy_ai_zero};
use crate::turning::{find_turning_points, TurningPoints};

/// Smallness parameters of the default convergence sweep.
pub const LIMIT_PARAMETERS: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

/// `y = (psi, psi')`, `psi'' = 2m (theta - e) psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerProblem {
    pub potential: Potential,
    pub mass: f64,
}

impl SchrodingerProblem {
    pub fn new(potential: Potential, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Precondition(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(Self { potential, mass })
    }

    fn q(&self, e: f64, x: f64) -> f64 {
        2.0 * self.mass * (self.potential.value(x) - e)
    }
}

impl BoundStateProblem for SchrodingerProblem {
    fn rhs(&self, e: f64, x: f64, y: State) -> State {
        [y[1], self.q(e, x) * y[0]]
    }

    fn max_step(&self, e: f64, x: f64) -> f64 {
        1.0 / (1.0 + self.q(e, x).abs().sqrt())
    }

    fn turning_points(&self, e: f64) -> Result<TurningPoints> {
        find_turning_points(&self.potential, e + 1.0)
    }

    fn decay_rate(&self, e: f64, x: f64) -> f64 {
        self.q(e, x).max(0.0).sqrt()
    }

    fn decaying_state(&self, e: f64, x: f64, side: Side) -> State {
        let gamma = self.decay_rate(e, x);
        match side {
            Side::Left => [1.0, gamma],
            Side::Right => [1.0, -gamma],
        }
    }

    fn match_point(&self) -> f64 {
        self.potential.minimum().0
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.potential.breakpoints()
    }

    fn node_component(&self, _e: f64) -> usize {
        0
    }
}

/// A Schrödinger eigenstate, normalized to `int psi^2 = 1`.
#[derive(Debug, Clone)]
pub struct NonRelState {
    pub shifted_energy: f64,
    pub quantum_number: usize,
    pub turning_points: TurningPoints,
    pub nodes: Vec<f64>,
    pub psi1: Vec<f64>,
    shot: Shot<SchrodingerProblem>,
    norm: f64,
}

impl NonRelState {
    fn from_shot(shot: Shot<SchrodingerProblem>) -> Self {
        let (xs, ys) = shot.samples();
        let psi: Vec<f64> = ys.iter().map(|y| y[0]).collect();
        let mut sq = 0.0;
        for i in 1..xs.len() {
            sq += 0.5 * (psi[i - 1].powi(2) + psi[i].powi(2)) * (xs[i] - xs[i - 1]);
        }
        let norm = 1.0 / sq.sqrt();
        let quantum_number = sign_changes(&xs, &psi, |_| true);
        Self {
            shifted_energy: shot.energy,
            quantum_number,
            turning_points: shot.turning_points,
            psi1: psi.iter().map(|v| v * norm).collect(),
            nodes: xs,
            shot,
            norm,
        }
    }

    pub fn problem(&self) -> &SchrodingerProblem {
        self.shot.problem()
    }

    pub fn match_point(&self) -> f64 {
        self.shot.match_point
    }

    /// `(psi, psi')` at `x`.
    pub fn wave(&self, x: f64) -> State {
        let y = self.shot.eval(x);
        [y[0] * self.norm, y[1] * self.norm]
    }

    /// `P_s = -psi'/psi`.
    pub fn p_s(&self, x: f64) -> RatioValue {
        let [psi, dpsi] = self.wave(x);
        if psi == 0.0 {
            RatioValue::Pole
        } else {
            RatioValue::Finite(-dpsi / psi)
        }
    }

    /// `sqrt(2m (e - theta))`, zero in forbidden regions.
    pub fn kappa_s(&self, x: f64) -> f64 {
        (-self.problem().q(self.shifted_energy, x)).max(0.0).sqrt()
    }
}

/// Schrödinger bound states with energies in `window`, ascending.
pub fn schrodinger_shoot(
    pot: &Potential,
    mass: f64,
    window: (f64, f64),
    max_states: usize,
) -> Result<Vec<NonRelState>> {
    let problem = SchrodingerProblem::new(pot.clone(), mass)?;
    Ok(find_levels(&problem, window, max_states)?
        .into_iter()
        .map(NonRelState::from_shot)
        .collect())
}

/// Unnormalized solution at a trial energy.
pub fn schrodinger_trial(
    pot: &Potential,
    mass: f64,
    energy: f64,
) -> Result<Shot<SchrodingerProblem>> {
    Shot::new(
        &SchrodingerProblem::new(pot.clone(), mass)?,
        energy,
        StepControl::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaoReport {
    pub shifted_energy: f64,
    pub wkb_integral: f64,
    pub subwave_integral: f64,
    pub boundary_jump: f64,
    pub total_over_pi: f64,
    pub nearest_level: usize,
    pub residual: f64,
    pub quadrature_error: f64,
}

impl CaoReport {
    pub fn total(&self) -> f64 {
        self.wkb_integral + self.subwave_integral + self.boundary_jump
    }
}

#[derive(Clone, Copy)]
struct Half {
    end: f64,
    inward: f64,
    length: f64,
    jump: bool,
    end_slope: f64,
}

/// `int [kappa_s - kappa_s' P_s / (P_s^2 + kappa_s^2)] dx` between the
/// classical turning points, plus the boundary phases at potential steps.
pub fn cao_quantization(pot: &Potential, mass: f64, state: &NonRelState) -> Result<CaoReport> {
    let e = state.shifted_energy;
    let tp = state.turning_points;
    let xc = state.match_point();
    if !(tp.left < xc && xc < tp.right) {
        return Err(Error::Precondition(format!(
            "match point {xc} outside turning points ({}, {})",
            tp.left, tp.right
        )));
    }
    let mut halves = [
        Half {
            end: tp.left,
            inward: 1.0,
            length: xc - tp.left,
            jump: false,
            end_slope: 0.0,
        },
        Half {
            end: tp.right,
            inward: -1.0,
            length: tp.right - xc,
            jump: false,
            end_slope: 0.0,
        },
    ];
    for h in &mut halves {
        h.jump = pot.is_jump(h.end);
        h.end_slope = pot.one_sided(h.end, h.end + h.inward).1.abs();
        if !h.jump && h.end_slope <= FLAT_SLOPE {
            return Err(Error::FlatTurningPoint(h.end));
        }
    }
    let densities = |h: Half, t: f64| -> (f64, f64) {
        let s = t * t;
        let x = h.end + h.inward * s;
        let (v, dv) = if x == h.end {
            pot.one_sided(h.end, h.end + h.inward)
        } else {
            (pot.value(x), pot.derivative(x))
        };
        let direct = e - v;
        let linear = !h.jump && (s < 1e-9 * h.length || direct < 1e-8 * (e.abs() + 1.0));
        let gap = if linear { h.end_slope * s } else { direct };
        let kappa = (2.0 * mass * gap).max(0.0).sqrt();
        let [psi, dpsi] = state.wave(x);
        let jac = 2.0 * t;
        let sub = if dv == 0.0 {
            0.0
        } else {
            -mass * dv * psi * dpsi / (kappa * (dpsi * dpsi + kappa * kappa * psi * psi))
        };
        (kappa * jac, sub * jac)
    };
    let control = QuadratureControl::default();
    let (mut wkb, mut sub, mut jump, mut err) = (0.0, 0.0, 0.0, 0.0);
    for h in halves {
        let upper = h.length.sqrt();
        let w = quadrature::integrate(|t| densities(h, t).0, ENDPOINT_EXCLUSION, upper, control)?;
        let s = quadrature::integrate(|t| densities(h, t).1, ENDPOINT_EXCLUSION, upper, control)?;
        wkb += w.value;
        sub += s.value;
        err += w.error + s.error;
        if h.jump {
            let (v, _) = pot.one_sided(h.end, h.end + h.inward);
            let kappa = (2.0 * mass * (e - v)).max(0.0).sqrt();
            let [psi, dpsi] = state.wave(h.end);
            let inside = (-dpsi / (kappa * psi)).atan();
            jump += if h.inward > 0.0 {
                inside + FRAC_PI_2
            } else {
                FRAC_PI_2 - inside
            };
        }
    }
    let total_over_pi = (wkb + sub + jump) / std::f64::consts::PI;
    let nearest = (total_over_pi - 1.0).round().max(0.0);
    Ok(CaoReport {
        shifted_energy: e,
        wkb_integral: wkb,
        subwave_integral: sub,
        boundary_jump: jump,
        total_over_pi,
        nearest_level: nearest as usize,
        residual: total_over_pi - (nearest + 1.0),
        quadrature_error: err,
    })
}

/// Well shapes whose Schrödinger spectrum scales with one smallness
/// parameter `r` (the level spacing in units of the rest energy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitFamily {
    /// `theta = r^2 xi^2 / 2`, spacing `r`.
    Harmonic,
    /// `theta = r^{3/2} |xi|`.
    Linear,
}

impl LimitFamily {
    pub fn potential(self, r: f64) -> Result<Potential> {
        match self {
            LimitFamily::Harmonic => Potential::quadratic(0.5 * r * r),
            LimitFamily::Linear => Potential::linear(r.powf(1.5)),
        }
    }

    /// Closed-form Schrödinger level `n` (unit mass).
    pub fn reference_energy(self, r: f64, n: usize) -> Result<f64> {
        match self {
            LimitFamily::Harmonic => Ok((n as f64 + 0.5) * r),
            LimitFamily::Linear => Ok(linear_well_level(r.powf(1.5), 1.0, n)?),
        }
    }
}

/// Level `n` of `-psi''/(2m) + g|x| psi = e psi` from the Airy zeros.
pub fn linear_well_level(g: f64, mass: f64, n: usize) -> Result<f64> {
    let k = n / 2 + 1;
    let z = if n % 2 == 0 {
        airy_ai_prime_zero(k)?
    } else {
        airy_ai_zero(k)?
    };
    Ok((g * g / (2.0 * mass)).cbrt() * -z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub dirac_shift: f64,
    pub schrodinger: f64,
    pub gap: f64,
}

/// Dirac level `n` and Schrödinger level `n` of one family member.
pub fn limit_pair(family: LimitFamily, r: f64, n: usize) -> Result<(EigenSolution, NonRelState)> {
    let pot = family.potential(r)?;
    let lower = family.reference_energy(r, n)?;
    let upper = family.reference_energy(r, n + 1)?;
    let top = 0.5 * (lower + upper);
    let dirac = find_eigenvalues(&pot, (1.0 + 1e-12, 1.0 + top), n + 1)?;
    let schr = schrodinger_shoot(&pot, 1.0, (1e-12, top), n + 1)?;
    match (dirac.into_iter().nth(n), schr.into_iter().nth(n)) {
        (Some(d), Some(s)) => Ok((d, s)),
        _ => Err(Error::LevelBracket {
            n,
            lo: 0.0,
            hi: top,
        }),
    }
}

pub fn nonrel_convergence(
    family: LimitFamily,
    parameters: &[f64],
    n: usize,
) -> Result<Vec<ConvergenceRow>> {
    parameters
        .iter()
        .map(|&r| {
            let (d, s) = limit_pair(family, r, n)?;
            let dirac_shift = d.epsilon - 1.0;
            let e = s.shifted_energy;
            Ok(ConvergenceRow {
                parameter: r,
                dirac_shift,
                schrodinger: e,
                gap: ((dirac_shift - e) / e).abs(),
            })
        })
        .collect()
}

pub fn strictly_decreasing(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap < w[0].gap)
}

/// Worst relative deviations of the limiting maps on the inner allowed
/// region: `lambda` vs `sqrt((e - theta)/2)`, `P` vs `P_s/2`, and
/// `psi1'` vs `2 psi2` (scaled by `max |psi1'|`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitMaps {
    pub lambda: f64,
    pub ratio: f64,
    pub derivative: f64,
}

impl LimitMaps {
    pub fn within(&self, tol: f64) -> bool {
        self.lambda <= tol && self.ratio <= tol && self.derivative <= tol
    }
}

pub fn limit_maps(dirac: &EigenSolution, schr: &NonRelState, samples: usize) -> LimitMaps {
    let pot = dirac.potential();
    let eps = dirac.epsilon;
    let e = schr.shifted_energy;
    let tp = schr.turning_points;
    let amp = schr.psi1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = LimitMaps {
        lambda: 0.0,
        ratio: 0.0,
        derivative: 0.0,
    };
    let mut dmax = 0.0f64;
    let mut dworst = 0.0f64;
    for i in 1..samples {
        let x = tp.left + tp.width() * i as f64 / samples as f64;
        let theta = pot.value(x);
        let m = 1.0 + theta;
        let psi = dirac.spinor(x);
        let dpsi1 = (m + eps) * psi[1];
        dmax = dmax.max(dpsi1.abs());
        dworst = dworst.max((dpsi1 - 2.0 * psi[1]).abs());
        // away from the turning points and from nodes, where both sides are small
        if theta < 0.5 * e {
            let lambda = ((eps - m) / (eps + m)).sqrt();
            let approx = (0.5 * (e - theta)).sqrt();
            out.lambda = out.lambda.max((lambda - approx).abs() / approx);
        }
        let [w, dw] = schr.wave(x);
        if w.abs() > 0.1 * amp && psi[0] != 0.0 {
            let p = -psi[1] / psi[0];
            let ps = -dw / w;
            let scale = (0.5 * ps).abs().max(0.5 * schr.kappa_s(x));
            out.ratio = out.ratio.max((p - 0.5 * ps).abs() / scale);
        }
    }
    out.derivative = if dmax > 0.0 { dworst / dmax } else { 0.0 };
    out
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "dirac_shift", "schrodinger", "gap"])?;
    for r in rows {
        w.write_record([
            format!("{:e}", r.parameter),
            format!("{:.14e}", r.dirac_shift),
            format!("{:.14e}", r.schrodinger),
            format!("{:.14e}", r.gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}
