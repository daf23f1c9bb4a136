//! The exact quantization condition
//! `int kappa - int P lambda' / (P^2 + lambda^2) = (n + 1) pi`
//! evaluated on spinors from the shooting oracle.
//!
//! The subwave term is integrated in spinor form, whose denominator
//! `(1 + theta + eps) psi2^2 - (1 + theta - eps) psi1^2` never vanishes in
//! the allowed region, so `psi1` nodes need no special handling. Near each
//! turning point `xi = xi_R - t^2` turns the `1/kappa` singularity into a
//! bounded integrand.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::State;
use crate::potential::Potential;
use crate::quadrature::{self, QuadratureControl};
use crate::roots::bisect_secant;
use crate::shooting::{trial_shot, BoundStateProblem, DiracProblem, EigenSolution, Shot};
use crate::turning::TurningPoints;
use crate::units::Units;

/// Default cut `t >= eta` in the square-root variable at each turning point.
pub const ENDPOINT_EXCLUSION: f64 = 1e-12;
/// Energy resolution of `solve_levels`.
pub const LEVEL_TOL: f64 = 1e-10;
const SCAN_POINTS: usize = 128;
/// Potential slope below which a turning point counts as flat.
pub const FLAT_SLOPE: f64 = 1e-7;

/// A spinor defined on the allowed region.
pub trait SpinorProvider {
    fn epsilon(&self) -> f64;
    fn turning_points(&self) -> TurningPoints;
    /// Point splitting the left and right halves of the integral.
    fn match_point(&self) -> f64;
    fn spinor(&self, xi: f64) -> State;
}

impl SpinorProvider for EigenSolution {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn turning_points(&self) -> TurningPoints {
        self.turning_points
    }

    fn match_point(&self) -> f64 {
        EigenSolution::match_point(self)
    }

    fn spinor(&self, xi: f64) -> State {
        EigenSolution::spinor(self, xi)
    }
}

impl<P: BoundStateProblem + Clone> SpinorProvider for Shot<P> {
    fn epsilon(&self) -> f64 {
        self.energy
    }

    fn turning_points(&self) -> TurningPoints {
        self.turning_points
    }

    fn match_point(&self) -> f64 {
        self.match_point
    }

    fn spinor(&self, xi: f64) -> State {
        self.eval(xi)
    }
}

/// Left-decaying solution on `[xi_L, xi_c]`, right-decaying on `[xi_c, xi_R]`.
pub type TrialState = Shot<DiracProblem>;

/// The charge-conjugate partner `(-eps, sigma_x psi)`.
pub struct Mirrored<'a, S: ?Sized>(pub &'a S);

impl<S: SpinorProvider + ?Sized> SpinorProvider for Mirrored<'_, S> {
    fn epsilon(&self) -> f64 {
        -self.0.epsilon()
    }

    fn turning_points(&self) -> TurningPoints {
        self.0.turning_points()
    }

    fn match_point(&self) -> f64 {
        self.0.match_point()
    }

    fn spinor(&self, xi: f64) -> State {
        let y = self.0.spinor(xi);
        [y[1], y[0]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationSettings {
    pub quadrature: QuadratureControl,
    pub endpoint_exclusion: f64,
}

impl Default for QuantizationSettings {
    fn default() -> Self {
        Self {
            quadrature: QuadratureControl::default(),
            endpoint_exclusion: ENDPOINT_EXCLUSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub epsilon: f64,
    pub wkb_integral: f64,
    /// `-int P lambda' / (P^2 + lambda^2)` over the smooth part of the well.
    pub subwave_integral: f64,
    /// Phase of the `lambda` discontinuities at potential jumps that sit on
    /// the turning points; zero for continuous potentials.
    pub boundary_jump: f64,
    pub total_over_pi: f64,
    pub nearest_level: usize,
    /// `total - (nearest_level + 1) pi`.
    pub residual: f64,
    pub quadrature_error: f64,
}

impl QuantizationReport {
    fn assemble(epsilon: f64, wkb: f64, subwave: f64, jump: f64, quadrature_error: f64) -> Self {
        let total = wkb + subwave + jump;
        let nearest_level = ((total / PI).round() - 1.0).max(0.0) as usize;
        Self {
            epsilon,
            wkb_integral: wkb,
            subwave_integral: subwave,
            boundary_jump: jump,
            total_over_pi: total / PI,
            nearest_level,
            residual: total - (nearest_level as f64 + 1.0) * PI,
            quadrature_error,
        }
    }

    pub fn total(&self) -> f64 {
        self.wkb_integral + self.subwave_integral + self.boundary_jump
    }

    /// Residual against an explicit level.
    pub fn residual_for(&self, n: usize) -> f64 {
        self.total() - (n as f64 + 1.0) * PI
    }
}

fn kappa_lambda(eps: f64, theta: f64) -> (f64, f64) {
    let (e, m) = (eps.abs(), 1.0 + theta);
    (
        ((e - m) * (e + m)).max(0.0).sqrt(),
        ((e - m) / (e + m)).max(0.0).sqrt(),
    )
}

/// `P lambda' / (P^2 + lambda^2)` in spinor form,
/// `eps theta' psi1 psi2 / (kappa W)` with `W = psi1' psi2 - psi2' psi1`.
///
/// `None` when `kappa` is too small to evaluate directly; the quadrature
/// transform handles that regime.
pub fn subwave_integrand(pot: &Potential, epsilon: f64, xi: f64, psi: State) -> Option<f64> {
    let theta = pot.value(xi);
    let (kappa, _) = kappa_lambda(epsilon, theta);
    if kappa <= 1e-8 {
        return None;
    }
    Some(spinor_form(
        epsilon,
        1.0 + theta,
        pot.derivative(xi),
        kappa,
        psi,
    ))
}

fn spinor_form(eps: f64, m: f64, dtheta: f64, kappa: f64, psi: State) -> f64 {
    let w = (m + eps) * psi[1] * psi[1] - (m - eps) * psi[0] * psi[0];
    eps * dtheta * psi[0] * psi[1] / (kappa * w)
}

/// `P lambda' / (P^2 + lambda^2)` from the ratio `P = -psi2/psi1` directly.
pub fn ratio_integrand(pot: &Potential, epsilon: f64, xi: f64, p: f64) -> f64 {
    let theta = pot.value(xi);
    let m = 1.0 + theta;
    let (_, lambda) = kappa_lambda(epsilon, theta);
    let dlambda = -epsilon * pot.derivative(xi) / (lambda * (epsilon + m).powi(2));
    p * dlambda / (p * p + lambda * lambda)
}

/// `arctan(P / lambda)`, using `(psi2, psi1)` for negative energies.
fn phase_angle(eps: f64, lambda: f64, psi: State) -> f64 {
    let (a, b) = if eps < 0.0 {
        (psi[1], psi[0])
    } else {
        (psi[0], psi[1])
    };
    (-b / (lambda * a)).atan()
}

/// Spinor representation the integrand is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `psi1' = (1 + theta + eps) psi2`, `psi2' = (1 + theta - eps) psi1`.
    Standard,
    /// `alpha = sigma_y`, `beta = sigma_x`, reached by [`ChangeOfBasis::jackiw_rebbi`].
    JackiwRebbi,
}

/// A real orthogonal change of spinor basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeOfBasis {
    pub matrix: [[f64; 2]; 2],
}

impl ChangeOfBasis {
    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn jackiw_rebbi() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            matrix: [[s, -s], [s, s]],
        }
    }

    pub fn apply(&self, psi: State) -> State {
        let m = self.matrix;
        [
            m[0][0] * psi[0] + m[0][1] * psi[1],
            m[1][0] * psi[0] + m[1][1] * psi[1],
        ]
    }
}

#[derive(Clone, Copy)]
enum Form {
    Dimensionless(Representation),
    Physical(Units),
}

struct Evaluator<'a, S: ?Sized> {
    pot: &'a Potential,
    provider: &'a S,
    settings: QuantizationSettings,
    form: Form,
    /// `sqrt` of the length unit of the integration variable.
    root_ell: f64,
}

#[derive(Clone, Copy)]
struct Half {
    /// Turning point.
    end: f64,
    /// +1 when the interior lies to the right of `end`.
    inward: f64,
    length: f64,
    jump: bool,
    end_slope: f64,
}

impl<S: SpinorProvider + ?Sized> Evaluator<'_, S> {
    fn halves(&self) -> Result<[Half; 2]> {
        let tp = self.provider.turning_points();
        let xc = self.provider.match_point();
        if !(tp.left < xc && xc < tp.right) {
            return Err(Error::Precondition(format!(
                "match point {xc} outside turning points ({}, {})",
                tp.left, tp.right
            )));
        }
        let mut out = [
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
        for h in &mut out {
            h.jump = self.pot.is_jump(h.end);
            let (_, slope) = self.pot.one_sided(h.end, h.end + h.inward);
            h.end_slope = slope.abs();
            if !h.jump && h.end_slope <= FLAT_SLOPE {
                return Err(Error::FlatTurningPoint(h.end));
            }
        }
        Ok(out)
    }

    /// `(wkb, subwave)` densities in the square-root variable `tau` of one
    /// half, already multiplied by the Jacobian `2 tau`.
    fn densities(&self, half: Half, tau: f64) -> (f64, f64) {
        let eps = self.provider.epsilon();
        let t = tau / self.root_ell;
        let s = t * t;
        let xi = half.end + half.inward * s;
        let (theta, dtheta) = if xi == half.end {
            self.pot.one_sided(half.end, half.end + half.inward)
        } else {
            (self.pot.value(xi), self.pot.derivative(xi))
        };
        let m = 1.0 + theta;
        // Close to a smooth turning point eps - 1 - theta is pure rounding
        // noise; its linearization is exact to O(s^2) there.
        let direct = (eps.abs() - 1.0) - theta;
        let linear = !half.jump && (s < 1e-9 * half.length || direct < 1e-8 * (eps.abs() + 1.0));
        let gap = if linear { half.end_slope * s } else { direct };
        let kappa = (gap * (eps.abs() + m)).max(0.0).sqrt();
        let psi = self.provider.spinor(xi);
        let jac = 2.0 * tau;
        match self.form {
            Form::Dimensionless(Representation::Standard) => {
                (kappa * jac, -spinor_form(eps, m, dtheta, kappa, psi) * jac)
            }
            Form::Dimensionless(Representation::JackiwRebbi) => {
                let [u, v] = ChangeOfBasis::jackiw_rebbi().apply(psi);
                let du = eps * v - m * u;
                let dv = m * v - eps * u;
                let sub = eps * dtheta / (2.0 * kappa) * (u * u - v * v) / (du * v - dv * u);
                (kappa * jac, sub * jac)
            }
            Form::Physical(units) => {
                let mc2 = units.energy_scale();
                let hc = units.hbar * units.light_speed;
                let energy = mc2 * eps;
                let v = mc2 * theta;
                let dv = mc2 * dtheta / units.length_scale();
                let gap_e = if linear {
                    mc2 * gap
                } else {
                    energy.abs() - mc2 - v
                };
                let big_k = (gap_e * (energy.abs() + mc2 + v)).max(0.0).sqrt();
                let w = (mc2 + v + energy) * psi[1] * psi[1] - (mc2 + v - energy) * psi[0] * psi[0];
                (
                    big_k / hc * jac,
                    -energy * dv * psi[0] * psi[1] / (big_k * w) * jac,
                )
            }
        }
    }

    fn jump_phase(&self, half: Half) -> f64 {
        if !half.jump {
            return 0.0;
        }
        let eps = self.provider.epsilon();
        let (theta, _) = self.pot.one_sided(half.end, half.end + half.inward);
        let (_, lambda) = kappa_lambda(eps, theta);
        let inside = phase_angle(eps, lambda, self.provider.spinor(half.end));
        if half.inward > 0.0 {
            inside + FRAC_PI_2
        } else {
            FRAC_PI_2 - inside
        }
    }

    fn evaluate(&self) -> Result<QuantizationReport> {
        let halves = self.halves()?;
        let eta = self.settings.endpoint_exclusion * self.root_ell;
        let (mut wkb, mut sub, mut jump, mut err) = (0.0, 0.0, 0.0, 0.0);
        for half in halves {
            let upper = half.length.sqrt() * self.root_ell;
            let w = quadrature::integrate(
                |t| self.densities(half, t).0,
                eta,
                upper,
                self.settings.quadrature,
            )?;
            let s = quadrature::integrate(
                |t| self.densities(half, t).1,
                eta,
                upper,
                self.settings.quadrature,
            )?;
            wkb += w.value;
            sub += s.value;
            err += w.error + s.error;
            jump += self.jump_phase(half);
        }
        Ok(QuantizationReport::assemble(
            self.provider.epsilon(),
            wkb,
            sub,
            jump,
            err,
        ))
    }
}

fn evaluate_form<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
    settings: QuantizationSettings,
    form: Form,
) -> Result<QuantizationReport> {
    let root_ell = match form {
        Form::Dimensionless(_) => 1.0,
        Form::Physical(units) => units.length_scale().sqrt(),
    };
    Evaluator {
        pot,
        provider,
        settings,
        form,
        root_ell,
    }
    .evaluate()
}

/// Dimensionless quantization integral on the provider's spinor.
pub fn evaluate_quantization<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
) -> Result<QuantizationReport> {
    evaluate_with(pot, provider, QuantizationSettings::default())
}

pub fn evaluate_with<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
    settings: QuantizationSettings,
) -> Result<QuantizationReport> {
    evaluate_form(
        pot,
        provider,
        settings,
        Form::Dimensionless(Representation::Standard),
    )
}

/// The same integral written in a chosen spinor representation.
pub fn evaluate_in_representation<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
    representation: Representation,
) -> Result<QuantizationReport> {
    evaluate_form(
        pot,
        provider,
        QuantizationSettings::default(),
        Form::Dimensionless(representation),
    )
}

/// Jackiw-Rebbi form: `int K + (E V' / 2K) (psi1^2 - psi2^2) / (psi1' psi2 - psi2' psi1)`.
pub fn jackiw_rebbi_form<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
) -> Result<QuantizationReport> {
    evaluate_in_representation(pot, provider, Representation::JackiwRebbi)
}

/// Physical-units form: `int K/(hbar c) - E V' psi1 psi2 / (K W) dx` with
/// `K = sqrt(E^2 - (mc^2 + V)^2)`. The potential is given in units of `mc^2`
/// as a function of `xi = x mc / hbar`; integration runs over `x`.
pub fn evaluate_physical<S: SpinorProvider + ?Sized>(
    units: &Units,
    pot: &Potential,
    provider: &S,
) -> Result<QuantizationReport> {
    units.validate()?;
    evaluate_form(
        pot,
        provider,
        QuantizationSettings::default(),
        Form::Physical(*units),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyCheck {
    pub exclusion: f64,
    pub subwave: f64,
    pub subwave_halved: f64,
    pub change: f64,
}

/// Subwave integral at exclusion `eta` and `eta / 2`.
pub fn endpoint_cauchy_check<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
    exclusion: f64,
) -> Result<CauchyCheck> {
    let base = QuantizationSettings {
        endpoint_exclusion: exclusion,
        ..Default::default()
    };
    let halved = QuantizationSettings {
        endpoint_exclusion: 0.5 * exclusion,
        ..Default::default()
    };
    let a = evaluate_with(pot, provider, base)?.subwave_integral;
    let b = evaluate_with(pot, provider, halved)?.subwave_integral;
    Ok(CauchyCheck {
        exclusion,
        subwave: a,
        subwave_halved: b,
        change: (a - b).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub epsilon: f64,
    pub total_positive: f64,
    pub total_negative: f64,
    pub difference: f64,
}

impl SymmetryReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.difference <= tol
    }
}

/// Compares the totals for `(eps, psi)` and `(-eps, sigma_x psi)`.
pub fn negative_energy_check<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    provider: &S,
) -> Result<SymmetryReport> {
    let plus = evaluate_quantization(pot, provider)?;
    let minus = evaluate_quantization(pot, &Mirrored(provider))?;
    Ok(SymmetryReport {
        epsilon: provider.epsilon(),
        total_positive: plus.total(),
        total_negative: minus.total(),
        difference: (plus.total() - minus.total()).abs(),
    })
}

/// Quantization total at an arbitrary trial energy.
pub fn trial_total(pot: &Potential, epsilon: f64) -> Result<QuantizationReport> {
    let shot = trial_shot(pot, epsilon)?;
    evaluate_quantization(pot, &shot)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSolution {
    pub n: usize,
    pub epsilon: f64,
    pub report: QuantizationReport,
}

/// Solves `total(eps) = (n + 1) pi` for each requested `n` inside `bracket`.
pub fn solve_levels(
    pot: &Potential,
    n_list: &[usize],
    bracket: (f64, f64),
) -> Result<Vec<LevelSolution>> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Bracket { lo, hi });
    }
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let totals = grid
        .iter()
        .map(|&e| trial_total(pot, e).map(|r| r.total()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let target = (n as f64 + 1.0) * PI;
        let cell =
            (1..grid.len()).find(|&i| (totals[i - 1] - target) * (totals[i] - target) <= 0.0);
        let Some(i) = cell else {
            return Err(Error::LevelBracket { n, lo, hi });
        };
        let eps = bisect_secant(
            |e| Ok(trial_total(pot, e)?.total() - target),
            grid[i - 1],
            grid[i],
            LEVEL_TOL,
        )?;
        let report = trial_total(pot, eps)?;
        out.push(LevelSolution {
            n,
            epsilon: eps,
            report,
        });
    }
    Ok(out)
}

/// Writes `epsilon,total_over_pi,residual` rows.
pub fn write_reports_csv(path: impl AsRef<Path>, reports: &[QuantizationReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epsilon", "total_over_pi", "residual"])?;
    for r in reports {
        w.write_record([
            format!("{:e}", r.epsilon),
            format!("{:e}", r.total_over_pi),
            format!("{:e}", r.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
