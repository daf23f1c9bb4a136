//! The linear confining well `V = g|x|` in natural units.
//!
//! With `alpha = m / sqrt(g)` and `nu = E^2 / 2g` the spectrum solves
//! `H_nu(alpha)^2 = 2 nu H_{nu-1}(alpha)^2`, and the quantization functional
//! has the closed form evaluated by [`atm_i_alpha`].

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::{self, QuadratureControl};
use crate::roots::{bisect, bisect_secant, scan_brackets};
use crate::shooting::find_eigenvalues;
use crate::special::hermite_value;

/// Reference eigenvalues for `alpha = 1, 2` and `n = 0..4`.
pub const REFERENCE_EXACT: [[f64; 5]; 2] = [
    [
        1.39627444057259,
        3.05676024015993,
        4.30627664769999,
        5.61521082352847,
        6.80477121323347,
    ],
    [
        3.33859540177509,
        5.45216076495126,
        7.00608730469830,
        8.56894586286508,
        9.97860833615064,
    ],
];

/// Reference roots of the quantization functional, same layout.
pub const REFERENCE_ATM: [[f64; 5]; 2] = [
    [
        1.39627444809303,
        3.05676024192944,
        4.30627665789798,
        5.61521084997803,
        6.80477123537566,
    ],
    [
        3.33859536647797,
        5.45216075601056,
        7.00608729608357,
        8.56894588172436,
        9.97860836439766,
    ],
];

pub const REFERENCE_ALPHAS: [f64; 2] = [1.0, 2.0];

pub const TRANSCENDENTAL_SCAN: f64 = 0.05;
pub const EXACT_TOL: f64 = 1e-12;
pub const ATM_TOL: f64 = 1e-10;
pub const ATM_QUADRATURE_TOL: f64 = 1e-9;
pub const CURVE_POINTS: usize = 400;
pub const CURVE_END: f64 = 11.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBenchmarkCase {
    pub alpha: f64,
    pub nu: f64,
    pub level: usize,
}

impl LinearBenchmarkCase {
    pub fn new(alpha: f64, nu: f64, level: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !(nu > threshold(alpha)) {
            return Err(Error::Domain(format!(
                "nu = {nu} not above alpha^2/2 = {}",
                threshold(alpha)
            )));
        }
        Ok(Self { alpha, nu, level })
    }

    /// Energy in units of the rest mass, `E/m = sqrt(2 nu) / alpha`.
    pub fn epsilon(&self) -> f64 {
        (2.0 * self.nu).sqrt() / self.alpha
    }

    /// Dimensionless well `theta(xi) = |xi| / alpha^2`.
    pub fn potential(&self) -> Result<Potential> {
        linear_potential(self.alpha)
    }
}

pub fn linear_potential(alpha: f64) -> Result<Potential> {
    check_alpha(alpha)?;
    Potential::linear(1.0 / (alpha * alpha))
}

pub fn nu_from_epsilon(alpha: f64, epsilon: f64) -> f64 {
    0.5 * epsilon * epsilon * alpha * alpha
}

fn threshold(alpha: f64) -> f64 {
    0.5 * alpha * alpha
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

/// `H_nu(alpha)^2 - 2 nu H_{nu-1}(alpha)^2`.
pub fn transcendental(alpha: f64, nu: f64) -> Result<f64> {
    let h = hermite_value(nu, alpha)?;
    let hm = hermite_value(nu - 1.0, alpha)?;
    Ok(h * h - 2.0 * nu * hm * hm)
}

/// The `(n+1)`-th root of [`transcendental`] above `alpha^2/2`.
pub fn exact_eigen_transcendental(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let lo = threshold(alpha);
    let mut a = lo;
    let mut fa = transcendental(alpha, a)?;
    let mut found = 0;
    // levels are spaced by more than one unit of nu, so a generous ceiling suffices
    let hi = lo + 4.0 * (n as f64 + 2.0);
    while a < hi {
        let b = a + TRANSCENDENTAL_SCAN;
        let fb = transcendental(alpha, b)?;
        if fa * fb < 0.0 || fb == 0.0 {
            if found == n {
                return bisect_secant(|nu| transcendental(alpha, nu), a, b, EXACT_TOL);
            }
            found += 1;
        }
        a = b;
        fa = fb;
    }
    Err(Error::LevelBracket { n, lo, hi })
}

/// Integrand ratio `(H_nu^2 - 2 nu H_{nu-1}^2) / (H_nu^2 - H_{nu-1} H_{nu+1})`.
pub fn integrand_ratio(nu: f64, x: f64) -> Result<f64> {
    let h = hermite_value(nu, x)?;
    let hm = hermite_value(nu - 1.0, x)?;
    let hp = 2.0 * x * h - 2.0 * nu * hm;
    Ok((h * h - 2.0 * nu * hm * hm) / (h * h - hm * hp))
}

/// `H_nu^2 - H_{nu-1} H_{nu+1}`.
pub fn integrand_denominator(nu: f64, x: f64) -> Result<f64> {
    let h = hermite_value(nu, x)?;
    let hm = hermite_value(nu - 1.0, x)?;
    Ok(h * h - hm * (2.0 * x * h - 2.0 * nu * hm))
}

/// `I_alpha(nu)`; the integral runs over `theta` with `x = sqrt(2 nu) sin(theta)`.
pub fn atm_i_alpha(alpha: f64, nu: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(nu > threshold(alpha)) {
        return Err(Error::Domain(format!(
            "bound states need nu > alpha^2/2 = {}, got {nu}",
            threshold(alpha)
        )));
    }
    let root = (2.0 * nu).sqrt();
    let gap = (2.0 * nu - alpha * alpha).sqrt();
    let closed = PI * nu - alpha * gap - 2.0 * nu * (alpha / gap).atan();
    let start = (alpha / root).asin();
    let mut failure = None;
    let control = QuadratureControl {
        abs_tol: ATM_QUADRATURE_TOL,
        ..Default::default()
    };
    let est = quadrature::integrate(
        |t| match integrand_ratio(nu, root * t.sin()) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        start,
        FRAC_PI_2,
        control,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(closed + est.value)
}

/// Roots of `I_alpha(nu) = (n+1) pi`, by bisection to `1e-10` in `nu`.
pub fn solve_atm_levels(alpha: f64, levels: &[usize]) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let lo = threshold(alpha);
    let top = levels.iter().copied().max().unwrap_or(0);
    let hi = lo + 4.0 * (top as f64 + 2.0);
    // the functional vanishes at the threshold and increases with nu
    let first = lo + 1e-6;
    let brackets = scan_brackets(
        |nu| Ok(atm_i_alpha(alpha, nu)? / PI - (top as f64 + 1.0)),
        first,
        hi,
        4.0 * TRANSCENDENTAL_SCAN,
    )?;
    if brackets.is_empty() {
        return Err(Error::LevelBracket { n: top, lo, hi });
    }
    let upper = brackets[0].1;
    levels
        .iter()
        .map(|&n| {
            let target = (n + 1) as f64;
            bisect(
                |nu| Ok(atm_i_alpha(alpha, nu)? / PI - target),
                first,
                upper,
                ATM_TOL,
            )
            .map_err(|_| Error::LevelBracket {
                n,
                lo: first,
                hi: upper,
            })
        })
        .collect()
}

/// Levels from the Dirac shooting solver, expressed as `nu`.
pub fn shooting_levels(alpha: f64, count: usize) -> Result<Vec<f64>> {
    let pot = linear_potential(alpha)?;
    // nu grows roughly linearly in n, so epsilon stays below this bound
    let nu_max = threshold(alpha) + 2.0 * (count as f64 + 2.0);
    let eps_max = (2.0 * nu_max).sqrt() / alpha;
    let sols = find_eigenvalues(&pot, (1.0 + 1e-9, eps_max), count)?;
    if sols.len() < count {
        return Err(Error::LevelBracket {
            n: sols.len(),
            lo: 1.0,
            hi: eps_max,
        });
    }
    Ok(sols
        .iter()
        .map(|s| nu_from_epsilon(alpha, s.epsilon))
        .collect())
}

/// Sign-constancy scan of the integrand denominator on `(alpha, sqrt(2 nu))`.
pub fn denominator_sign_constant(alpha: f64, nu: f64, samples: usize) -> Result<bool> {
    let root = (2.0 * nu).sqrt();
    let mut sign = 0.0;
    for i in 0..=samples {
        let x = alpha + (root - alpha) * i as f64 / samples as f64;
        let d = integrand_denominator(nu, x)?;
        if d == 0.0 || (sign != 0.0 && d.signum() != sign) {
            return Ok(false);
        }
        sign = d.signum();
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub nu: f64,
    pub i_over_pi: f64,
}

/// `CURVE_POINTS` values from `alpha^2/2 + 0.01` to `CURVE_END`.
pub fn default_grid(alpha: f64) -> Vec<f64> {
    let lo = threshold(alpha) + 0.01;
    (0..CURVE_POINTS)
        .map(|i| lo + (CURVE_END - lo) * i as f64 / (CURVE_POINTS - 1) as f64)
        .collect()
}

pub fn fig2_curve(alpha: f64, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    grid.iter()
        .map(|&nu| {
            Ok(CurvePoint {
                nu,
                i_over_pi: atm_i_alpha(alpha, nu)? / PI,
            })
        })
        .collect()
}

/// Adjacent grid points whose curve values straddle `height`.
pub fn crossing(curve: &[CurvePoint], height: f64) -> Option<(f64, f64)> {
    curve
        .windows(2)
        .find(|w| (w[0].i_over_pi - height) * (w[1].i_over_pi - height) <= 0.0)
        .map(|w| (w[0].nu, w[1].nu))
}

/// Crossing of `height` located by bisection on the functional itself,
/// starting from the grid bracket.
pub fn refined_crossing(alpha: f64, curve: &[CurvePoint], height: f64) -> Result<f64> {
    let (a, b) = crossing(curve, height).ok_or(Error::Bracket {
        lo: curve.first().map_or(f64::NAN, |p| p.nu),
        hi: curve.last().map_or(f64::NAN, |p| p.nu),
    })?;
    bisect(
        |nu| Ok(atm_i_alpha(alpha, nu)? / PI - height),
        a,
        b,
        ATM_TOL,
    )
}

pub fn is_strictly_increasing(curve: &[CurvePoint]) -> bool {
    curve.windows(2).all(|w| w[1].i_over_pi > w[0].i_over_pi)
}

pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["nu", "i_over_pi"])?;
    for p in curve {
        w.write_record([format!("{:.14e}", p.nu), format!("{:.14e}", p.i_over_pi)])?;
    }
    w.flush()?;
    Ok(())
}
