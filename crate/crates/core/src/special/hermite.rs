use std::f64::consts::PI;

use super::gamma::rgamma;
use super::kummer::kummer_1f1;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureControl};

/// Largest supported `x^2`.
pub const MAX_HERMITE_ARG_SQ: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteEval {
    pub order: f64,
    pub argument: f64,
    pub value: f64,
    /// `d/dx H_nu(x) = 2 nu H_{nu-1}(x)`.
    pub derivative: f64,
}

/// Above this argument the two confluent series cancel badly and the value
/// is built from the integral representation instead.
pub const SERIES_MAX_X: f64 = 2.5;

/// `H_nu(x)`, without domain checks.
///
/// For `x <= SERIES_MAX_X` the two confluent series are summed. Beyond it the
/// orders `mu, mu + 1` in `(-3, -1]` come from
/// `Gamma(-mu)^{-1} int_0^inf exp(-t^2 - 2tx) t^{-mu-1} dt` and the upward
/// recurrence, which is stable for positive `x`, climbs to `nu`.
pub fn hermite_value(nu: f64, x: f64) -> Result<f64> {
    if x > SERIES_MAX_X {
        return hermite_by_recurrence(nu, x);
    }
    hermite_series(nu, x)
}

fn hermite_series(nu: f64, x: f64) -> Result<f64> {
    let z = x * x;
    let even = rgamma(0.5 * (1.0 - nu));
    let odd = rgamma(-0.5 * nu);
    let mut sum = 0.0;
    if even != 0.0 {
        sum += even * kummer_1f1(-0.5 * nu, 0.5, z)?;
    }
    if odd != 0.0 && x != 0.0 {
        sum -= 2.0 * x * odd * kummer_1f1(0.5 * (1.0 - nu), 1.5, z)?;
    }
    Ok(2f64.powf(nu) * PI.sqrt() * sum)
}

fn hermite_by_recurrence(nu: f64, x: f64) -> Result<f64> {
    let steps = (nu + 2.0).ceil();
    let mu = nu - steps;
    let (mut lower, mut upper) = (negative_order(mu, x)?, negative_order(mu + 1.0, x)?);
    let mut order = mu + 1.0;
    for _ in 1..steps as usize {
        let next = 2.0 * x * upper - 2.0 * order * lower;
        lower = upper;
        upper = next;
        order += 1.0;
    }
    Ok(upper)
}

/// `H_mu(x)` for `mu <= -1`, `x > 0`, with `t = u^2` to smooth `t^{-mu-1}`.
fn negative_order(mu: f64, x: f64) -> Result<f64> {
    let power = -2.0 * mu - 1.0;
    // exp(-u^4 - 2 u^2 x) is below 1e-30 beyond here
    let t_end = -x + (x * x + 70.0).sqrt();
    let control = QuadratureControl {
        abs_tol: 0.0,
        rel_tol: 1e-15,
        max_depth: 40,
    };
    let est = quadrature::integrate(
        |u| {
            let t = u * u;
            2.0 * (-t * t - 2.0 * t * x).exp() * u.powf(power)
        },
        0.0,
        t_end.sqrt(),
        control,
    )?;
    Ok(rgamma(-mu) * est.value)
}

pub fn hermite_nu(nu: f64, x: f64) -> Result<HermiteEval> {
    if !(nu >= -1.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("Hermite order {nu} below -1")));
    }
    if !(x * x <= MAX_HERMITE_ARG_SQ) {
        return Err(Error::Domain(format!(
            "Hermite argument {x} outside x^2 <= {MAX_HERMITE_ARG_SQ}"
        )));
    }
    let value = hermite_value(nu, x)?;
    let derivative = if nu == 0.0 {
        0.0
    } else {
        2.0 * nu * hermite_value(nu - 1.0, x)?
    };
    Ok(HermiteEval {
        order: nu,
        argument: x,
        value,
        derivative,
    })
}

/// `H_{nu+1}(x) = 2x H_nu(x) - 2 nu H_{nu-1}(x)` from `(H_nu, H_{nu-1})`.
pub fn recurrence_shift(nu: f64, x: f64, pair: (f64, f64)) -> f64 {
    2.0 * x * pair.0 - 2.0 * nu * pair.1
}
