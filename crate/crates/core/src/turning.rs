//! Effective turning points `1 + theta(xi) = epsilon` and the two-turning-point
//! restriction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Samples used to detect extra roots of `1 + theta - epsilon`.
/// Odd, so the symmetric sampling grid includes the minimum itself.
pub const ROOT_GUARD_SAMPLES: usize = 1025;
const MAX_WINDOW_DOUBLINGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub left: f64,
    pub right: f64,
}

impl TurningPoints {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi > self.left && xi < self.right
    }
}

/// Half-width of a window around the minimum whose ends are both forbidden.
fn escape_window(pot: &Potential, epsilon: f64) -> Result<f64> {
    let (xc, _) = pot.minimum();
    let mut w = pot.characteristic_width();
    for _ in 0..MAX_WINDOW_DOUBLINGS {
        if 1.0 + pot.value(xc - w) > epsilon && 1.0 + pot.value(xc + w) > epsilon {
            return Ok(w);
        }
        w *= 2.0;
    }
    Err(Error::NotConfining { epsilon, reach: w })
}

fn count_roots(pot: &Potential, epsilon: f64, half_width: f64) -> usize {
    let (xc, _) = pot.minimum();
    let g = |x: f64| 1.0 + pot.value(x) - epsilon;
    let n = ROOT_GUARD_SAMPLES;
    let mut prev = g(xc - half_width);
    let mut count = 0;
    for i in 1..n {
        let x = xc - half_width + 2.0 * half_width * i as f64 / (n - 1) as f64;
        let v = g(x);
        if (prev > 0.0) != (v > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Locates `xi_L < xi_c < xi_R` with `1 + theta = epsilon`.
///
/// For potentials with jumps the turning point is the jump itself.
pub fn find_turning_points(pot: &Potential, epsilon: f64) -> Result<TurningPoints> {
    let (xc, theta_min) = pot.minimum();
    if !pot.is_admissible() {
        return Err(Error::Inadmissible(1.0 + theta_min));
    }
    if !(epsilon > 1.0 + theta_min) {
        return Err(Error::NoTurningPoints {
            epsilon,
            threshold: 1.0 + theta_min,
        });
    }
    let w = escape_window(pot, epsilon)?;
    let roots = count_roots(pot, epsilon, w);
    if roots > 2 {
        return Err(Error::TooManyTurningPoints { epsilon, roots });
    }
    let g = |x: f64| 1.0 + pot.value(x) - epsilon;
    let left = bisect_to_ulp(g, xc, xc - w);
    let right = bisect_to_ulp(g, xc, xc + w);
    let snap = |x: f64| {
        pot.jumps()
            .into_iter()
            .find(|j| (j - x).abs() <= 1e-9 * (1.0 + j.abs()))
            .unwrap_or(x)
    };
    Ok(TurningPoints {
        left: snap(left),
        right: snap(right),
    })
}

/// Bisection between an allowed point `inside` and a forbidden point `outside`.
fn bisect_to_ulp(g: impl Fn(f64) -> f64, inside: f64, outside: f64) -> f64 {
    let (mut a, mut b) = (inside, outside);
    loop {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if g(m) > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    if g(a).abs() <= g(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Inadmissible { one_plus_theta_min: f64 },
    RootCount { epsilon: f64, roots: usize },
    NotConfining { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub theta_min: f64,
    pub admissible: bool,
    /// `(epsilon, root count)` for every sampled energy.
    pub samples: Vec<(f64, usize)>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_roots(&self) -> usize {
        self.samples.iter().map(|s| s.1).max().unwrap_or(0)
    }
}

/// Checks admissibility and the root count across an energy window.
pub fn validate_constraints(pot: &Potential, window: (f64, f64)) -> ValidationReport {
    const ENERGY_SAMPLES: usize = 33;
    let (_, theta_min) = pot.minimum();
    let mut violations = Vec::new();
    if !pot.is_admissible() {
        violations.push(Violation::Inadmissible {
            one_plus_theta_min: 1.0 + theta_min,
        });
    }
    let (lo, hi) = (window.0.min(window.1), window.0.max(window.1));
    let mut samples = Vec::with_capacity(ENERGY_SAMPLES);
    for i in 0..ENERGY_SAMPLES {
        let eps = lo + (hi - lo) * i as f64 / (ENERGY_SAMPLES - 1) as f64;
        if eps <= 1.0 + theta_min {
            samples.push((eps, 0));
            continue;
        }
        match escape_window(pot, eps) {
            Ok(w) => {
                let roots = count_roots(pot, eps, w);
                samples.push((eps, roots));
                if roots != 2 {
                    violations.push(Violation::RootCount {
                        epsilon: eps,
                        roots,
                    });
                }
            }
            Err(_) => violations.push(Violation::NotConfining { epsilon: eps }),
        }
    }
    ValidationReport {
        theta_min,
        admissible: pot.is_admissible(),
        samples,
        violations,
    }
}
