//! Dimensionless scalar potentials `theta(xi)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape-preserving (Fritsch-Carlson) piecewise cubic through tabulated data.
///
/// Outside the mesh the interpolant continues linearly with the end slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if xs.len() < 3 {
            return Err(Error::InvalidPotential(
                "tabulated mesh needs at least 3 points".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPotential(
                "tabulated mesh must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(
                "tabulated mesh contains non-finite values".into(),
            ));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { xs, ys, slopes })
    }

    /// Reads a two-column `xi,theta` CSV. A header row is skipped when it does not parse.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Config(format!(
                    "mesh row {} has {} columns",
                    row + 1,
                    record.len()
                )));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "mesh row {} is not numeric",
                        row + 1
                    )))
                }
            }
        }
        Self::new(xs, ys)
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    fn locate(&self, x: f64) -> usize {
        let n = self.xs.len();
        self.xs.partition_point(|&k| k <= x).clamp(1, n - 1) - 1
    }

    pub fn value(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let k = self.locate(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.slopes[0];
        }
        if x >= self.xs[n - 1] {
            return self.slopes[n - 1];
        }
        let k = self.locate(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.ys[k] + d10 * self.slopes[k] + d01 * self.ys[k + 1] + d11 * self.slopes[k + 1]
    }

    fn end_slopes(&self) -> (f64, f64) {
        (self.slopes[0], self.slopes[self.slopes.len() - 1])
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// Flat; confines nothing, useful for free propagation.
    Constant {
        value: f64,
    },
    /// `a |xi|`
    Linear {
        slope: f64,
    },
    /// `b xi^2`
    Quadratic {
        curvature: f64,
    },
    /// Zero for `|xi| < half_width`, `height` outside.
    SquareWell {
        half_width: f64,
        height: f64,
    },
    /// `sum_k c_k xi^k`, ascending powers.
    Polynomial {
        coefficients: Vec<f64>,
    },
    Tabulated {
        table: MonotoneCubic,
    },
}

/// A confining dimensionless potential with its cached minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    kind: PotentialKind,
    min_at: f64,
    min_value: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind) -> Result<Self> {
        let (min_at, min_value) = match &kind {
            PotentialKind::Constant { value } => (0.0, *value),
            PotentialKind::Linear { slope } => {
                require_positive("slope", *slope)?;
                (0.0, 0.0)
            }
            PotentialKind::Quadratic { curvature } => {
                require_positive("curvature", *curvature)?;
                (0.0, 0.0)
            }
            PotentialKind::SquareWell { half_width, height } => {
                require_positive("half_width", *half_width)?;
                require_positive("height", *height)?;
                (0.0, 0.0)
            }
            PotentialKind::Polynomial { coefficients } => polynomial_minimum(coefficients)?,
            PotentialKind::Tabulated { table } => {
                let (left, right) = table.end_slopes();
                if !(left < 0.0 && right > 0.0) {
                    return Err(Error::InvalidPotential(format!(
                        "tabulated potential must rise at both ends (end slopes {left}, {right})"
                    )));
                }
                tabulated_minimum(table)
            }
        };
        Ok(Self {
            kind,
            min_at,
            min_value,
        })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(PotentialKind::Constant { value })
    }

    pub fn linear(slope: f64) -> Result<Self> {
        Self::new(PotentialKind::Linear { slope })
    }

    pub fn quadratic(curvature: f64) -> Result<Self> {
        Self::new(PotentialKind::Quadratic { curvature })
    }

    pub fn square_well(half_width: f64, height: f64) -> Result<Self> {
        Self::new(PotentialKind::SquareWell { half_width, height })
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        Self::new(PotentialKind::Polynomial { coefficients })
    }

    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::new(PotentialKind::Tabulated {
            table: MonotoneCubic::new(xs, ys)?,
        })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn value(&self, xi: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant { value } => *value,
            PotentialKind::Linear { slope } => slope * xi.abs(),
            PotentialKind::Quadratic { curvature } => curvature * xi * xi,
            PotentialKind::SquareWell { half_width, height } => {
                if xi.abs() < *half_width {
                    0.0
                } else {
                    *height
                }
            }
            PotentialKind::Polynomial { coefficients } => horner(coefficients, xi),
            PotentialKind::Tabulated { table } => table.value(xi),
        }
    }

    /// One-sided at kinks: `sign(xi) a` for the linear well, zero at its apex.
    pub fn derivative(&self, xi: f64) -> f64 {
        match &self.kind {
            PotentialKind::Linear { slope } => {
                if xi > 0.0 {
                    *slope
                } else if xi < 0.0 {
                    -slope
                } else {
                    0.0
                }
            }
            PotentialKind::Constant { .. } => 0.0,
            PotentialKind::Quadratic { curvature } => 2.0 * curvature * xi,
            PotentialKind::SquareWell { .. } => 0.0,
            PotentialKind::Polynomial { coefficients } => horner_derivative(coefficients, xi),
            PotentialKind::Tabulated { table } => table.derivative(xi),
        }
    }

    /// `(xi_c, theta_min)`.
    pub fn minimum(&self) -> (f64, f64) {
        (self.min_at, self.min_value)
    }

    /// `1 + theta_min >= 0`.
    pub fn is_admissible(&self) -> bool {
        1.0 + self.min_value >= 0.0
    }

    /// Points where the value or the derivative is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Linear { .. } => vec![0.0],
            PotentialKind::SquareWell { half_width, .. } => vec![-half_width, *half_width],
            _ => Vec::new(),
        }
    }

    /// Points where the value itself jumps.
    pub fn jumps(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::SquareWell { half_width, .. } => vec![-half_width, *half_width],
            _ => Vec::new(),
        }
    }

    pub fn is_jump(&self, xi: f64) -> bool {
        self.jumps().iter().any(|&j| j == xi)
    }

    /// Limit of the potential at `xi` approached from the side of `toward`.
    pub fn one_sided(&self, xi: f64, toward: f64) -> (f64, f64) {
        let probe = if toward > xi {
            xi.next_up()
        } else {
            xi.next_down()
        };
        let at = if self.breakpoints().contains(&xi) {
            probe
        } else {
            xi
        };
        (self.value(at), self.derivative(at))
    }

    /// Length scale used to seed searches around the minimum.
    pub fn characteristic_width(&self) -> f64 {
        match &self.kind {
            PotentialKind::Constant { .. } => 1.0,
            PotentialKind::Linear { slope } => (1.0 / slope).clamp(1e-3, 1e3),
            PotentialKind::Quadratic { curvature } => (1.0 / curvature.sqrt()).clamp(1e-3, 1e3),
            PotentialKind::SquareWell { half_width, .. } => *half_width,
            PotentialKind::Polynomial { coefficients } => polynomial_reach(coefficients).max(1e-3),
            PotentialKind::Tabulated { table } => {
                let (xs, _) = table.knots();
                0.5 * (xs[xs.len() - 1] - xs[0])
            }
        }
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn horner_derivative(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck)
}

fn polynomial_reach(c: &[f64]) -> f64 {
    let lead = c[c.len() - 1];
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|ck| (ck / lead).abs())
        .fold(0.0, f64::max)
}

fn polynomial_minimum(c: &[f64]) -> Result<(f64, f64)> {
    let mut c = c.to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    let degree = c.len().saturating_sub(1);
    if degree < 2 || degree % 2 == 1 || c[degree] <= 0.0 || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidPotential(
            "polynomial must have even degree >= 2 with a positive leading coefficient".into(),
        ));
    }
    let reach = polynomial_reach(&c);
    let samples = 4096;
    let step = 2.0 * reach / samples as f64;
    let best = (0..=samples)
        .map(|i| -reach + i as f64 * step)
        .min_by(|a, b| horner(&c, *a).total_cmp(&horner(&c, *b)))
        .unwrap_or(0.0);
    let x =
        refine_stationary(|x| horner_derivative(&c, x), best - step, best + step).unwrap_or(best);
    Ok((x, horner(&c, x)))
}

fn tabulated_minimum(t: &MonotoneCubic) -> (f64, f64) {
    let (xs, _) = t.knots();
    let mut best = (xs[0], t.value(xs[0]));
    for w in xs.windows(2) {
        for i in 0..=64 {
            let x = w[0] + (w[1] - w[0]) * i as f64 / 64.0;
            let v = t.value(x);
            if v < best.1 {
                best = (x, v);
            }
        }
    }
    let span = (xs[xs.len() - 1] - xs[0]) / (64.0 * xs.len() as f64);
    match refine_stationary(|x| t.derivative(x), best.0 - span, best.0 + span) {
        Some(x) if t.value(x) <= best.1 => (x, t.value(x)),
        _ => best,
    }
}

fn refine_stationary(df: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (df(a), df(b));
    if !(fa < 0.0 && fb > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if df(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(p: &Potential, x: f64) -> f64 {
        let h = 1e-5 * (1.0 + x.abs());
        (p.value(x + h) - p.value(x - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let pots = [
            Potential::linear(1.3).unwrap(),
            Potential::quadratic(0.7).unwrap(),
            Potential::polynomial(vec![1.0, 0.0, -2.0, 0.0, 1.0]).unwrap(),
            Potential::tabulated(
                (0..41).map(|i| -4.0 + 0.2 * i as f64).collect(),
                (0..41).map(|i| (-4.0 + 0.2 * i as f64).powi(2)).collect(),
            )
            .unwrap(),
        ];
        for p in &pots {
            for &x in &[-2.3, -0.71, 0.37, 1.9] {
                let fd = central_difference(p, x);
                let d = p.derivative(x);
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs().max(1.0),
                    "{p:?} at {x}: {fd} vs {d}"
                );
            }
        }
    }

    #[test]
    fn minima() {
        assert_eq!(Potential::quadratic(2.0).unwrap().minimum(), (0.0, 0.0));
        let dw = Potential::polynomial(vec![1.0, 0.0, -2.0, 0.0, 1.0]).unwrap();
        let (x, v) = dw.minimum();
        assert!((x.abs() - 1.0).abs() < 1e-8 && v.abs() < 1e-12, "{x} {v}");
        let shifted = Potential::polynomial(vec![-1.5, 0.0, 1.0]).unwrap();
        assert!((shifted.minimum().1 + 1.5).abs() < 1e-14);
        assert!(!shifted.is_admissible());
    }

    #[test]
    fn linear_kink_is_one_sided() {
        let p = Potential::linear(2.0).unwrap();
        assert_eq!(p.derivative(1e-9), 2.0);
        assert_eq!(p.derivative(-1e-9), -2.0);
        assert_eq!(p.one_sided(0.0, 1.0).1, 2.0);
        assert_eq!(p.one_sided(0.0, -1.0).1, -2.0);
    }

    #[test]
    fn square_well_one_sided_values() {
        let p = Potential::square_well(1.0, 5.0).unwrap();
        assert_eq!(p.one_sided(1.0, 0.0).0, 0.0);
        assert_eq!(p.one_sided(1.0, 2.0).0, 5.0);
        assert!(p.is_jump(-1.0));
    }

    #[test]
    fn tabulated_mesh_must_increase() {
        assert!(Potential::tabulated(vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]).is_err());
        assert!(Potential::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn monotone_interpolation_has_no_overshoot() {
        let xs = vec![-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0];
        let ys = vec![9.0, 1.0, 0.25, 0.0, 0.25, 1.0, 9.0];
        let t = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for w in xs.windows(2).zip(ys.windows(2)) {
            let ((x0, x1), (y0, y1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            for i in 0..=50 {
                let v = t.value(x0 + (x1 - x0) * i as f64 / 50.0);
                assert!(v >= y0.min(y1) - 1e-14 && v <= y0.max(y1) + 1e-14);
            }
        }
    }

    #[test]
    fn rejects_non_confining() {
        assert!(Potential::linear(-1.0).is_err());
        assert!(Potential::polynomial(vec![0.0, 1.0, 0.0, -1.0]).is_err());
        assert!(Potential::polynomial(vec![0.0, 0.0, -1.0]).is_err());
    }
}
