//! Piecewise-constant transfer matrices and the finite-`N` phase sum.
//!
//! On a segment with constant `theta_n` the spinor at the left end is
//! `M_n` times the spinor at the right end, and the ratio `P = -psi2/psi1`
//! obeys `P_n / lambda_n = tan(atan(P_{n+1} / lambda_n) - kappa_n delta_n)`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::State;
use crate::potential::Potential;
use crate::quantization::SpinorProvider;
use crate::shooting::{trial_shot, RatioValue};
use crate::turning::{find_turning_points, TurningPoints};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagRule {
    #[default]
    Midpoint,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Uniform,
    /// Chebyshev-like clustering toward both turning points.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    pub left: f64,
    pub width: f64,
    pub tag: f64,
    pub theta: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl Segment {
    pub fn new(index: usize, left: f64, width: f64, tag: f64, theta: f64, epsilon: f64) -> Self {
        let (e, m) = (epsilon.abs(), 1.0 + theta);
        let kappa = ((e - m) * (e + m)).max(0.0).sqrt();
        let lambda = ((e - m) / (e + m)).max(0.0).sqrt();
        Self {
            index,
            left,
            width,
            tag,
            theta,
            kappa,
            lambda,
        }
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn phase(&self) -> f64 {
        self.kappa * self.width
    }
}

/// Segment boundaries `xi_1 < ... < xi_{N+1}` and tags.
pub fn partition(
    tp: TurningPoints,
    n: usize,
    rule: TagRule,
    spacing: Spacing,
) -> Result<Vec<(f64, f64, f64)>> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 segments, got {n}"
        )));
    }
    if !(tp.left < tp.right) {
        return Err(Error::InvalidGrid(format!(
            "empty interval ({}, {})",
            tp.left, tp.right
        )));
    }
    let width = tp.width();
    let node = |k: usize| match spacing {
        _ if k == 0 => tp.left,
        _ if k == n => tp.right,
        Spacing::Uniform => tp.left + width * k as f64 / n as f64,
        Spacing::Cosine => tp.left + 0.5 * width * (1.0 - (PI * k as f64 / n as f64).cos()),
    };
    Ok((0..n)
        .map(|k| {
            let (a, b) = (node(k), node(k + 1));
            let tag = match rule {
                TagRule::Midpoint => 0.5 * (a + b),
                TagRule::Left => a,
                TagRule::Right => b,
            };
            (a, b - a, tag)
        })
        .collect())
}

/// Uniform grid between the turning points with `kappa`, `lambda` at tags.
pub fn build_grid(
    pot: &Potential,
    epsilon: f64,
    tp: TurningPoints,
    n: usize,
    rule: TagRule,
) -> Result<Vec<Segment>> {
    build_grid_with(pot, epsilon, tp, n, rule, Spacing::Uniform)
}

pub fn build_grid_with(
    pot: &Potential,
    epsilon: f64,
    tp: TurningPoints,
    n: usize,
    rule: TagRule,
    spacing: Spacing,
) -> Result<Vec<Segment>> {
    Ok(partition(tp, n, rule, spacing)?
        .into_iter()
        .enumerate()
        .map(|(i, (left, width, tag))| Segment::new(i, left, width, tag, pot.value(tag), epsilon))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub entries: [[f64; 2]; 2],
}

impl TransferMatrix {
    pub fn identity() -> Self {
        Self {
            entries: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, psi: State) -> State {
        let m = self.entries;
        [
            m[0][0] * psi[0] + m[0][1] * psi[1],
            m[1][0] * psi[0] + m[1][1] * psi[1],
        ]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.entries, other.entries);
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { entries: c }
    }
}

/// `[[cos kd, -sin kd / lambda], [lambda sin kd, cos kd]]`.
pub fn segment_matrix(s: &Segment) -> Result<TransferMatrix> {
    if !(s.lambda > 0.0) {
        return Err(Error::SingularSegment { index: s.index });
    }
    let (sin, cos) = s.phase().sin_cos();
    Ok(TransferMatrix {
        entries: [[cos, -sin / s.lambda], [s.lambda * sin, cos]],
    })
}

/// Spinor at the left end from the spinor at the right end.
pub fn propagate(matrices: &[TransferMatrix], boundary: State) -> Result<State> {
    if matrices.is_empty() {
        return Err(Error::Shape {
            expected: 1,
            got: 0,
        });
    }
    Ok(matrices.iter().rev().fold(boundary, |psi, m| m.apply(psi)))
}

/// Ordered product `M_1 M_2 ... M_N`.
pub fn product(matrices: &[TransferMatrix]) -> TransferMatrix {
    matrices
        .iter()
        .fold(TransferMatrix::identity(), |acc, m| acc.mul(m))
}

/// `P_n` from `P_{n+1}`; a pole marker where `psi1` vanishes at `xi_n`.
pub fn recurrence_step(p_next: f64, s: &Segment) -> RatioValue {
    let angle = (p_next / s.lambda).atan() - s.phase();
    let (sin, cos) = angle.sin_cos();
    if cos.abs() <= 1e-15 * sin.abs() {
        RatioValue::Pole
    } else {
        RatioValue::Finite(s.lambda * sin / cos)
    }
}

/// Phase bookkeeping of the finite-`N` identity
/// `sum kappa delta + sum dphi = z pi + atan(P_{N+1}/lambda_N) - atan(P_1/lambda_1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSum {
    pub wkb_term: f64,
    pub subwave_term: f64,
    pub boundary_left: f64,
    pub boundary_right: f64,
    pub z: i64,
    /// Left side minus right side of the identity.
    pub identity_residual: f64,
    pub delta_phi: Vec<f64>,
}

/// `atan(P / lambda')` expressed continuously from `atan(P / lambda) = alpha`.
fn reframe(alpha: f64, lambda: f64, lambda_new: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let (s2, c2) = (s * lambda / lambda_new, c);
    alpha + (c * s2 - s * c2).atan2(c * c2 + s * s2)
}

/// Assembles the phase sum from `P_1, ..., P_{N+1}` sampled at the segment
/// boundaries (infinite entries mark `psi1` nodes).
pub fn discrete_phase_sum(grid: &[Segment], p: &[f64]) -> Result<PhaseSum> {
    if p.len() != grid.len() + 1 {
        return Err(Error::Shape {
            expected: grid.len() + 1,
            got: p.len(),
        });
    }
    if let Some(s) = grid.iter().find(|s| !(s.lambda > 0.0)) {
        return Err(Error::SingularSegment { index: s.index });
    }
    let n = grid.len();
    let wkb_term: f64 = grid.iter().map(Segment::phase).sum();
    let delta_phi: Vec<f64> = (0..n - 1)
        .map(|k| (p[k + 1] / grid[k + 1].lambda).atan() - (p[k + 1] / grid[k].lambda).atan())
        .collect();
    let subwave_term: f64 = delta_phi.iter().sum();
    let boundary_left = (p[0] / grid[0].lambda).atan();
    let boundary_right = (p[n] / grid[n - 1].lambda).atan();
    let excess = wkb_term + subwave_term - boundary_right + boundary_left;
    let z = (excess / PI).round() as i64;
    Ok(PhaseSum {
        wkb_term,
        subwave_term,
        boundary_left,
        boundary_right,
        z,
        identity_residual: excess - z as f64 * PI,
        delta_phi,
    })
}

/// Runs the recurrence from `P_{N+1}` to `P_1` as a continuous angle, so
/// `psi1` nodes pass through without special cases; `z` counts the
/// pi-crossings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAccumulator {
    /// Lifted `atan(P_n / lambda_n)` for `n = 1..=N`.
    pub angles: Vec<f64>,
    pub sum: PhaseSum,
}

pub fn accumulate_phase(grid: &[Segment], p_right: f64) -> Result<PhaseAccumulator> {
    if grid.is_empty() {
        return Err(Error::Shape {
            expected: 1,
            got: 0,
        });
    }
    if let Some(s) = grid.iter().find(|s| !(s.lambda > 0.0)) {
        return Err(Error::SingularSegment { index: s.index });
    }
    let n = grid.len();
    let boundary_right = (p_right / grid[n - 1].lambda).atan();
    let mut alpha = boundary_right;
    let mut angles = vec![0.0; n];
    let mut delta_phi = vec![0.0; n - 1];
    for k in (0..n).rev() {
        alpha -= grid[k].phase();
        angles[k] = alpha;
        if k > 0 {
            let moved = reframe(alpha, grid[k].lambda, grid[k - 1].lambda);
            delta_phi[k - 1] = alpha - moved;
            alpha = moved;
        }
    }
    let lifted_left = angles[0];
    let boundary_left = lifted_left.sin().atan2(lifted_left.cos());
    let boundary_left = if boundary_left > PI / 2.0 {
        boundary_left - PI
    } else if boundary_left <= -PI / 2.0 {
        boundary_left + PI
    } else {
        boundary_left
    };
    let z = ((boundary_left - lifted_left) / PI).round() as i64;
    let wkb_term: f64 = grid.iter().map(Segment::phase).sum();
    let subwave_term: f64 = delta_phi.iter().sum();
    let excess = wkb_term + subwave_term - boundary_right + boundary_left;
    Ok(PhaseAccumulator {
        angles,
        sum: PhaseSum {
            wkb_term,
            subwave_term,
            boundary_left,
            boundary_right,
            z,
            identity_residual: excess - z as f64 * PI,
            delta_phi,
        },
    })
}

/// `P` at the segment boundaries from a spinor provider.
pub fn sample_ratios<S: SpinorProvider + ?Sized>(grid: &[Segment], provider: &S) -> Vec<f64> {
    let mut xs: Vec<f64> = grid.iter().map(|s| s.left).collect();
    if let Some(last) = grid.last() {
        xs.push(last.right());
    }
    xs.iter()
        .map(|&x| {
            let y = provider.spinor(x);
            if y[0] == 0.0 {
                f64::INFINITY
            } else {
                -y[1] / y[0]
            }
        })
        .collect()
}

/// Residual `sum kappa delta + sum dphi - atan(P_R/lambda_N) + atan(P_L/lambda_1) - n pi`
/// with the boundary ratios of the decaying solutions at `epsilon`.
pub fn discrete_residual(
    pot: &Potential,
    epsilon: f64,
    segments: usize,
    level: usize,
) -> Result<f64> {
    let shot = trial_shot(pot, epsilon)?;
    let grid = build_grid(
        pot,
        epsilon,
        shot.turning_points,
        segments,
        TagRule::Midpoint,
    )?;
    let ratio = |x: f64| {
        let y = shot.eval(x);
        -y[1] / y[0]
    };
    let acc = accumulate_phase(&grid, ratio(shot.turning_points.right))?;
    // Propagating P_R leftward must land on P_L, n branches of pi away.
    let target = (ratio(shot.turning_points.left) / grid[0].lambda).atan();
    Ok(target - acc.angles[0] - level as f64 * PI)
}

/// Energies where the finite-`N` condition holds, one per level.
pub fn discrete_levels(
    pot: &Potential,
    levels: &[usize],
    bracket: (f64, f64),
    segments: usize,
) -> Result<Vec<f64>> {
    let (lo, hi) = bracket;
    let scan = 128;
    let grid: Vec<f64> = (0..=scan)
        .map(|i| lo + (hi - lo) * i as f64 / scan as f64)
        .collect();
    let mut out = Vec::new();
    for &n in levels {
        let f = |e: f64| discrete_residual(pot, e, segments, n);
        let values = grid.iter().map(|&e| f(e)).collect::<Result<Vec<_>>>()?;
        let i = (1..grid.len())
            .find(|&i| values[i - 1] * values[i] <= 0.0)
            .ok_or(Error::LevelBracket { n, lo, hi })?;
        out.push(crate::roots::bisect_secant(f, grid[i - 1], grid[i], 1e-13)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPhase {
    pub segments: usize,
    /// `atan(P_{N+1} / lambda_N)`, tends to `pi/2`.
    pub right: f64,
    /// `atan(P_1 / lambda_1)`, tends to `-pi/2`.
    pub left: f64,
}

impl HalfPhase {
    pub fn deviation(&self) -> f64 {
        (PI / 2.0 - self.right)
            .abs()
            .max((PI / 2.0 + self.left).abs())
    }
}

/// Boundary arctangent terms for a sequence of uniform grid sizes.
pub fn half_phase_limit<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    epsilon: f64,
    n_sequence: &[usize],
    provider: &S,
) -> Result<Vec<HalfPhase>> {
    half_phase_limit_with(pot, epsilon, n_sequence, provider, Spacing::Uniform)
}

pub fn half_phase_limit_with<S: SpinorProvider + ?Sized>(
    pot: &Potential,
    epsilon: f64,
    n_sequence: &[usize],
    provider: &S,
    spacing: Spacing,
) -> Result<Vec<HalfPhase>> {
    let tp = find_turning_points(pot, epsilon.abs())?;
    let ratio = |x: f64| {
        let y = provider.spinor(x);
        -y[1] / y[0]
    };
    let (p_left, p_right) = (ratio(tp.left), ratio(tp.right));
    if !(p_left < 0.0 && p_right > 0.0) {
        return Err(Error::SignProperty(format!(
            "expected P(xi_L) < 0 < P(xi_R), got P(xi_L) = {p_left}, P(xi_R) = {p_right}"
        )));
    }
    n_sequence
        .iter()
        .map(|&n| {
            let grid = build_grid_with(pot, epsilon, tp, n, TagRule::Midpoint, spacing)?;
            Ok(HalfPhase {
                segments: n,
                right: (p_right / grid[n - 1].lambda).atan(),
                left: (p_left / grid[0].lambda).atan(),
            })
        })
        .collect()
}

/// Writes `index,kappa,lambda,delta_phi` rows (the last segment has no
/// `delta_phi`).
pub fn write_diagnostics_csv(
    path: impl AsRef<Path>,
    grid: &[Segment],
    sum: &PhaseSum,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "kappa", "lambda", "delta_phi"])?;
    for s in grid {
        let dphi = sum
            .delta_phi
            .get(s.index)
            .map(|v| format!("{v:e}"))
            .unwrap_or_default();
        w.write_record([
            s.index.to_string(),
            format!("{:e}", s.kappa),
            format!("{:e}", s.lambda),
            dphi,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp() -> TurningPoints {
        TurningPoints {
            left: -1.0,
            right: 1.0,
        }
    }

    #[test]
    fn uniform_midpoint_grid() {
        let cells = partition(tp(), 4, TagRule::Midpoint, Spacing::Uniform).unwrap();
        let tags: Vec<f64> = cells.iter().map(|c| c.2).collect();
        assert_eq!(tags, vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(cells.iter().all(|c| c.1 == 0.5));
        let left: Vec<f64> = partition(tp(), 2, TagRule::Left, Spacing::Uniform)
            .unwrap()
            .iter()
            .map(|c| c.2)
            .collect();
        assert_eq!(left, vec![-1.0, 0.0]);
        assert!(matches!(
            partition(tp(), 1, TagRule::Left, Spacing::Uniform),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn cosine_grid_tiles_interval() {
        let cells = partition(tp(), 16, TagRule::Midpoint, Spacing::Cosine).unwrap();
        assert_eq!(cells[0].0, -1.0);
        let last = cells[15];
        assert_eq!(last.0 + last.1, 1.0);
        assert!(cells[0].1 < cells[8].1);
    }

    #[test]
    fn kappa_at_tag() {
        let pot = Potential::quadratic(1.0).unwrap();
        let grid = build_grid(&pot, 2.0, tp(), 4, TagRule::Midpoint).unwrap();
        assert_eq!(grid[0].kappa, (4.0 - 1.5625f64.powi(2)).sqrt());
    }

    #[test]
    fn segment_matrix_examples() {
        let seg = |kappa: f64, width: f64, lambda: f64| Segment {
            index: 0,
            left: 0.0,
            width,
            tag: 0.0,
            theta: 0.0,
            kappa,
            lambda,
        };
        assert_eq!(
            segment_matrix(&seg(1.0, 0.0, 0.7)).unwrap(),
            TransferMatrix::identity()
        );
        let m = segment_matrix(&seg(1.0, PI / 2.0, 1.0)).unwrap().entries;
        assert!(
            (m[0][1] + 1.0).abs() < 1e-15 && (m[1][0] - 1.0).abs() < 1e-15 && m[0][0].abs() < 1e-15
        );
        let m = segment_matrix(&seg(1.0, PI, 2.0)).unwrap().entries;
        assert!((m[0][0] + 1.0).abs() < 1e-15 && m[0][1].abs() < 1e-15 && m[1][0].abs() < 1e-15);
        assert!(matches!(
            segment_matrix(&seg(0.0, 1.0, 0.0)),
            Err(Error::SingularSegment { .. })
        ));
    }

    #[test]
    fn recurrence_examples() {
        let s = Segment {
            index: 0,
            left: 0.0,
            width: 0.3,
            tag: 0.0,
            theta: 0.0,
            kappa: 1.7,
            lambda: 0.6,
        };
        let p = recurrence_step(0.0, &s).finite().unwrap();
        assert!((p + 0.6 * (1.7f64 * 0.3).tan()).abs() < 1e-15);
        let flat = Segment { width: 0.0, ..s };
        assert!((recurrence_step(2.5, &flat).finite().unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn constant_lambda_has_no_subwave() {
        let pot = Potential::square_well(2.0, 6.0).unwrap();
        let grid = build_grid(
            &pot,
            2.0,
            TurningPoints {
                left: -2.0,
                right: 2.0,
            },
            10,
            TagRule::Midpoint,
        )
        .unwrap();
        let p: Vec<f64> = (0..=10).map(|k| 0.3 * k as f64 - 1.0).collect();
        assert_eq!(discrete_phase_sum(&grid, &p).unwrap().subwave_term, 0.0);
        assert!(matches!(
            discrete_phase_sum(&grid, &p[1..]),
            Err(Error::Shape { .. })
        ));
    }
}
