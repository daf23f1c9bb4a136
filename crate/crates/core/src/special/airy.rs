use std::f64::consts::PI;

use crate::error::Result;
use crate::roots::bisect;

/// `Ai(0)` and `-Ai'(0)`.
const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;
/// Below this argument the oscillatory asymptotic form is used.
const ASYMPTOTIC_BELOW: f64 = -8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
}

/// `Ai(z)` and `Ai'(z)` for `z <= 8`.
pub fn airy_ai(z: f64) -> AiryPair {
    if z < ASYMPTOTIC_BELOW {
        oscillatory(-z)
    } else {
        maclaurin(z)
    }
}

fn maclaurin(z: f64) -> AiryPair {
    if z == 0.0 {
        return AiryPair {
            ai: AI0,
            ai_prime: -AIP0,
        };
    }
    // f = sum z^{3k} / (3k)! * 3^k (1/3)_k, g likewise with z^{3k+1}.
    let z3 = z * z * z;
    let (mut f, mut g) = (1.0, z);
    let (mut fp, mut gp) = (0.0, 1.0f64);
    let (mut tf, mut tg) = (1.0, z);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        fp += k3 * tf / z;
        gp += (k3 + 1.0) * tg / z;
        if tf.abs() < 1e-17 * f.abs().max(1.0) && tg.abs() < 1e-17 * g.abs().max(1.0) {
            break;
        }
    }
    AiryPair {
        ai: AI0 * f - AIP0 * g,
        ai_prime: AI0 * fp - AIP0 * gp,
    }
}

fn oscillatory(x: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let mut u = [1.0f64; 8];
    for k in 1..8 {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
    }
    let v: Vec<f64> = (0..8)
        .map(|k| -(6.0 * k as f64 + 1.0) / (6.0 * k as f64 - 1.0) * u[k])
        .collect();
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..4 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        pu += sign * u[2 * k] / zeta.powi(2 * k as i32);
        qu += sign * u[2 * k + 1] / zeta.powi(2 * k as i32 + 1);
        pv += sign * v[2 * k] / zeta.powi(2 * k as i32);
        qv += sign * v[2 * k + 1] / zeta.powi(2 * k as i32 + 1);
    }
    let phase = zeta - PI / 4.0;
    let (s, c) = phase.sin_cos();
    let norm = PI.sqrt().recip();
    AiryPair {
        ai: norm * x.powf(-0.25) * (c * pu + s * qu),
        ai_prime: norm * x.powf(0.25) * (s * pv - c * qv),
    }
}

fn nth_zero(k: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    let step = 0.05;
    let mut found = 0;
    let mut hi = 0.0;
    let mut f_hi = f(hi);
    loop {
        let lo = hi - step;
        let f_lo = f(lo);
        if f_lo == 0.0 || (f_lo > 0.0) != (f_hi > 0.0) {
            found += 1;
            if found == k {
                return bisect(|z| Ok(f(z)), lo, hi, 1e-15);
            }
        }
        hi = lo;
        f_hi = f_lo;
    }
}

/// The `k`-th zero (1-based) of `Ai`, counted from the origin.
pub fn airy_ai_zero(k: usize) -> Result<f64> {
    nth_zero(k, |z| airy_ai(z).ai)
}

/// The `k`-th zero (1-based) of `Ai'`.
pub fn airy_ai_prime_zero(k: usize) -> Result<f64> {
    nth_zero(k, |z| airy_ai(z).ai_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        let p = airy_ai(0.0);
        assert_eq!(p.ai, AI0);
        assert_eq!(p.ai_prime, -AIP0);
    }

    #[test]
    fn known_values() {
        // Ai(1), Ai'(1), Ai(-2)
        assert!((airy_ai(1.0).ai - 0.135_292_416_312_881_4).abs() < 1e-15);
        assert!((airy_ai(1.0).ai_prime + 0.159_147_441_296_793_2).abs() < 1e-15);
        assert!((airy_ai(-2.0).ai - 0.227_407_428_201_685_6).abs() < 1e-14);
    }

    #[test]
    fn branches_agree_at_switch() {
        let s = maclaurin(-8.0);
        let a = oscillatory(8.0);
        assert!((s.ai - a.ai).abs() < 1e-8, "{} {}", s.ai, a.ai);
        assert!(
            (s.ai_prime - a.ai_prime).abs() < 1e-7,
            "{} {}",
            s.ai_prime,
            a.ai_prime
        );
    }

    #[test]
    fn first_zeros() {
        assert!((airy_ai_zero(1).unwrap() + 2.338_107_410_459_767).abs() < 1e-13);
        assert!((airy_ai_zero(2).unwrap() + 4.087_949_444_130_971).abs() < 1e-12);
        assert!((airy_ai_prime_zero(1).unwrap() + 1.018_792_971_647_471).abs() < 1e-13);
        assert!((airy_ai_prime_zero(2).unwrap() + 3.248_197_582_179_837).abs() < 1e-12);
    }
}
