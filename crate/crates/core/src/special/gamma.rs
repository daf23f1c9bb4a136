use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64 - 1.0);
    }
    sum
}

/// Lanczos approximation for `z >= 0.5`.
fn gamma_right(z: f64) -> f64 {
    let t = z + LANCZOS_G - 0.5;
    let half = t.powf(0.5 * (z - 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(z)
}

pub fn gamma(z: f64) -> Result<f64> {
    if z <= 0.0 && z == z.floor() {
        return Err(Error::GammaPole(z));
    }
    if z == z.floor() && z <= 21.0 {
        return Ok((1..z as u64).map(|k| k as f64).product());
    }
    if z < 0.5 {
        Ok(PI / (sin_pi(z) * gamma_right(1.0 - z)))
    } else {
        Ok(gamma_right(z))
    }
}

/// `1 / Gamma(z)`, entire; zero at the non-positive integers.
pub fn rgamma(z: f64) -> f64 {
    if z <= 0.0 && z == z.floor() {
        return 0.0;
    }
    if z < 0.5 {
        sin_pi(z) * gamma_right(1.0 - z) / PI
    } else {
        1.0 / gamma(z).expect("no poles for z >= 0.5")
    }
}

/// `ln |Gamma(z)|`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if z <= 0.0 && z == z.floor() {
        return Err(Error::GammaPole(z));
    }
    if z < 0.5 {
        return Ok(PI.ln() - sin_pi(z).abs().ln() - ln_gamma(1.0 - z)?);
    }
    let t = z + LANCZOS_G - 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z - 0.5) * t.ln() - t + lanczos_sum(z).ln())
}
