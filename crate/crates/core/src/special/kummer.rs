use crate::error::{Error, Result};

pub const MAX_SERIES_TERMS: usize = 10_000;

/// Confluent hypergeometric function `1F1(a; b; z)`.
///
/// Summed directly for `z >= 0`; negative arguments go through
/// `e^z 1F1(b - a; b; -z)`, whose terms do not alternate.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b == b.floor() {
        return Err(Error::Domain(format!(
            "1F1 lower parameter b = {b} is a non-positive integer"
        )));
    }
    if z < 0.0 {
        return Ok(z.exp() * series(b - a, b, -z)?);
    }
    series(a, b, z)
}

fn series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let settled = z.max(a.abs()).max(b.abs());
    for k in 0..MAX_SERIES_TERMS {
        let k = k as f64;
        term *= (a + k) / (b + k) * z / (k + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if k > settled && term.abs() <= 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        terms: MAX_SERIES_TERMS,
    })
}
