//! Bracketing root finders for scalar functions.

use crate::error::{Error, Result};

/// Plain bisection until the bracket is narrower than `xtol` (or can no
/// longer be split in floating point).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection with secant (Illinois) acceleration; the bracket always shrinks.
pub fn bisect_secant<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    let mut side = 0i8;
    for iter in 0..400 {
        if b - a <= xtol {
            break;
        }
        // every third iteration is a pure bisection to guarantee progress
        let mut c = if iter % 3 == 2 {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
            if c <= a || c >= b {
                break;
            }
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Scans `[lo, hi]` in steps of at most `step` and returns every bracket
/// with a strict sign change.
pub fn scan_brackets<F>(mut f: F, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let count = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut out = Vec::new();
    let mut prev = (lo, f(lo)?);
    for i in 1..=count {
        let x = if i == count {
            hi
        } else {
            lo + i as f64 * (hi - lo) / count as f64
        };
        let fx = f(x)?;
        if prev.1 * fx < 0.0 || (fx == 0.0 && prev.1 != 0.0) {
            out.push((prev.0, x));
        }
        prev = (x, fx);
    }
    Ok(out)
}
