//! Bracketed scalar root finding (Illinois variant of regula falsi).

use crate::error::{Error, Result};

/// Finds `x` in `[lo, hi]` with `|f(x)| <= tol`, given a sign change over the bracket.
///
/// Returns `Ok(None)` when `f(lo)` and `f(hi)` share a strict sign.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Option<f64>>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.abs() <= tol {
        return Ok(Some(a));
    }
    if fb.abs() <= tol {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    // side of the bracket retained on the previous step: -1 = a, 1 = b
    let mut side = 0i8;
    for _ in 0..max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() <= tol || (b - a).abs() <= f64::EPSILON * x.abs().max(1.0) {
            return Ok(Some(x));
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::NoConvergence(max_iter))
}
