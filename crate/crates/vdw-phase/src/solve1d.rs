//! Bracketed scalar root finding: bisection with safeguarded Newton polish.

use crate::{Error, Result};

pub const ROOT_TOL: f64 = 1e-13;
pub const MAX_ITER: usize = 200;

/// Root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite signs.
///
/// Bisection narrows the bracket; whenever the Newton step from the current
/// midpoint stays inside the bracket it is taken instead, so convergence is
/// quadratic near simple roots while remaining unconditionally safe.
pub fn bracketed_root<F, D>(mut f: F, mut df: D, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence {
            what: format!("bracketed_root: no sign change on [{a}, {b}]"),
            residual: fa.abs().min(fb.abs()),
            iterations: 0,
        });
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if (b - a).abs() <= ROOT_TOL {
            return Ok(0.5 * (a + b));
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    Ok(0.5 * (a + b))
}

/// Newton polish of an already-bracketed simple root; falls back to the seed
/// if the iteration leaves `[lo, hi]`.
pub fn polish_root<F, D>(mut f: F, mut df: D, seed: f64, lo: f64, hi: f64) -> f64
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut x = seed;
    for _ in 0..8 {
        let d = df(x);
        if d == 0.0 {
            break;
        }
        let step = f(x) / d;
        let next = x - step;
        if !(lo..=hi).contains(&next) {
            break;
        }
        x = next;
        if step.abs() <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = bracketed_root(|x| x * x * x - 2.0, |x| 3.0 * x * x, 1.0, 2.0).unwrap();
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(bracketed_root(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0).is_err());
    }
}
