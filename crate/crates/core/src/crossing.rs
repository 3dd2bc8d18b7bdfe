//! First-crossing solver for decay curves that may oscillate.

use crate::error::{Error, Result};

/// Number of subintervals scanned before bisecting.
pub const SCAN_POINTS: usize = 10_000;

/// Largest `|model(t*) − level|` accepted at the returned root.
pub const LEVEL_TOL: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

/// Earliest `t` in `[t_lo, t_hi]` where `model(t) = level`.
///
/// The bracket is scanned on a uniform grid of [`SCAN_POINTS`] subintervals
/// to find the first sign change of `model − level`, which is then bisected
/// down to floating-point resolution.
pub fn solve_level_crossing<F>(model: F, level: f64, bracket: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (t_lo, t_hi) = bracket;
    let not_found = Error::NoCrossing { level, t_lo, t_hi };
    if !(t_lo.is_finite() && t_hi.is_finite() && t_hi > t_lo && level.is_finite()) {
        return Err(not_found);
    }
    let f = |t: f64| model(t) - level;

    let step = (t_hi - t_lo) / SCAN_POINTS as f64;
    let mut a = t_lo;
    let mut fa = f(a);
    if fa == 0.0 {
        return Ok(a);
    }
    let mut found = None;
    for i in 1..=SCAN_POINTS {
        let b = if i == SCAN_POINTS { t_hi } else { t_lo + step * i as f64 };
        let fb = f(b);
        if fb == 0.0 || fa.signum() != fb.signum() {
            found = Some((a, fa, b));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut fa, mut b) = found.ok_or(not_found)?;

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        // a model that touches the level and stays there has its first
        // crossing at the left edge of the flat stretch
        if fm != 0.0 && fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let root = 0.5 * (a + b);
    if f(root).abs() < LEVEL_TOL {
        Ok(root)
    } else {
        // sign change without a root: a jump in the model
        Err(Error::NoCrossing { level, t_lo, t_hi })
    }
}
