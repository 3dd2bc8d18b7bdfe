//! Mutual-information split and concurrence of the Werner family, in bits.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// `x·log₂x` with the `0·log 0 = 0` limit.
fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

fn check_p(p: f64) -> Result<f64> {
    check_range("Werner probability", p, 0.0, 1.0, "[0, 1]")
}

/// `I(P) = ¾(1−P)·log₂(1−P) + ¼(1+3P)·log₂(1+3P)`.
pub fn total_correlation(p: f64) -> Result<f64> {
    let p = check_p(p)?;
    Ok(0.75 * xlog2x(1.0 - p) + 0.25 * xlog2x(1.0 + 3.0 * p))
}

/// `C(P) = ½(1−P)·log₂(1−P) + ½(1+P)·log₂(1+P)`.
pub fn classical_correlation(p: f64) -> Result<f64> {
    let p = check_p(p)?;
    Ok(0.5 * xlog2x(1.0 - p) + 0.5 * xlog2x(1.0 + p))
}

/// `Q(P) = I(P) − C(P)`.
pub fn discord(p: f64) -> Result<f64> {
    Ok(total_correlation(p)? - classical_correlation(p)?)
}

/// `max(0, (3P − 1)/2)`.
pub fn concurrence(p: f64) -> Result<f64> {
    let p = check_p(p)?;
    Ok((0.5 * (3.0 * p - 1.0)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub p: f64,
    pub total: f64,
    pub classical: f64,
    pub discord: f64,
    pub concurrence: f64,
}

impl CorrelationReport {
    pub fn at(p: f64) -> Result<Self> {
        let total = total_correlation(p)?;
        let classical = classical_correlation(p)?;
        Ok(Self {
            p,
            total,
            classical,
            discord: total - classical,
            concurrence: concurrence(p)?,
        })
    }
}

/// The Werner probability above which concurrence exceeds discord.
///
/// `discord − concurrence` is positive just above the separability point
/// `P = 1/3` and negative below `P = 1`, where both reach 1; the root in
/// between is bracketed on `[1/3, 0.99]` and bisected to 1e-6.
pub fn discord_concurrence_crossover() -> f64 {
    let gap = |p: f64| discord(p).unwrap() - concurrence(p).unwrap();
    let (mut lo, mut hi) = (1.0 / 3.0, 0.99);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
