use crate::channels::PmdPhases;
use crate::units::UnitContext;

use super::{PmdModelParams, SignBranch};

/// Rotation angle `Δω·D_p·√L` accumulated over a fiber of length `L`.
pub fn pmd_phase(delta_omega: f64, d_p: f64, length_m: f64) -> f64 {
    delta_omega * d_p * length_m.sqrt()
}

fn loss(mu: f64, length_m: f64) -> f64 {
    (-2.0 * mu * length_m).exp()
}

fn length(t: f64, units: &UnitContext) -> f64 {
    units.group_velocity() * t
}

/// `¼·e^(−2μL)·[cos φh + sin φh − sin φv + cos φv]²`, equal to 1 for an
/// undisturbed, lossless fiber.
pub fn prob_pf(phases: PmdPhases, mu: f64, length_m: f64) -> f64 {
    let (sh, ch) = phases.dphi_h.sin_cos();
    let (sv, cv) = phases.dphi_v.sin_cos();
    let bracket = ch + sh - sv + cv;
    0.25 * loss(mu, length_m) * bracket * bracket
}

/// Opposite-sense rotation term `e^(−2μL)·[cos φ₁ ± sin φ₁]²`.
pub fn prob_pa(t: f64, params: &PmdModelParams, units: &UnitContext) -> f64 {
    let l = length(t, units);
    let phi = pmd_phase(params.delta_omega, params.d_p1, l);
    let (s, c) = phi.sin_cos();
    let b = c + params.sign.factor() * s;
    loss(params.mu, l) * b * b
}

/// Same-sense rotation term `e^(−2μL)·cos² φ₂`.
pub fn prob_psy(t: f64, params: &PmdModelParams, units: &UnitContext) -> f64 {
    let l = length(t, units);
    let phi = pmd_phase(params.delta_omega, params.d_p2, l);
    let c = phi.cos();
    loss(params.mu, l) * c * c
}

/// Weighted sum `a₁·P_a + a₂·P_sy`.
pub fn prob_pasy(t: f64, params: &PmdModelParams, units: &UnitContext) -> f64 {
    params.a1 * prob_pa(t, params, units) + params.a2 * prob_psy(t, params, units)
}

/// Expanded form of the unnormalized overlap for unequal phases:
///
/// `e^(−2μL)·[2 + 2cos φv cos φh − 2 sin(±φh) sin(±φv) − 2 cos φh sin(±φv)
///   + 2 cos φh sin(±φh) − 2 cos φv sin(±φv) + 2 cos φv sin(±φh)]`.
///
/// Equals `4·prob_pf` evaluated at the sign-flipped phases.
pub fn prob_asym(phases: PmdPhases, mu: f64, length_m: f64, sign: SignBranch) -> f64 {
    let s = sign.factor();
    let (ch, cv) = (phases.dphi_h.cos(), phases.dphi_v.cos());
    let (sh, sv) = ((s * phases.dphi_h).sin(), (s * phases.dphi_v).sin());
    let bracket = 2.0 + 2.0 * cv * ch - 2.0 * sh * sv - 2.0 * ch * sv + 2.0 * ch * sh
        - 2.0 * cv * sv
        + 2.0 * cv * sh;
    loss(mu, length_m) * bracket
}

/// `|prob_asym − e^(−2μL)·[4 + 4(φh − φv) − (φh + φv)²]|` on the `+` branch.
///
/// The polynomial is the bracket expanded to second order in the phases,
/// i.e. through `O(L)` when both phases grow as `√L`, so the residual is
/// `O(L^{3/2})`. The loss factor is kept exact.
pub fn asym_series_residual(phases: PmdPhases, mu: f64, length_m: f64) -> f64 {
    let (h, v) = (phases.dphi_h, phases.dphi_v);
    let series = 4.0 + 4.0 * (h - v) - (h + v) * (h + v);
    (prob_asym(phases, mu, length_m, SignBranch::Plus) - loss(mu, length_m) * series).abs()
}
