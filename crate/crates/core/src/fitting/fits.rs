use nalgebra::DVector;

use super::lm::{self, LmOutcome};
use super::{DataSeries, ExponentialParams, FitParams, FitResult, FitWarning, ModelKind};
use crate::dynamics::{p3, prob_pasy, CavityModelParams, PmdModelParams};
use crate::error::{Error, Result};
use crate::units::{ps_per_sqrt_km, to_ps_per_sqrt_km, UnitContext};

/// Free parameters of [`fit_pasy`], in the order used by [`Bounds`] and
/// `covariance_diag`.
pub const PASY_PARAMETERS: [&str; 5] = ["d_p1_s_per_sqrt_m", "d_p2_s_per_sqrt_m", "mu_per_m", "a1", "a2"];

/// Free parameters of [`fit_p3`].
pub const P3_PARAMETERS: [&str; 5] = ["kappa1_per_s", "kappa2_per_s", "gamma0_per_s", "w1", "w2"];

// Internal working units: ps/√km and 1/km for the fiber model, 1/ms for
// the cavity rates. Keeps every optimizer coordinate near unity.
const PASY_SCALE: [f64; 5] = [1e12 * 31.622_776_601_683_793, 1e12 * 31.622_776_601_683_793, 1e3, 1.0, 1.0];
const P3_SCALE: [f64; 5] = [1e-3, 1e-3, 1e-3, 1.0, 1.0];

/// Box constraints on the five free parameters, in the SI units of the
/// parameter fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: [f64; 5],
    pub upper: [f64; 5],
}

impl Bounds {
    /// Every parameter `≥ 0`, no upper limit.
    pub fn nonnegative() -> Self {
        Self {
            lower: [0.0; 5],
            upper: [f64::INFINITY; 5],
        }
    }

    fn check(&self, init: &[f64; 5], names: &[&'static str; 5]) -> Result<()> {
        for i in 0..5 {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::Config {
                    field: names[i],
                    message: format!("empty bound interval [{lo}, {hi}]"),
                });
            }
            if !init[i].is_finite() {
                return Err(Error::Config {
                    field: names[i],
                    message: format!("initial value {} is not finite", init[i]),
                });
            }
        }
        Ok(())
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::nonnegative()
    }
}

fn require_points(data: &DataSeries, params: usize, min: usize) -> Result<()> {
    if data.len() < min {
        return Err(Error::Underdetermined {
            points: data.len(),
            params,
        });
    }
    Ok(())
}

struct Fitted {
    x: [f64; 5],
    outcome: LmOutcome,
}

/// Runs the bounded LM in scaled coordinates on `model(t, x)` with `x` in SI.
fn run<M>(data: &DataSeries, init: [f64; 5], bounds: &Bounds, scale: &[f64; 5], model: &M) -> Fitted
where
    M: Fn(f64, &[f64; 5]) -> f64,
{
    let unscale = |y: &DVector<f64>| -> [f64; 5] { std::array::from_fn(|i| y[i] / scale[i]) };
    let residuals = |y: &DVector<f64>| {
        let x = unscale(y);
        DVector::from_iterator(data.len(), data.points().iter().map(|pt| (model(pt.t, &x) - pt.p) / pt.sigma))
    };
    let lower: Vec<f64> = (0..5).map(|i| bounds.lower[i] * scale[i]).collect();
    let upper: Vec<f64> = (0..5).map(|i| bounds.upper[i] * scale[i]).collect();
    let y0 = DVector::from_fn(5, |i, _| init[i] * scale[i]);
    let outcome = lm::minimize(residuals, y0, &lower, &upper);
    Fitted {
        x: unscale(&outcome.x),
        outcome,
    }
}

/// Swaps the two rate parameters together with their weights.
fn swapped(x: [f64; 5]) -> [f64; 5] {
    [x[1], x[0], x[2], x[4], x[3]]
}

/// Fits from `init`; when the result breaks `x₀ ≤ x₁`, refits from the
/// label-swapped start and keeps the best ordered solution.
fn fit_ordered<M>(data: &DataSeries, init: [f64; 5], bounds: &Bounds, scale: &[f64; 5], model: &M) -> (Fitted, bool)
where
    M: Fn(f64, &[f64; 5]) -> f64,
{
    let first = run(data, init, bounds, scale, model);
    if first.x[0] <= first.x[1] {
        return (first, true);
    }
    let second = run(data, swapped(init), bounds, scale, model);
    match (second.x[0] <= second.x[1], second.outcome.cost < first.outcome.cost) {
        (true, _) => (second, true),
        (false, true) => (second, false),
        (false, false) => (first, false),
    }
}

/// Puts parameters within rounding of a bound exactly on it.
fn snap(fitted: &mut Fitted, bounds: &Bounds, scale: &[f64; 5]) {
    for i in 0..5 {
        for b in [bounds.lower[i], bounds.upper[i]] {
            if b.is_finite() && (fitted.x[i] - b).abs() * scale[i] <= 1e-10 * (1.0 + (b * scale[i]).abs()) {
                fitted.x[i] = b;
            }
        }
    }
}

fn finish(
    model: ModelKind,
    params: FitParams,
    data: &DataSeries,
    fitted: Fitted,
    ordered: bool,
    bounds: &Bounds,
    scale: &[f64; 5],
    names: &[&'static str; 5],
) -> FitResult {
    let Fitted { x, outcome } = fitted;
    let mut warnings = Vec::new();
    for i in 0..5 {
        if x[i] == bounds.lower[i] || x[i] == bounds.upper[i] {
            warnings.push(FitWarning::ActiveBound {
                parameter: names[i].to_string(),
            });
        }
    }
    if !outcome.converged {
        warnings.push(FitWarning::NotConverged);
    }
    if !ordered {
        warnings.push(FitWarning::OrderingViolated);
    }
    let covariance_diag = (0..5)
        .map(|i| {
            let v = outcome.inverse_curvature[i] / (scale[i] * scale[i]);
            if v.is_finite() {
                v
            } else {
                f64::MAX
            }
        })
        .collect();
    FitResult {
        model,
        params,
        residual_norm: outcome.cost.sqrt(),
        converged: outcome.converged,
        iterations: outcome.iterations,
        covariance_diag,
        parameter_names: names.iter().map(|s| s.to_string()).collect(),
        warnings,
        n_points: data.len(),
        objective_history: outcome.history,
        data_fingerprint: data.fingerprint(),
    }
}

fn pmd_from(x: &[f64; 5], template: &PmdModelParams) -> PmdModelParams {
    PmdModelParams {
        d_p1: x[0],
        d_p2: x[1],
        mu: x[2],
        a1: x[3],
        a2: x[4],
        ..*template
    }
}

fn cavity_from(x: &[f64; 5], template: &CavityModelParams) -> CavityModelParams {
    CavityModelParams {
        kappa1: x[0],
        kappa2: x[1],
        gamma0: x[2],
        w1: x[3],
        w2: x[4],
        ..*template
    }
}

/// Fits `D_p1, D_p2, μ, a₁, a₂` of the `P_a,sy` model; `Δω`, the sign
/// branch and the refractive index stay fixed at their `init`/`units`
/// values.
pub fn fit_pasy(
    data: &DataSeries,
    init: &PmdModelParams,
    bounds: &Bounds,
    units: &UnitContext,
) -> Result<FitResult> {
    require_points(data, 5, 6)?;
    units.check()?;
    let x0 = [init.d_p1, init.d_p2, init.mu, init.a1, init.a2];
    bounds.check(&x0, &PASY_PARAMETERS)?;
    let model = |t: f64, x: &[f64; 5]| prob_pasy(t, &pmd_from(x, init), units);
    let (mut fitted, ordered) = fit_ordered(data, x0, bounds, &PASY_SCALE, &model);
    snap(&mut fitted, bounds, &PASY_SCALE);
    let params = FitParams::Pmd(pmd_from(&fitted.x, init));
    Ok(finish(ModelKind::Pasy, params, data, fitted, ordered, bounds, &PASY_SCALE, &PASY_PARAMETERS))
}

/// Fits `κ₁, κ₂, γ₀, w₁, w₂` of the `p₃` model. `Λ` is carried over from
/// `init`.
pub fn fit_p3(data: &DataSeries, init: &CavityModelParams, bounds: &Bounds) -> Result<FitResult> {
    require_points(data, 5, 6)?;
    let x0 = [init.kappa1, init.kappa2, init.gamma0, init.w1, init.w2];
    bounds.check(&x0, &P3_PARAMETERS)?;
    let model = |t: f64, x: &[f64; 5]| p3(t, &cavity_from(x, init));
    let (mut fitted, ordered) = fit_ordered(data, x0, bounds, &P3_SCALE, &model);
    snap(&mut fitted, bounds, &P3_SCALE);
    let params = FitParams::Cavity(cavity_from(&fitted.x, init));
    Ok(finish(ModelKind::P3, params, data, fitted, ordered, bounds, &P3_SCALE, &P3_PARAMETERS))
}

/// Closed-form fit of `P₀·e^(−rate·t)`: weighted least squares on `ln p`
/// with weights `(p/σ)²`, the first-order propagation of `σ` into `ln p`.
pub fn fit_exponential(data: &DataSeries) -> Result<FitResult> {
    require_points(data, 2, 2)?;
    for (index, pt) in data.points().iter().enumerate() {
        if pt.p <= 0.0 {
            return Err(Error::NonPositiveData { index, value: pt.p });
        }
    }
    let (mut s, mut st, mut stt, mut sy, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for pt in data.points() {
        let w = (pt.p / pt.sigma).powi(2);
        let y = pt.p.ln();
        s += w;
        st += w * pt.t;
        stt += w * pt.t * pt.t;
        sy += w * y;
        sty += w * pt.t * y;
    }
    let det = s * stt - st * st;
    if !(det > 0.0) {
        return Err(Error::Singular("exponential normal equations".into()));
    }
    let slope = (s * sty - st * sy) / det;
    let intercept = (sy - slope * st) / s;
    let params = ExponentialParams {
        p0: intercept.exp(),
        rate_per_s: -slope,
    };
    let residual_norm = data.weighted_residual_norm(|t| params.eval(t));
    Ok(FitResult {
        model: ModelKind::Exp,
        params: FitParams::Exponential(params),
        residual_norm,
        converged: true,
        iterations: 0,
        covariance_diag: vec![params.p0 * params.p0 * stt / det, s / det],
        parameter_names: vec!["p0".into(), "rate_per_s".into()],
        warnings: Vec::new(),
        n_points: data.len(),
        objective_history: vec![residual_norm * residual_norm],
        data_fingerprint: data.fingerprint(),
    })
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Best nonnegative weights `(w₁, w₂)` of two basis curves and the cost.
fn best_weights(data: &DataSeries, f1: &[f64], f2: &[f64]) -> (f64, f64, f64) {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, pt) in data.points().iter().enumerate() {
        let w = 1.0 / (pt.sigma * pt.sigma);
        a11 += w * f1[k] * f1[k];
        a12 += w * f1[k] * f2[k];
        a22 += w * f2[k] * f2[k];
        b1 += w * f1[k] * pt.p;
        b2 += w * f2[k] * pt.p;
    }
    let cost = |u: f64, v: f64| -> f64 {
        data.points()
            .iter()
            .enumerate()
            .map(|(k, pt)| ((u * f1[k] + v * f2[k] - pt.p) / pt.sigma).powi(2))
            .sum()
    };
    let det = a11 * a22 - a12 * a12;
    let mut candidates = Vec::with_capacity(3);
    if det > 1e-12 * a11 * a22 {
        let u = (a22 * b1 - a12 * b2) / det;
        let v = (a11 * b2 - a12 * b1) / det;
        if u >= 0.0 && v >= 0.0 {
            candidates.push((u, v));
        }
    }
    if a11 > 0.0 {
        candidates.push(((b1 / a11).max(0.0), 0.0));
    }
    if a22 > 0.0 {
        candidates.push((0.0, (b2 / a22).max(0.0)));
    }
    candidates
        .into_iter()
        .map(|(u, v)| (u, v, cost(u, v)))
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .unwrap_or((0.0, 0.0, f64::INFINITY))
}

fn envelope_rate(data: &DataSeries) -> Result<f64> {
    let positive: Vec<_> = data.points().iter().copied().filter(|pt| pt.p > 0.0).collect();
    if positive.len() < 2 {
        return Err(Error::MalformedData("fewer than two positive points to initialize from".into()));
    }
    let fit = fit_exponential(&DataSeries::new(positive)?)?;
    Ok(fit.exponential().map(|e| e.rate_per_s.max(0.0)).unwrap_or(0.0))
}

/// Default starting point for [`fit_pasy`].
///
/// `μ` comes from an exponential pre-fit. `D_p1` and `D_p2` are picked by
/// scanning a log grid (plus zero) for the phase pair whose curves best
/// explain the residual structure, with the weights solved linearly at
/// each grid point.
pub fn initial_pasy(data: &DataSeries, template: &PmdModelParams, units: &UnitContext) -> Result<PmdModelParams> {
    require_points(data, 5, 6)?;
    units.check()?;
    let mu0 = envelope_rate(data)? / (2.0 * units.group_velocity());
    let mut dps = vec![0.0];
    dps.extend(logspace(1e-4, 1.0, 33).into_iter().map(ps_per_sqrt_km));
    let mus: Vec<f64> = [0.5, 0.7, 0.85, 1.0, 1.2, 1.4, 2.0].iter().map(|f| f * mu0).collect();

    let curve = |d_p1: f64, d_p2: f64, mu: f64, a1: f64, a2: f64| -> Vec<f64> {
        let p = PmdModelParams {
            d_p1,
            d_p2,
            mu,
            a1,
            a2,
            ..*template
        };
        data.points().iter().map(|pt| prob_pasy(pt.t, &p, units)).collect()
    };

    let mut best = (f64::INFINITY, *template);
    for &mu in &mus {
        let pa: Vec<Vec<f64>> = dps.iter().map(|&d| curve(d, 0.0, mu, 1.0, 0.0)).collect();
        let psy: Vec<Vec<f64>> = dps.iter().map(|&d| curve(0.0, d, mu, 0.0, 1.0)).collect();
        for (i, &d1) in dps.iter().enumerate() {
            for (j, &d2) in dps.iter().enumerate() {
                let (a1, a2, cost) = best_weights(data, &pa[i], &psy[j]);
                if cost < best.0 {
                    best = (
                        cost,
                        PmdModelParams {
                            d_p1: d1,
                            d_p2: d2,
                            mu,
                            a1,
                            a2,
                            ..*template
                        },
                    );
                }
            }
        }
    }
    let mut init = best.1;
    // weights pinned at zero would freeze their phase
    if init.a1 == 0.0 || init.a2 == 0.0 {
        let total = init.a1 + init.a2;
        init.a1 = 0.5 * total;
        init.a2 = 0.5 * total;
    }
    if to_ps_per_sqrt_km(init.d_p1) > to_ps_per_sqrt_km(init.d_p2) {
        std::mem::swap(&mut init.d_p1, &mut init.d_p2);
        std::mem::swap(&mut init.a1, &mut init.a2);
    }
    Ok(init)
}

/// Default starting point for [`fit_p3`]: `γ₀` near twice the pre-fit
/// envelope rate and `κ₁, κ₂` from a log-grid scan of the oscillation
/// frequencies, weights solved linearly.
pub fn initial_p3(data: &DataSeries, template: &CavityModelParams) -> Result<CavityModelParams> {
    require_points(data, 5, 6)?;
    let rate = envelope_rate(data)?.max(1.0);
    let gammas: Vec<f64> = [0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0, 2.8, 4.0]
        .iter()
        .map(|f| 2.0 * rate * f)
        .collect();
    let span = data.points().last().map(|pt| pt.t).unwrap_or(1.0) - data.points()[0].t;
    let kappa_hi = if span > 0.0 { 50.0 * data.len() as f64 / span } else { 1e6 };
    let mut kappas = vec![0.0];
    kappas.extend(logspace(kappa_hi * 1e-5, kappa_hi, 41));

    let mut best = (f64::INFINITY, *template);
    for &g in &gammas {
        let c1: Vec<Vec<f64>> = kappas
            .iter()
            .map(|&k| data.points().iter().map(|pt| crate::dynamics::p1(pt.t, k, g)).collect())
            .collect();
        let c2: Vec<Vec<f64>> = kappas
            .iter()
            .map(|&k| data.points().iter().map(|pt| crate::dynamics::p2(pt.t, k, g)).collect())
            .collect();
        for (i, &k1) in kappas.iter().enumerate() {
            for (j, &k2) in kappas.iter().enumerate() {
                let (w1, w2, cost) = best_weights(data, &c1[i], &c2[j]);
                if cost < best.0 {
                    best = (
                        cost,
                        CavityModelParams {
                            kappa1: k1,
                            kappa2: k2,
                            gamma0: g,
                            w1,
                            w2,
                            ..*template
                        },
                    );
                }
            }
        }
    }
    let mut init = best.1;
    if init.w1 == 0.0 || init.w2 == 0.0 {
        let total = init.w1 + init.w2;
        init.w1 = 0.5 * total;
        init.w2 = 0.5 * total;
    }
    Ok(init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::classify_regime;
    use crate::dynamics::Regime;
    use crate::fitting::{linspace, DataPoint};

    fn grid() -> Vec<f64> {
        linspace(0.0, 1.5e-3, 50)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn scale_constants() {
        assert!((PASY_SCALE[0] * ps_per_sqrt_km(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_round_trip() {
        let data = DataSeries::from_model(&grid(), |t| 0.95 * (-500.0 * t).exp(), |_| 1.0).unwrap();
        let fit = fit_exponential(&data).unwrap();
        let e = fit.exponential().unwrap();
        assert!((e.p0 - 0.95).abs() < 1e-9);
        assert!((e.rate_per_s - 500.0).abs() < 1e-9);
        assert!(fit.residual_norm < 1e-8);
    }

    #[test]
    fn exponential_matches_weighted_qr() {
        // independent route: QR least squares on the √w-scaled design
        let pts: Vec<DataPoint> = [(0.0, 1.0, 0.1), (1.0, 0.7, 0.05), (2.0, 0.3, 0.02), (3.5, 0.2, 0.04)]
            .iter()
            .map(|&(t, p, sigma)| DataPoint { t, p, sigma })
            .collect();
        let data = DataSeries::new(pts.clone()).unwrap();
        let fit = fit_exponential(&data).unwrap();
        let a = nalgebra::DMatrix::from_fn(4, 2, |i, j| {
            let sw = pts[i].p / pts[i].sigma;
            if j == 0 {
                sw
            } else {
                sw * pts[i].t
            }
        });
        let b = nalgebra::DVector::from_fn(4, |i, _| pts[i].p / pts[i].sigma * pts[i].p.ln());
        let qr = a.qr();
        let coef = qr.r().solve_upper_triangular(&(qr.q().transpose() * b)).unwrap();
        let e = fit.exponential().unwrap();
        assert!((e.p0.ln() - coef[0]).abs() < 1e-12);
        assert!((e.rate_per_s + coef[1]).abs() < 1e-12);
    }

    #[test]
    fn exponential_edge_cases() {
        let flat = DataSeries::unweighted(&[0.0, 1.0, 2.0, 3.0], &[0.4; 4]).unwrap();
        let e = *fit_exponential(&flat).unwrap().exponential().unwrap();
        assert!(e.rate_per_s.abs() < 1e-12);
        assert!((e.p0 - 0.4).abs() < 1e-12);

        let two = DataSeries::unweighted(&[0.0, 2.0], &[0.8, 0.2]).unwrap();
        let e = *fit_exponential(&two).unwrap().exponential().unwrap();
        assert!((e.eval(0.0) - 0.8).abs() < 1e-12 && (e.eval(2.0) - 0.2).abs() < 1e-12);

        let bad = DataSeries::unweighted(&[0.0, 1.0, 2.0], &[0.5, 0.0, 0.1]).unwrap();
        assert!(matches!(fit_exponential(&bad), Err(Error::NonPositiveData { index: 1, .. })));
        let one = DataSeries::unweighted(&[0.0], &[0.5]).unwrap();
        assert!(matches!(fit_exponential(&one), Err(Error::Underdetermined { .. })));
    }

    #[test]
    fn underdetermined_nonlinear() {
        let data = DataSeries::unweighted(&[0.0, 1e-4, 2e-4, 3e-4, 4e-4], &[1.0, 0.9, 0.8, 0.7, 0.6]).unwrap();
        let err = fit_p3(&data, &CavityModelParams::published(), &Bounds::default()).unwrap_err();
        assert!(matches!(err, Error::Underdetermined { points: 5, params: 5 }));
        let err = fit_pasy(&data, &PmdModelParams::published(), &Bounds::default(), &UnitContext::default())
            .unwrap_err();
        assert!(matches!(err, Error::Underdetermined { .. }));
    }

    #[test]
    fn p3_noiseless_round_trip_from_default_init() {
        let truth = CavityModelParams::published();
        let data = DataSeries::from_model(&grid(), |t| p3(t, &truth), |_| 1.0).unwrap();
        let init = initial_p3(&data, &truth).unwrap();
        let fit = fit_p3(&data, &init, &Bounds::default()).unwrap();
        let c = fit.cavity().unwrap();
        assert!(fit.converged, "{fit:?}");
        for (got, want) in [
            (c.kappa1, truth.kappa1),
            (c.kappa2, truth.kappa2),
            (c.gamma0, truth.gamma0),
            (c.w1, truth.w1),
            (c.w2, truth.w2),
        ] {
            assert!(rel(got, want) < 1e-2, "{got} vs {want}");
        }
        assert!(fit.residual_norm < 1e-8);
        assert_eq!(classify_regime(c.total_kappa(), c.gamma0).regime, Regime::NonMarkovian);
    }

    #[test]
    fn p3_swapped_start_is_label_sorted() {
        let truth = CavityModelParams::published();
        let data = DataSeries::from_model(&grid(), |t| p3(t, &truth), |_| 1.0).unwrap();
        let init = CavityModelParams {
            kappa1: truth.kappa2,
            kappa2: truth.kappa1,
            ..truth
        };
        let fit = fit_p3(&data, &init, &Bounds::default()).unwrap();
        let c = fit.cavity().unwrap();
        assert!(c.kappa1 <= c.kappa2);
        assert!(rel(c.kappa2, truth.kappa2) < 1e-2);
    }

    #[test]
    fn pasy_noiseless_round_trip_from_default_init() {
        let truth = PmdModelParams::published();
        let units = UnitContext::default();
        let data = DataSeries::from_model(&grid(), |t| prob_pasy(t, &truth, &units), |_| 1.0).unwrap();
        let init = initial_pasy(&data, &truth, &units).unwrap();
        let fit = fit_pasy(&data, &init, &Bounds::default(), &units).unwrap();
        let p = fit.pmd().unwrap();
        for (got, want) in [
            (p.d_p1, truth.d_p1),
            (p.d_p2, truth.d_p2),
            (p.mu, truth.mu),
            (p.a1, truth.a1),
            (p.a2, truth.a2),
        ] {
            assert!(rel(got, want) < 1e-2, "{got} vs {want}: {fit:?}");
        }
        assert!(fit.residual_norm < 1e-8);
    }

    #[test]
    fn pasy_zero_dispersion_pins_bound() {
        let truth = PmdModelParams {
            d_p1: 0.0,
            ..PmdModelParams::published()
        };
        let units = UnitContext::default();
        let data = DataSeries::from_model(&grid(), |t| prob_pasy(t, &truth, &units), |_| 1.0).unwrap();
        let fit = fit_pasy(&data, &PmdModelParams::published(), &Bounds::default(), &units).unwrap();
        assert_eq!(fit.pmd().unwrap().d_p1, 0.0);
        assert!(fit.has_active_bound("d_p1_s_per_sqrt_m"), "{:?}", fit.warnings);
    }

    #[test]
    fn fitted_parameters_stay_in_bounds() {
        let truth = CavityModelParams::published();
        let data = DataSeries::from_model(&grid(), |t| p3(t, &truth), |_| 1.0).unwrap();
        let bounds = Bounds {
            lower: [0.0, 0.0, 0.0, 0.0, 0.0],
            upper: [f64::INFINITY, 3000.0, f64::INFINITY, 1.0, 1.0],
        };
        let fit = fit_p3(&data, &truth, &bounds).unwrap();
        let c = fit.cavity().unwrap();
        assert!(c.kappa2 <= 3000.0);
        assert!(fit.has_active_bound("kappa2_per_s"));
        assert!(fit.covariance_diag.iter().all(|v| v.is_finite()));
        assert!(fit.residual_norm.is_finite());
    }
}
