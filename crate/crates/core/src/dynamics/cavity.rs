use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::CavityModelParams;

const BOUNDARY_REL_TOL: f64 = 1e-12;

/// Damped Rabi probability `e^(−γ₀t/2)·[cos(δt/4) + (γ₀/δ)·sin(δt/4)]²`
/// with `δ = √(16κ² − γ₀²)`, normalized so `p(0) = 1`.
///
/// For `4κ < γ₀` the harmonics become hyperbolic with `|δ|`; at `4κ = γ₀`
/// the analytic limit `e^(−γ₀t/2)·(1 + γ₀t/4)²` is used.
pub fn cavity_p(t: f64, kappa: f64, gamma0: f64) -> f64 {
    let envelope = (-gamma0 * t / 2.0).exp();
    let disc = 16.0 * kappa * kappa - gamma0 * gamma0;
    let bracket = if disc > 0.0 {
        let delta = disc.sqrt();
        let x = delta * t / 4.0;
        x.cos() + gamma0 / delta * x.sin()
    } else if disc < 0.0 {
        let delta = (-disc).sqrt();
        let x = delta * t / 4.0;
        x.cosh() + gamma0 / delta * x.sinh()
    } else {
        1.0 + gamma0 * t / 4.0
    };
    envelope * bracket * bracket
}

/// `e^(−γ₀t/2)·[cos(κ₁t/√2) + sin(κ₁t/√2)]²`, the `γ₀ = 4κ/√2` case.
pub fn p1(t: f64, kappa1: f64, gamma0: f64) -> f64 {
    let x = kappa1 * t / SQRT_2;
    let b = x.cos() + x.sin();
    (-gamma0 * t / 2.0).exp() * b * b
}

/// `e^(−γ₀t/2)·cos²(κ₂t)`, the weak-reservoir limit.
pub fn p2(t: f64, kappa2: f64, gamma0: f64) -> f64 {
    let c = (kappa2 * t).cos();
    (-gamma0 * t / 2.0).exp() * c * c
}

/// `w₁·p₁ + w₂·p₂` sharing one `γ₀`.
pub fn p3(t: f64, params: &CavityModelParams) -> f64 {
    params.w1 * p1(t, params.kappa1, params.gamma0) + params.w2 * p2(t, params.kappa2, params.gamma0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Markovian,
    NonMarkovian,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `|δ| = √|16κ² − γ₀²|` in s⁻¹.
    pub delta: f64,
    /// True when `δ` is imaginary (Markovian side).
    pub delta_imaginary: bool,
}

/// Non-Markovian iff `4κ > γ₀`; equality within 1e-12 relative is the boundary.
pub fn classify_regime(kappa: f64, gamma0: f64) -> RegimeReport {
    let four_kappa = 4.0 * kappa;
    let scale = four_kappa.abs().max(gamma0.abs());
    let regime = if (four_kappa - gamma0).abs() <= BOUNDARY_REL_TOL * scale {
        Regime::Boundary
    } else if four_kappa > gamma0 {
        Regime::NonMarkovian
    } else {
        Regime::Markovian
    };
    let disc = (four_kappa - gamma0) * (four_kappa + gamma0);
    let delta = match regime {
        Regime::Boundary => 0.0,
        _ => disc.abs().sqrt(),
    };
    RegimeReport {
        regime,
        delta,
        delta_imaginary: regime == Regime::Markovian,
    }
}

/// Lorentzian reservoir `γ₀Λ² / ((ω₀ − ω)² + Λ²)`.
pub fn lorentzian_spectral_density(omega: f64, omega0: f64, gamma0: f64, lambda_width: f64) -> f64 {
    let detuning = omega0 - omega;
    gamma0 * lambda_width * lambda_width / (detuning * detuning + lambda_width * lambda_width)
}

/// Memoryless decay `P₀·e^(−rate·t)`.
pub fn markovian_exponential(t: f64, p0: f64, rate: f64) -> f64 {
    p0 * (-rate * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn cavity_at_zero_is_one() {
        for (k, g) in [(4281.0, 16292.0), (1.0, 100.0), (25.0, 100.0), (0.0, 0.0)] {
            close(cavity_p(0.0, k, g), 1.0, 1e-15);
        }
    }

    #[test]
    fn cavity_without_reservoir_is_rabi() {
        for t in [1e-4, 3e-4, 1e-3] {
            let k = 3000.0;
            close(cavity_p(t, k, 0.0), (k * t).cos().powi(2), 1e-12);
        }
    }

    #[test]
    fn fitted_coupling_delta() {
        let report = classify_regime(4281.0, 16292.0);
        assert_eq!(report.regime, Regime::NonMarkovian);
        // √(16·4281² − 16292²) = √27802112
        close(report.delta, 5_272.770_808_6, 1e-6);
        assert!(!report.delta_imaginary);
    }

    #[test]
    fn regime_cases() {
        let m = classify_regime(1.0, 100.0);
        assert_eq!(m.regime, Regime::Markovian);
        assert!(m.delta_imaginary);
        close(m.delta, (100.0f64 * 100.0 - 16.0).sqrt(), 1e-12);

        let b = classify_regime(25.0, 100.0);
        assert_eq!(b.regime, Regime::Boundary);
        assert_eq!(b.delta, 0.0);

        assert_eq!(classify_regime(0.0, 0.0).regime, Regime::Boundary);
    }

    #[test]
    fn regime_scale_invariant() {
        for (k, g) in [(4281.0, 16292.0), (1.0, 100.0), (25.0, 100.0), (30.0, 100.0)] {
            let base = classify_regime(k, g).regime;
            for s in [1e-6, 0.37, 12.0, 1e7] {
                assert_eq!(classify_regime(s * k, s * g).regime, base, "s={s}");
            }
        }
    }

    #[test]
    fn p1_values() {
        close(p1(0.0, 753.0, 16292.0), 1.0, 1e-15);
        let k = 753.0;
        let t = FRAC_PI_4 * SQRT_2 / k;
        close(p1(t, k, 0.0), 2.0, 1e-12);
    }

    #[test]
    fn p1_is_cavity_at_sqrt2() {
        // γ₀ = 4κ/√2 gives δ = 4κ/√2 and γ₀/δ = 1
        let k = 753.0;
        let g = 4.0 * k / SQRT_2;
        for i in 0..200 {
            let t = i as f64 * 2e-5;
            close(cavity_p(t, k, g), p1(t, k, g), 1e-12);
        }
    }

    #[test]
    fn p2_values() {
        close(p2(0.0, 3528.0, 16292.0), 1.0, 1e-15);
        close(p2(FRAC_PI_2 / 3528.0, 3528.0, 0.0), 0.0, 1e-15);
        // exp(-0.8146) * cos²(0.3528) = 0.442828 * 0.880584
        close(p2(1e-4, 3528.0, 16292.0), 0.389949, 1e-6);
    }

    #[test]
    fn cavity_large_n_tends_to_p2() {
        let k = 3528.0;
        for n in [1000.0, 5000.0, 1e4] {
            let g = 4.0 * k / n;
            for i in 0..=1500 {
                let t = i as f64 * 1e-6;
                let diff = (cavity_p(t, k, g) - p2(t, k, g)).abs();
                assert!(diff < 1e-3, "n={n} t={t} diff={diff}");
            }
        }
    }

    #[test]
    fn cavity_continuous_at_boundary() {
        let g = 16292.0;
        let k0 = g / 4.0;
        for i in 0..=100 {
            let t = i as f64 * 0.1 / g;
            let lo = cavity_p(t, k0 * (1.0 - 1e-6), g);
            let hi = cavity_p(t, k0 * (1.0 + 1e-6), g);
            let at = cavity_p(t, k0, g);
            assert!((lo - hi).abs() < 1e-4 * at.max(lo), "t={t}");
            assert!((at - (-g * t / 2.0).exp() * (1.0 + g * t / 4.0).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn p3_weights() {
        let mut p = CavityModelParams::published();
        p.w1 = 0.4;
        p.w2 = 0.5;
        close(p3(0.0, &p), 0.9, 1e-15);
        p.w2 = 0.0;
        close(p3(2e-4, &p), 0.4 * p1(2e-4, p.kappa1, p.gamma0), 1e-15);
    }

    // Hand-differentiated p₁ and p₂. With E = e^(−γ₀t/2):
    //   p₁' = E·[−γ₀/2·(cos x + sin x)² + 2a·cos 2x],  x = at, a = κ₁/√2
    //   p₂' = E·[−γ₀/2·cos²(κ₂t) − κ₂·sin 2κ₂t]
    // The second terms are the harmonic contributions; their amplitudes are
    // 2a = √2·κ₁ and κ₂.
    #[test]
    fn p2_harmonic_dominates_p1() {
        let p = CavityModelParams::published();
        let a = p.kappa1 / SQRT_2;
        let mut max1 = 0.0f64;
        let mut max2 = 0.0f64;
        for i in 0..=3000 {
            let t = i as f64 * 1e-6;
            let env = (-p.gamma0 * t / 2.0).exp();
            let h1 = 2.0 * a * (2.0 * a * t).cos();
            let h2 = -p.kappa2 * (2.0 * p.kappa2 * t).sin();
            max1 = max1.max(h1.abs());
            max2 = max2.max(h2.abs());

            if t > 0.0 {
                let h = 1e-9;
                let fd1 = (p1(t + h, p.kappa1, p.gamma0) - p1(t - h, p.kappa1, p.gamma0)) / (2.0 * h);
                let b1 = (a * t).cos() + (a * t).sin();
                let exact1 = env * (-p.gamma0 / 2.0 * b1 * b1 + h1);
                assert!((fd1 - exact1).abs() < 1e-4 * exact1.abs().max(1.0), "t={t}");
                let fd2 = (p2(t + h, p.kappa2, p.gamma0) - p2(t - h, p.kappa2, p.gamma0)) / (2.0 * h);
                let exact2 = env * (-p.gamma0 / 2.0 * (p.kappa2 * t).cos().powi(2) + h2);
                assert!((fd2 - exact2).abs() < 1e-4 * exact2.abs().max(1.0), "t={t}");
            }
        }
        assert!(max2 > max1, "{max2} <= {max1}");
    }

    #[test]
    fn lorentzian_values() {
        close(lorentzian_spectral_density(5.0, 5.0, 16292.0, 100.0), 16292.0, 1e-9);
        close(lorentzian_spectral_density(105.0, 5.0, 16292.0, 100.0), 8146.0, 1e-9);
        let wide = lorentzian_spectral_density(1.0, 0.0, 16292.0, 1e6);
        assert!((wide - 16292.0).abs() / 16292.0 <= 1.001e-12);
    }

    #[test]
    fn exponential_values() {
        close(markovian_exponential(0.0, 0.9, 123.0), 0.9, 1e-15);
        close(markovian_exponential(5.0, 0.7, 0.0), 0.7, 1e-15);
        // L = ln 3 / (2μ) with μ = 0.006/km
        let mu = 6e-6;
        let l = 3f64.ln() / (2.0 * mu);
        close(l / 1000.0, 91.551, 1e-3);
        close(markovian_exponential(l, 1.0, 2.0 * mu), 1.0 / 3.0, 1e-14);
    }

    #[test]
    fn models_nonnegative() {
        let p = CavityModelParams::published();
        for (k, g) in [(4281.0, 16292.0), (1.0, 100.0), (25.0, 100.0)] {
            for i in 0..=2000 {
                let t = i as f64 * 1e-6;
                assert!(cavity_p(t, k, g) >= 0.0);
                assert!(p3(t, &p) >= 0.0);
            }
        }
    }
}
