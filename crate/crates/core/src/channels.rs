//! Decoherence channels acting on the buffered (idler) photon.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_range, Result};
use crate::state::{apply_operator, make_werner, r, Arm, DensityMatrix, SingleQubitOperator};

/// Polarization rotation angles picked up by H and V in the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdPhases {
    pub dphi_h: f64,
    pub dphi_v: f64,
}

impl PmdPhases {
    pub fn new(dphi_h: f64, dphi_v: f64) -> Self {
        Self { dphi_h, dphi_v }
    }

    /// Both components rotated by the same angle.
    pub fn symmetric(dphi: f64) -> Self {
        Self::new(dphi, dphi)
    }
}

/// PMD map `H ↦ cos φh·H + sin φh·V`, `V ↦ cos φv·V − sin φv·H` on the idler.
///
/// `M†M = I` only when `sin(φh − φv) = 0`.
pub fn pmd_operator(phases: PmdPhases) -> SingleQubitOperator {
    let (sh, ch) = phases.dphi_h.sin_cos();
    let (sv, cv) = phases.dphi_v.sin_cos();
    let m = Matrix2::new(r(ch), r(-sv), r(sh), r(cv));
    SingleQubitOperator::new(m, Arm::Idler)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDampingParams {
    xi: f64,
}

impl AmplitudeDampingParams {
    pub fn new(xi: f64) -> Result<Self> {
        check_range("damping probability xi", xi, 0.0, 1.0, "[0, 1]")?;
        Ok(Self { xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Kraus pair `(Γ₀, Γ₁)` on the idler; `Γ₁` moves amplitude from V to H.
pub fn amplitude_damping_kraus(
    params: AmplitudeDampingParams,
) -> (SingleQubitOperator, SingleQubitOperator) {
    let xi = params.xi();
    let g0 = Matrix2::new(r(1.0), r(0.0), r(0.0), r((1.0 - xi).sqrt()));
    let g1 = Matrix2::new(r(0.0), r(xi.sqrt()), r(0.0), r(0.0));
    (
        SingleQubitOperator::new(g0, Arm::Idler),
        SingleQubitOperator::new(g1, Arm::Idler),
    )
}

/// Sum of `K ρ K†` over a Kraus set.
pub fn apply_kraus(rho: &DensityMatrix, kraus: &[SingleQubitOperator]) -> DensityMatrix {
    let sum = kraus
        .iter()
        .map(|k| *apply_operator(rho, k).matrix())
        .fold(nalgebra::Matrix4::zeros(), |acc, m| acc + m);
    DensityMatrix::from_matrix(sum)
}

/// Werner state with amplitude damping applied to the idler.
pub fn damp_werner(p: f64, xi: f64) -> Result<DensityMatrix> {
    let w = make_werner(p)?;
    let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(xi)?);
    Ok(apply_kraus(&w, &[g0, g1]))
}

/// Intensity transmission `e^(−2μL)`.
pub fn attenuation_factor(mu: f64, length_m: f64) -> Result<f64> {
    check_nonnegative("loss mu", mu)?;
    check_nonnegative("length L", length_m)?;
    Ok((-2.0 * mu * length_m).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{validate, Mat2, Mat4};
    use std::f64::consts::FRAC_PI_2;

    fn completeness_residual(xi: f64) -> f64 {
        let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(xi).unwrap());
        let sum = g0.entries.adjoint() * g0.entries + g1.entries.adjoint() * g1.entries;
        (sum - Mat2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    // Kraus action on the Werner state worked out by hand: Γ₀ scales every
    // idler-V amplitude by √(1−ξ); Γ₁ moves weight ξ of |xV⟩⟨xV| onto |xH⟩⟨xH|.
    fn closed_form(p: f64, xi: f64) -> Mat4 {
        let (hh, hv) = ((1.0 + p) / 4.0, (1.0 - p) / 4.0);
        let (vh, vv) = ((1.0 - p) / 4.0, (1.0 + p) / 4.0);
        let mut m = Mat4::zeros();
        m[(0, 0)] = r(hh + xi * hv);
        m[(1, 1)] = r((1.0 - xi) * hv);
        m[(2, 2)] = r(vh + xi * vv);
        m[(3, 3)] = r((1.0 - xi) * vv);
        m[(0, 3)] = r(p * (1.0 - xi).sqrt() / 2.0);
        m[(3, 0)] = m[(0, 3)];
        m
    }

    #[test]
    fn pmd_zero_phase_is_identity() {
        let m = pmd_operator(PmdPhases::new(0.0, 0.0));
        assert_eq!(m.entries, Mat2::identity());
    }

    #[test]
    fn pmd_quarter_turn_flips_idler() {
        let m = pmd_operator(PmdPhases::new(FRAC_PI_2, FRAC_PI_2)).entries;
        // H -> V
        assert!((m[(0, 0)].re).abs() < 1e-15 && (m[(1, 0)].re - 1.0).abs() < 1e-15);
        // V -> -H
        assert!((m[(0, 1)].re + 1.0).abs() < 1e-15 && (m[(1, 1)].re).abs() < 1e-15);
    }

    #[test]
    fn pmd_unequal_phases_not_unitary() {
        let op = pmd_operator(PmdPhases::new(0.1, 0.3));
        // off-diagonal of M†M is sin(φh − φv)
        let expected = (0.1f64 - 0.3).sin().abs();
        assert!((op.unitarity_residual() - expected).abs() < 1e-15);
        assert!(op.unitarity_residual() > 0.19);
    }

    #[test]
    fn kraus_edges() {
        let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(0.0).unwrap());
        assert_eq!(g0.entries, Mat2::identity());
        assert_eq!(g1.entries, Mat2::zeros());

        let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(1.0).unwrap());
        assert_eq!(g0.entries, Mat2::new(r(1.0), r(0.0), r(0.0), r(0.0)));
        assert_eq!(g1.entries, Mat2::new(r(0.0), r(1.0), r(0.0), r(0.0)));

        let (g0, _) = amplitude_damping_kraus(AmplitudeDampingParams::new(0.02).unwrap());
        assert!((g0.entries[(1, 1)].re - 0.98995).abs() < 1e-5);
        assert!(completeness_residual(0.02) < 1e-12);
    }

    #[test]
    fn kraus_completeness_grid() {
        for i in 0..=100 {
            assert!(completeness_residual(i as f64 / 100.0) < 1e-12);
        }
    }

    #[test]
    fn kraus_rejects_bad_xi() {
        assert!(AmplitudeDampingParams::new(-0.1).is_err());
        assert!(AmplitudeDampingParams::new(1.5).is_err());
        assert!(damp_werner(0.5, 2.0).is_err());
        assert!(damp_werner(1.5, 0.0).is_err());
    }

    #[test]
    fn damp_without_damping_is_werner() {
        for p in [0.0, 0.3, 0.9, 1.0] {
            assert_eq!(damp_werner(p, 0.0).unwrap(), make_werner(p).unwrap());
        }
    }

    #[test]
    fn damp_matches_closed_form_on_grid() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (p, xi) = (i as f64 / 20.0, j as f64 / 20.0);
                let rho = damp_werner(p, xi).unwrap();
                let diff = (rho.matrix() - closed_form(p, xi)).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(diff < 1e-12, "p={p} xi={xi} diff={diff}");
                assert!(validate(&rho).passed, "p={p} xi={xi}");
            }
        }
    }

    #[test]
    fn damp_corner_value() {
        let rho = damp_werner(0.9, 0.02).unwrap();
        assert!((rho.get(0, 3).re - 0.445477).abs() < 1e-6);
        assert!((rho.get(0, 3).re - 0.45 * 0.98f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn damp_maximally_mixed_is_not_fixed() {
        // amplitude damping is not unital: I/4 -> diag(1+ξ, 1−ξ, 1+ξ, 1−ξ)/4
        for xi in [0.1, 0.5, 1.0] {
            let rho = damp_werner(0.0, xi).unwrap();
            let expected = [1.0 + xi, 1.0 - xi, 1.0 + xi, 1.0 - xi];
            for (i, e) in expected.into_iter().enumerate() {
                assert!((rho.get(i, i).re - e / 4.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn attenuation_values() {
        assert_eq!(attenuation_factor(6.0e-6, 0.0).unwrap(), 1.0);
        assert_eq!(attenuation_factor(0.0, 5.0e4).unwrap(), 1.0);
        let a = attenuation_factor(6.0e-6, 190_000.0).unwrap();
        assert!((a - 0.10228).abs() < 1e-5);
        assert!(attenuation_factor(-1.0, 1.0).is_err());
        assert!(attenuation_factor(1.0, -1.0).is_err());
    }
}
