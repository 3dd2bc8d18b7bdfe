//! Scalar decay models for the Werner probability of the buffered pair.
//!
//! Two families are provided. The PMD family ([`pmd`]) rotates the idler
//! polarization by angles growing as `√L`, on top of an `e^(−2μL)` loss.
//! The cavity family ([`cavity`]) borrows the damped Rabi form of a qubit
//! in a lossy cavity coupled to a Lorentzian reservoir, with harmonics in `t`.

pub mod cavity;
pub mod pmd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, UnitContext};

pub use cavity::{
    cavity_p, classify_regime, lorentzian_spectral_density, markovian_exponential, p1, p2, p3,
    Regime, RegimeReport,
};
pub use pmd::{
    asym_series_residual, pmd_phase, prob_asym, prob_pa, prob_pasy, prob_pf, prob_psy,
};

/// Which of the two rotation senses the `P_a` term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum SignBranch {
    #[default]
    Plus,
    Minus,
}

impl SignBranch {
    pub fn factor(self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for SignBranch {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Self, Self::Error> {
        match value {
            1 => Ok(SignBranch::Plus),
            -1 => Ok(SignBranch::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<SignBranch> for i8 {
    fn from(value: SignBranch) -> Self {
        match value {
            SignBranch::Plus => 1,
            SignBranch::Minus => -1,
        }
    }
}

/// Parameters of the weighted `P_a + P_sy` model, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdModelParams {
    #[serde(rename = "delta_omega_rad_s")]
    pub delta_omega: f64,
    #[serde(rename = "d_p1_s_per_sqrt_m")]
    pub d_p1: f64,
    #[serde(rename = "d_p2_s_per_sqrt_m")]
    pub d_p2: f64,
    #[serde(rename = "mu_per_m")]
    pub mu: f64,
    pub a1: f64,
    pub a2: f64,
    #[serde(default)]
    pub sign: SignBranch,
}

impl PmdModelParams {
    /// Builds parameters from lab units: GHz detuning, ps/√km PMD
    /// coefficients, 1/km loss.
    pub fn from_lab_units(
        delta_f_ghz: f64,
        d_p1_ps_sqrt_km: f64,
        d_p2_ps_sqrt_km: f64,
        mu_per_km: f64,
        a1: f64,
        a2: f64,
    ) -> Result<Self> {
        let params = Self {
            delta_omega: units::ghz_to_rad_per_s(delta_f_ghz),
            d_p1: units::ps_per_sqrt_km(d_p1_ps_sqrt_km),
            d_p2: units::ps_per_sqrt_km(d_p2_ps_sqrt_km),
            mu: units::per_km(mu_per_km),
            a1,
            a2,
            sign: SignBranch::Plus,
        };
        params.check()?;
        Ok(params)
    }

    /// The published fit: Δω = 2π·200 GHz, D_p1 = 0.0017 and
    /// D_p2 = 0.047 ps/√km, μ = 0.006/km, with equal weights summing to 1.
    pub fn published() -> Self {
        Self::from_lab_units(200.0, 0.0017, 0.047, 0.006, 0.5, 0.5)
            .expect("published parameters are valid")
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("delta_omega_rad_s", self.delta_omega),
            ("d_p1_s_per_sqrt_m", self.d_p1),
            ("d_p2_s_per_sqrt_m", self.d_p2),
            ("mu_per_m", self.mu),
            ("a1", self.a1),
            ("a2", self.a2),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(Error::Config {
                    field,
                    message: format!("must be finite, got {value}"),
                });
            }
        }
        for (field, value) in [("mu_per_m", self.mu), ("a1", self.a1), ("a2", self.a2)] {
            if value < 0.0 {
                return Err(Error::Config {
                    field,
                    message: format!("must be nonnegative, got {value}"),
                });
            }
        }
        if self.a1 + self.a2 <= 0.0 {
            return Err(Error::Config {
                field: "a1",
                message: "a1 + a2 must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Parameters of the weighted `p₁ + p₂` cavity model, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityModelParams {
    #[serde(rename = "kappa1_per_s")]
    pub kappa1: f64,
    #[serde(rename = "kappa2_per_s")]
    pub kappa2: f64,
    #[serde(rename = "gamma0_per_s")]
    pub gamma0: f64,
    pub w1: f64,
    pub w2: f64,
    /// Reservoir spectral width Λ. Only enters the spectral density.
    #[serde(rename = "lambda_per_s")]
    pub lambda_width: f64,
}

impl CavityModelParams {
    /// The published fit κ₁ = 753, κ₂ = 3528, γ₀ = 16292 s⁻¹ with equal
    /// weights. Λ is not reported; it is set far above γ₀.
    pub fn published() -> Self {
        Self {
            kappa1: 753.0,
            kappa2: 3528.0,
            gamma0: 16292.0,
            w1: 0.5,
            w2: 0.5,
            lambda_width: 1.0e9,
        }
    }

    /// `κ₁ + κ₂`, the coupling fed to the regime criterion.
    pub fn total_kappa(&self) -> f64 {
        self.kappa1 + self.kappa2
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("kappa1_per_s", self.kappa1),
            ("kappa2_per_s", self.kappa2),
            ("gamma0_per_s", self.gamma0),
            ("w1", self.w1),
            ("w2", self.w2),
            ("lambda_per_s", self.lambda_width),
        ];
        for (field, value) in fields {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Config {
                    field,
                    message: format!("must be finite and nonnegative, got {value}"),
                });
            }
        }
        if self.w1 + self.w2 <= 0.0 {
            return Err(Error::Config {
                field: "w1",
                message: "w1 + w2 must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Flat JSON layout holding both parameter sets and the refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n_r: f64,
    #[serde(flatten)]
    pub pmd: PmdModelParams,
    #[serde(flatten)]
    pub cavity: CavityModelParams,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_r: units::DEFAULT_REFRACTIVE_INDEX,
            pmd: PmdModelParams::published(),
            cavity: CavityModelParams::published(),
        }
    }
}

impl ModelConfig {
    pub fn units(&self) -> Result<UnitContext> {
        UnitContext::with_index(self.n_r)
    }

    pub fn check(&self) -> Result<()> {
        self.units()?;
        self.pmd.check()?;
        self.cavity.check()
    }
}
