//! Weighted least-squares fits of the decay models to `(t, P)` data.

mod fits;
mod lm;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{CavityModelParams, PmdModelParams};
use crate::error::{Error, Result};

pub use fits::{
    fit_exponential, fit_p3, fit_pasy, initial_p3, initial_pasy, Bounds, P3_PARAMETERS, PASY_PARAMETERS,
};

/// The three decay models that can be fitted or thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Weighted `P_a + P_sy` fiber model.
    Pasy,
    /// Weighted `p₁ + p₂` cavity model.
    P3,
    /// Memoryless `P₀·e^(−rate·t)`.
    Exp,
}

impl ModelKind {
    pub fn free_parameters(self) -> usize {
        match self {
            ModelKind::Pasy | ModelKind::P3 => 5,
            ModelKind::Exp => 2,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Pasy => "pasy",
            ModelKind::P3 => "p3",
            ModelKind::Exp => "exp",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pasy" => Ok(ModelKind::Pasy),
            "p3" => Ok(ModelKind::P3),
            "exp" => Ok(ModelKind::Exp),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    /// Buffer time in seconds.
    pub t: f64,
    pub p: f64,
    pub sigma: f64,
}

/// Measured or synthetic `P(t)` with per-point uncertainties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSeries {
    points: Vec<DataPoint>,
}

impl DataSeries {
    /// Requires strictly increasing finite times, finite `p` and finite
    /// positive `sigma`.
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        for (i, pt) in points.iter().enumerate() {
            if !pt.t.is_finite() || !pt.p.is_finite() {
                return Err(Error::MalformedData(format!("point {i} is not finite")));
            }
            if !(pt.sigma.is_finite() && pt.sigma > 0.0) {
                return Err(Error::MalformedData(format!(
                    "point {i} has uncertainty {}, expected a positive number",
                    pt.sigma
                )));
            }
            if i > 0 && pt.t <= points[i - 1].t {
                return Err(Error::MalformedData(format!("times are not strictly increasing at point {i}")));
            }
        }
        Ok(Self { points })
    }

    /// Unit uncertainties, i.e. an unweighted fit.
    pub fn unweighted(times: &[f64], values: &[f64]) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::MalformedData("times and values differ in length".into()));
        }
        Self::new(
            times
                .iter()
                .zip(values)
                .map(|(&t, &p)| DataPoint { t, p, sigma: 1.0 })
                .collect(),
        )
    }

    /// Samples `model` at `times` with uncertainty `sigma(p)`.
    pub fn from_model(times: &[f64], model: impl Fn(f64) -> f64, sigma: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            times
                .iter()
                .map(|&t| {
                    let p = model(t);
                    DataPoint { t, p, sigma: sigma(p) }
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.t).collect()
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for pt in &self.points {
            pt.t.to_bits().hash(&mut h);
            pt.p.to_bits().hash(&mut h);
            pt.sigma.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// `√Σ((model − p)/σ)²`.
    pub fn weighted_residual_norm(&self, model: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .map(|pt| ((model(pt.t) - pt.p) / pt.sigma).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Evenly spaced grid of `n ≥ 2` points on `[start, end]`.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                end
            } else {
                start + (end - start) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialParams {
    pub p0: f64,
    pub rate_per_s: f64,
}

impl ExponentialParams {
    pub fn eval(&self, t: f64) -> f64 {
        crate::dynamics::markovian_exponential(t, self.p0, self.rate_per_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitParams {
    Pmd(PmdModelParams),
    Cavity(CavityModelParams),
    Exponential(ExponentialParams),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitWarning {
    /// The named parameter finished on one of its bounds.
    ActiveBound { parameter: String },
    /// The iteration limit was reached before the convergence test passed.
    NotConverged,
    /// No fit satisfying the ordering of the paired rate parameters was found.
    OrderingViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: ModelKind,
    #[serde(flatten)]
    pub params: FitParams,
    /// `√Σ((model − p)/σ)²`.
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Variance estimates `(JᵀJ)⁻¹` in the units of the parameter fields,
    /// ordered as [`FitResult::parameter_names`].
    pub covariance_diag: Vec<f64>,
    pub parameter_names: Vec<String>,
    pub warnings: Vec<FitWarning>,
    pub n_points: usize,
    /// Objective `χ²` after each accepted step, starting at the initial guess.
    #[serde(skip)]
    pub objective_history: Vec<f64>,
    #[serde(skip)]
    data_fingerprint: u64,
}

impl FitResult {
    pub fn chi_square(&self) -> f64 {
        self.residual_norm * self.residual_norm
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.n_points.saturating_sub(self.model.free_parameters())
    }

    /// `χ²/(n − k)`, or `χ²` itself when there are no spare points.
    pub fn reduced_chi_square(&self) -> f64 {
        match self.degrees_of_freedom() {
            0 => self.chi_square(),
            dof => self.chi_square() / dof as f64,
        }
    }

    pub fn has_active_bound(&self, parameter: &str) -> bool {
        self.warnings
            .iter()
            .any(|w| matches!(w, FitWarning::ActiveBound { parameter: p } if p == parameter))
    }

    pub fn pmd(&self) -> Option<&PmdModelParams> {
        match &self.params {
            FitParams::Pmd(p) => Some(p),
            _ => None,
        }
    }

    pub fn cavity(&self) -> Option<&CavityModelParams> {
        match &self.params {
            FitParams::Cavity(p) => Some(p),
            _ => None,
        }
    }

    pub fn exponential(&self) -> Option<&ExponentialParams> {
        match &self.params {
            FitParams::Exponential(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    First,
    Second,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub first: ModelKind,
    pub second: ModelKind,
    pub residual_norm_first: f64,
    pub residual_norm_second: f64,
    pub reduced_chi_square_first: f64,
    pub reduced_chi_square_second: f64,
    /// Reduced chi-square of the first fit over that of the second.
    pub chi_square_ratio: f64,
    pub winner: Winner,
}

/// Ranks two fits of the same data by reduced chi-square.
///
/// Reduced chi-squares within 1e-9 of each other (relative, or absolute
/// below 1) are a tie.
pub fn model_comparison(data: &DataSeries, first: &FitResult, second: &FitResult) -> Result<ModelComparison> {
    let fp = data.fingerprint();
    if first.data_fingerprint != fp || second.data_fingerprint != fp {
        return Err(Error::MismatchedData);
    }
    let (ra, rb) = (first.reduced_chi_square(), second.reduced_chi_square());
    let winner = if (ra - rb).abs() <= 1e-9 * ra.abs().max(rb.abs()).max(1.0) {
        Winner::Tie
    } else if ra < rb {
        Winner::First
    } else {
        Winner::Second
    };
    Ok(ModelComparison {
        first: first.model,
        second: second.model,
        residual_norm_first: first.residual_norm,
        residual_norm_second: second.residual_norm,
        reduced_chi_square_first: ra,
        reduced_chi_square_second: rb,
        chi_square_ratio: if rb > 0.0 { ra / rb } else if ra > 0.0 { f64::MAX } else { 1.0 },
        winner,
    })
}
