//! The five commands behind the `qbuffer` binary, as library calls.
//!
//! Each command takes a validated [`RunConfig`] and returns a plain report
//! that [`Output::render`] turns into CSV or JSON text.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::damp_werner;
use crate::crossing::solve_level_crossing;
use crate::dynamics::{classify_regime, p3, prob_pasy, ModelConfig, Regime};
use crate::error::{Error, Result};
use crate::fitting::{
    fit_exponential, fit_p3, fit_pasy, initial_p3, initial_pasy, linspace, Bounds, DataSeries, FitResult,
    ModelKind,
};
use crate::io::{self, SweepRow};
use crate::measures::CorrelationReport;
use crate::state::fidelity;
use crate::tomography::{
    estimate_werner_probability, expected_counts, reconstruct_mle, simulate_counts, subtract_accidentals,
    CorrectedRecord, CountModel, MleOptions, TomographyRecord,
};
use crate::units::{length_from_time, SPEED_OF_LIGHT};

/// Upper end of the threshold search window, seconds.
pub const THRESHOLD_WINDOW_S: f64 = 10e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config {
                field: "format",
                message: format!("expected csv or json, got {other:?}"),
            }),
        }
    }
}

/// Everything a run needs.
///
/// The JSON form is flat; fields left out keep their defaults and unknown
/// fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub models: ModelConfig,
    /// Detection gates per tomography setting.
    pub gates: u64,
    pub pair_rate: f64,
    pub accidental_rate: f64,
    pub seed: u64,
    /// Use expected counts instead of Poisson draws.
    pub noiseless: bool,
    pub werner_p: f64,
    pub xi: f64,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub n_points: usize,
    pub model: ModelKind,
    pub level: f64,
    pub exp_p0: f64,
    /// Defaults to `2μ·c/n_r` from the fiber loss.
    pub exp_rate_per_s: Option<f64>,
    /// Coupling for `classify`; defaults to `κ₁ + κ₂`.
    pub kappa_per_s: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let counts = CountModel::default();
        Self {
            models: ModelConfig::default(),
            gates: counts.gates,
            pair_rate: counts.pair_rate,
            accidental_rate: counts.accidental_rate,
            seed: 0,
            noiseless: false,
            werner_p: 0.9,
            xi: 0.0,
            t_start_s: 0.0,
            t_end_s: 1.5e-3,
            n_points: 151,
            model: ModelKind::Pasy,
            level: 1.0 / 3.0,
            exp_p0: 1.0,
            exp_rate_per_s: None,
            kappa_per_s: None,
        }
    }
}

fn config_error(field: &'static str, message: impl Into<String>) -> Error {
    Error::Config {
        field,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Overlays the given JSON object on the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let user: serde_json::Value = serde_json::from_str(text)?;
        let serde_json::Value::Object(user) = user else {
            return Err(Error::Schema("config must be a JSON object".into()));
        };
        let mut merged = serde_json::to_value(Self::default())?;
        let fields = merged.as_object_mut().expect("config serializes to an object");
        for (key, value) in user {
            if !fields.contains_key(&key) {
                return Err(Error::Schema(format!("unknown config field {key:?}")));
            }
            fields.insert(key, value);
        }
        Ok(serde_json::from_value(merged)?)
    }

    pub fn check(&self) -> Result<()> {
        self.models.check()?;
        self.count_model().check()?;
        if self.n_points < 2 {
            return Err(config_error("n_points", format!("must be at least 2, got {}", self.n_points)));
        }
        if !(self.t_start_s.is_finite() && self.t_start_s >= 0.0) {
            return Err(config_error("t_start_s", format!("must be nonnegative, got {}", self.t_start_s)));
        }
        if !(self.t_end_s.is_finite() && self.t_end_s > self.t_start_s) {
            return Err(config_error("t_end_s", format!("must exceed t_start_s, got {}", self.t_end_s)));
        }
        if !(0.0..=1.0).contains(&self.werner_p) {
            return Err(config_error("werner_p", format!("must be in [0, 1], got {}", self.werner_p)));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(config_error("xi", format!("must be in [0, 1], got {}", self.xi)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(config_error("level", format!("must be in (0, 1), got {}", self.level)));
        }
        if !(self.exp_p0.is_finite() && self.exp_p0 > 0.0) {
            return Err(config_error("exp_p0", format!("must be positive, got {}", self.exp_p0)));
        }
        if let Some(rate) = self.exp_rate_per_s {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(config_error("exp_rate_per_s", format!("must be nonnegative, got {rate}")));
            }
        }
        if let Some(k) = self.kappa_per_s {
            if !(k.is_finite() && k >= 0.0) {
                return Err(config_error("kappa_per_s", format!("must be nonnegative, got {k}")));
            }
        }
        Ok(())
    }

    pub fn count_model(&self) -> CountModel {
        CountModel {
            gates: self.gates,
            pair_rate: self.pair_rate,
            accidental_rate: self.accidental_rate,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.t_start_s, self.t_end_s, self.n_points)
    }

    /// `2μ·c/n_r` unless set explicitly.
    pub fn exp_rate(&self) -> f64 {
        self.exp_rate_per_s
            .unwrap_or(2.0 * self.models.pmd.mu * SPEED_OF_LIGHT / self.models.n_r)
    }
}

/// A rendered command result.
pub trait Output {
    fn render(&self, format: Format) -> Result<String>;
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// One-row CSV of a flat struct.
fn csv_row<T: Serialize>(value: &T) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(value)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Clamps a model probability into `[0, 1]` before the measures see it.
fn report_at(p: f64) -> CorrelationReport {
    CorrelationReport::at(p.clamp(0.0, 1.0)).expect("clamped probability is in range")
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
}

impl Output for SweepOutput {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(&self.rows),
            Format::Csv => {
                let mut buf = Vec::new();
                io::write_sweep(&mut buf, &self.rows)?;
                Ok(String::from_utf8_lossy(&buf).into_owned())
            }
        }
    }
}

/// Both decay models and their correlation measures on the configured grid.
///
/// Model values slightly above 1 (the fiber model can overshoot at very
/// short lengths) are clamped to 1 for the measures only.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepOutput> {
    config.check()?;
    let units = config.models.units()?;
    let rows = config
        .grid()
        .into_iter()
        .map(|t| {
            let p_pasy = prob_pasy(t, &config.models.pmd, &units);
            let p_p3 = p3(t, &config.models.cavity);
            let a = report_at(p_pasy);
            let b = report_at(p_p3);
            Ok(SweepRow {
                t_s: t,
                l_m: length_from_time(t, &units)?,
                p_pasy,
                p_p3,
                total_pasy: a.total,
                classical_pasy: a.classical,
                discord_pasy: a.discord,
                concurrence_pasy: a.concurrence,
                total_p3: b.total,
                classical_p3: b.classical,
                discord_p3: b.discord,
                concurrence_p3: b.concurrence,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutput { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TomoReport {
    #[serde(rename = "P_true")]
    pub p_true: f64,
    /// Estimator value on the noiseless damped state.
    #[serde(rename = "P_expected")]
    pub p_expected: f64,
    #[serde(rename = "P_hat")]
    pub p_hat: f64,
    pub fidelity: f64,
    pub converged: bool,
    pub xi: f64,
    pub seed: u64,
    pub noiseless: bool,
    pub log_likelihood: f64,
    pub iterations: usize,
}

pub struct TomoOutput {
    pub report: TomoReport,
    pub records: Vec<TomographyRecord>,
}

impl Output for TomoOutput {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(&self.report),
            Format::Csv => csv_row(&self.report),
        }
    }
}

impl TomoOutput {
    pub fn records_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        io::write_records(&mut buf, &self.records)?;
        Ok(String::from_utf8_lossy(&buf).into_owned())
    }
}

/// Damped Werner state → counts → accidental subtraction → MLE → `P̂`.
///
/// In noiseless mode the reconstruction sees the expected counts and the
/// records carry them rounded to integers.
pub fn cmd_tomo(config: &RunConfig) -> Result<TomoOutput> {
    config.check()?;
    let truth = damp_werner(config.werner_p, config.xi)?;
    let model = config.count_model();
    let (corrected, records): (Vec<CorrectedRecord>, Vec<TomographyRecord>) = if config.noiseless {
        let expected = expected_counts(&truth, &model)?;
        let records = expected
            .iter()
            .map(|r| TomographyRecord {
                setting: r.setting,
                coincidences: r.counts.round() as u64,
                accidentals: 0,
                gate_count: model.gates,
            })
            .collect();
        (expected, records)
    } else {
        let records = simulate_counts(&truth, &model, config.seed)?;
        (subtract_accidentals(&records), records)
    };
    let result = reconstruct_mle(&corrected, &MleOptions::default())?;
    let report = TomoReport {
        p_true: config.werner_p,
        p_expected: estimate_werner_probability(&truth),
        p_hat: estimate_werner_probability(&result.rho_hat),
        fidelity: fidelity(&truth, &result.rho_hat),
        converged: result.converged,
        xi: config.xi,
        seed: config.seed,
        noiseless: config.noiseless,
        log_likelihood: result.log_likelihood,
        iterations: result.iterations,
    };
    Ok(TomoOutput { report, records })
}

pub struct FitOutput {
    pub fit: FitResult,
}

#[derive(Serialize)]
struct FitCsvRow<'a> {
    model: ModelKind,
    parameter: &'a str,
    value: f64,
    variance: f64,
    residual_norm: f64,
    converged: bool,
    iterations: usize,
}

impl Output for FitOutput {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(&self.fit),
            Format::Csv => {
                let values = serde_json::to_value(self.fit.params)?;
                let mut w = csv::Writer::from_writer(Vec::new());
                for (name, var) in self.fit.parameter_names.iter().zip(&self.fit.covariance_diag) {
                    w.serialize(FitCsvRow {
                        model: self.fit.model,
                        parameter: name,
                        value: values[name.as_str()].as_f64().unwrap_or(f64::NAN),
                        variance: *var,
                        residual_norm: self.fit.residual_norm,
                        converged: self.fit.converged,
                        iterations: self.fit.iterations,
                    })?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                Ok(String::from_utf8_lossy(&bytes).into_owned())
            }
        }
    }
}

/// Fits `data` with the default initializer of the chosen model. The
/// configured parameters supply the fixed quantities (`Δω`, sign branch,
/// `n_r`, `Λ`).
pub fn cmd_fit(config: &RunConfig, data: &DataSeries) -> Result<FitOutput> {
    config.check()?;
    let units = config.models.units()?;
    let fit = match config.model {
        ModelKind::Pasy => {
            let init = initial_pasy(data, &config.models.pmd, &units)?;
            fit_pasy(data, &init, &Bounds::default(), &units)?
        }
        ModelKind::P3 => {
            let init = initial_p3(data, &config.models.cavity)?;
            fit_p3(data, &init, &Bounds::default())?
        }
        ModelKind::Exp => fit_exponential(data)?,
    };
    Ok(FitOutput { fit })
}

/// Reads a `t_s,p,sigma` file and fits it.
pub fn cmd_fit_file(config: &RunConfig, path: &Path) -> Result<FitOutput> {
    let data = io::read_data(File::open(path)?)?;
    cmd_fit(config, &data)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub model: ModelKind,
    pub level: f64,
    pub t_star_s: f64,
    #[serde(rename = "L_star_m")]
    pub l_star_m: f64,
}

impl Output for ThresholdReport {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => csv_row(self),
        }
    }
}

/// First time in `[0, 10 ms]` at which the chosen model falls to `level`.
pub fn cmd_threshold(config: &RunConfig) -> Result<ThresholdReport> {
    config.check()?;
    let units = config.models.units()?;
    let pmd = config.models.pmd;
    let cavity = config.models.cavity;
    let (p0, rate) = (config.exp_p0, config.exp_rate());
    let model = move |t: f64| match config.model {
        ModelKind::Pasy => prob_pasy(t, &pmd, &units),
        ModelKind::P3 => p3(t, &cavity),
        ModelKind::Exp => p0 * (-rate * t).exp(),
    };
    let level = config.level;
    if level >= model(0.0) {
        return Err(Error::NoCrossing {
            level,
            t_lo: 0.0,
            t_hi: THRESHOLD_WINDOW_S,
        });
    }
    let t_star = solve_level_crossing(model, level, (0.0, THRESHOLD_WINDOW_S))?;
    Ok(ThresholdReport {
        model: config.model,
        level,
        t_star_s: t_star,
        l_star_m: length_from_time(t_star, &units)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub kappa_per_s: f64,
    pub gamma0_per_s: f64,
    pub four_kappa_per_s: f64,
    pub regime: Regime,
    pub delta: f64,
    pub delta_imaginary: bool,
}

impl Output for ClassifyReport {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => csv_row(self),
        }
    }
}

/// Regime of `(κ, γ₀)`; `κ` defaults to `κ₁ + κ₂` of the configured cavity.
pub fn cmd_classify(config: &RunConfig) -> Result<ClassifyReport> {
    config.check()?;
    let kappa = config.kappa_per_s.unwrap_or(config.models.cavity.total_kappa());
    let gamma0 = config.models.cavity.gamma0;
    let report = classify_regime(kappa, gamma0);
    Ok(ClassifyReport {
        kappa_per_s: kappa,
        gamma0_per_s: gamma0,
        four_kappa_per_s: 4.0 * kappa,
        regime: report.regime,
        delta: report.delta,
        delta_imaginary: report.delta_imaginary,
    })
}
