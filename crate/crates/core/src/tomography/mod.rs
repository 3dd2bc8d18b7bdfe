//! Sixteen-setting polarization tomography of the photon pair.
//!
//! Each photon is projected onto one of `H`, `V`, `D = (H+V)/√2` or
//! `R = (H−iV)/√2`. The 16 product settings are informationally complete
//! for a two-qubit state.

mod linear;
mod mle;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::state::{c, r, validate, DensityMatrix, PureState, C64};

pub use linear::{condition_number, design_matrix, linear_inversion};
pub use mle::{reconstruct_mle, MleOptions, ReconstructionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    H,
    V,
    D,
    R,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::H, Basis::V, Basis::D, Basis::R];

    /// Single-photon amplitudes in the `(H, V)` basis.
    pub fn amplitudes(self) -> [C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Basis::H => [r(1.0), r(0.0)],
            Basis::V => [r(0.0), r(1.0)],
            Basis::D => [r(s), r(s)],
            Basis::R => [r(s), c(0.0, -s)],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::H => "H",
            Basis::V => "V",
            Basis::D => "D",
            Basis::R => "R",
        };
        f.write_str(s)
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(Basis::H),
            "V" | "v" => Ok(Basis::V),
            "D" | "d" => Ok(Basis::D),
            "R" | "r" => Ok(Basis::R),
            other => Err(Error::MalformedData(format!("unknown polarization {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub signal: Basis,
    pub idler: Basis,
}

impl MeasurementSetting {
    pub fn new(signal: Basis, idler: Basis) -> Self {
        Self { signal, idler }
    }

    /// All 16 settings, signal-major.
    pub fn all() -> Vec<MeasurementSetting> {
        Basis::ALL
            .iter()
            .flat_map(|&s| Basis::ALL.iter().map(move |&i| MeasurementSetting::new(s, i)))
            .collect()
    }
}

/// Product state `|signal⟩ ⊗ |idler⟩` selected by a setting.
pub fn projector(setting: MeasurementSetting) -> PureState {
    PureState::product(setting.signal.amplitudes(), setting.idler.amplitudes())
        .expect("basis states are normalized")
}

/// Raw counts for one setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub setting: MeasurementSetting,
    pub coincidences: u64,
    pub accidentals: u64,
    pub gate_count: u64,
}

/// Accidental-subtracted counts for one setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedRecord {
    pub setting: MeasurementSetting,
    pub counts: f64,
}

/// Count statistics of the coincidence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountModel {
    /// Detection gates per setting.
    pub gates: u64,
    /// Probability per gate that a pair is emitted and both photons detected.
    pub pair_rate: f64,
    /// Probability per gate of an uncorrelated coincidence.
    pub accidental_rate: f64,
}

impl Default for CountModel {
    /// 10⁸ gates at a pair rate of 10⁻³: 10⁵ expected pairs per setting
    /// before projection.
    fn default() -> Self {
        Self {
            gates: 100_000_000,
            pair_rate: 1e-3,
            accidental_rate: 0.0,
        }
    }
}

impl CountModel {
    pub fn check(&self) -> Result<()> {
        if self.gates == 0 {
            return Err(Error::Config {
                field: "gates",
                message: "must be positive".into(),
            });
        }
        check_range("pair_rate", self.pair_rate, 0.0, 1.0, "[0, 1]")?;
        if !(self.accidental_rate >= 0.0 && self.accidental_rate < 1.0) {
            return Err(Error::OutOfRange {
                name: "accidental_rate",
                value: self.accidental_rate,
                range: "[0, 1)",
            });
        }
        Ok(())
    }

    /// Expected true coincidences `gates·pair_rate·⟨proj|ρ|proj⟩`.
    pub fn true_mean(&self, rho: &DensityMatrix, setting: MeasurementSetting) -> f64 {
        let prob = crate::state::overlap(&projector(setting), rho).max(0.0);
        self.gates as f64 * self.pair_rate * prob
    }

    pub fn accidental_mean(&self) -> f64 {
        self.gates as f64 * self.accidental_rate
    }
}

fn draw(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let sample: f64 = Poisson::new(mean).expect("finite positive mean").sample(rng);
    sample as u64
}

fn require_valid(rho: &DensityMatrix) -> Result<()> {
    let report = validate(rho);
    if report.passed {
        Ok(())
    } else {
        Err(Error::InvalidState(report.to_string()))
    }
}

/// Poisson-sampled records for the 16 settings.
///
/// Recorded coincidences are true pairs plus an accidental draw; the
/// accidentals column is an independent delayed-gate draw with the same
/// mean. Setting `k` uses stream `k` of a ChaCha generator seeded with
/// `seed`, so each setting is reproducible on its own.
pub fn simulate_counts(
    rho: &DensityMatrix,
    model: &CountModel,
    seed: u64,
) -> Result<Vec<TomographyRecord>> {
    require_valid(rho)?;
    model.check()?;
    let records = MeasurementSetting::all()
        .into_iter()
        .enumerate()
        .map(|(k, setting)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let pairs = draw(&mut rng, model.true_mean(rho, setting));
            let in_window = draw(&mut rng, model.accidental_mean());
            let delayed = draw(&mut rng, model.accidental_mean());
            TomographyRecord {
                setting,
                coincidences: (pairs + in_window).min(model.gates),
                accidentals: delayed,
                gate_count: model.gates,
            }
        })
        .collect();
    Ok(records)
}

/// Noise-free counts: the true-coincidence means themselves.
pub fn expected_counts(rho: &DensityMatrix, model: &CountModel) -> Result<Vec<CorrectedRecord>> {
    require_valid(rho)?;
    model.check()?;
    Ok(MeasurementSetting::all()
        .into_iter()
        .map(|setting| CorrectedRecord {
            setting,
            counts: model.true_mean(rho, setting),
        })
        .collect())
}

/// `max(0, coincidences − accidentals)` per setting.
pub fn subtract_accidentals(records: &[TomographyRecord]) -> Vec<CorrectedRecord> {
    records
        .iter()
        .map(|rec| CorrectedRecord {
            setting: rec.setting,
            counts: rec.coincidences.saturating_sub(rec.accidentals) as f64,
        })
        .collect()
}

/// The six Werner-probability estimators read off a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerEstimate {
    /// `4ρ₁₁ − 1, 4ρ₄₄ − 1, 2 Re ρ₁₄, 2 Re ρ₄₁, 1 − 4ρ₂₂, 1 − 4ρ₃₃`.
    pub estimators: [f64; 6],
    pub p: f64,
    /// `max(|Im ρ₁₄|, |Im ρ₄₁|)`, dropped by the estimators.
    pub imag_residual: f64,
}

pub fn werner_estimators(rho: &DensityMatrix) -> WernerEstimate {
    let d = |i: usize| rho.get(i, i).re;
    let estimators = [
        4.0 * d(0) - 1.0,
        4.0 * d(3) - 1.0,
        2.0 * rho.get(0, 3).re,
        2.0 * rho.get(3, 0).re,
        1.0 - 4.0 * d(1),
        1.0 - 4.0 * d(2),
    ];
    WernerEstimate {
        estimators,
        p: estimators.iter().sum::<f64>() / 6.0,
        imag_residual: rho.get(0, 3).im.abs().max(rho.get(3, 0).im.abs()),
    }
}

/// Mean of the six estimators.
pub fn estimate_werner_probability(rho: &DensityMatrix) -> f64 {
    werner_estimators(rho).p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::damp_werner;
    use crate::state::{make_bell_phi_plus, make_werner};

    #[test]
    fn projector_examples() {
        let hh = projector(MeasurementSetting::new(Basis::H, Basis::H));
        assert_eq!(hh.amplitudes().as_slice(), &[r(1.0), r(0.0), r(0.0), r(0.0)]);

        let dd = projector(MeasurementSetting::new(Basis::D, Basis::D));
        for a in dd.amplitudes().iter() {
            assert!((a - r(0.5)).norm() < 1e-15);
        }

        // (1, −i)/√2 ⊗ (1, −i)/√2
        let rr = projector(MeasurementSetting::new(Basis::R, Basis::R));
        let expected = [r(0.5), c(0.0, -0.5), c(0.0, -0.5), r(-0.5)];
        for (a, e) in rr.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn sixteen_distinct_settings() {
        let mut all = MeasurementSetting::all();
        assert_eq!(all.len(), 16);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn basis_parse_roundtrip() {
        for b in Basis::ALL {
            assert_eq!(b.to_string().parse::<Basis>().unwrap(), b);
        }
        assert!("X".parse::<Basis>().is_err());
    }

    #[test]
    fn orthogonal_setting_has_zero_mean() {
        let bell = make_bell_phi_plus().projector();
        let model = CountModel::default();
        let hv = MeasurementSetting::new(Basis::H, Basis::V);
        assert!(model.true_mean(&bell, hv).abs() < 1e-9);
        let recs = simulate_counts(&bell, &model, 3).unwrap();
        let rec = recs.iter().find(|r| r.setting == hv).unwrap();
        assert_eq!(rec.coincidences, 0);
        assert_eq!(rec.accidentals, 0);
    }

    #[test]
    fn maximally_mixed_mean_is_uniform() {
        let model = CountModel::default();
        let mixed = DensityMatrix::maximally_mixed();
        for s in MeasurementSetting::all() {
            let m = model.true_mean(&mixed, s);
            assert!((m - 1e5 / 4.0).abs() < 1e-6, "{s:?}: {m}");
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let rho = make_werner(0.8).unwrap();
        let model = CountModel {
            accidental_rate: 1e-5,
            ..CountModel::default()
        };
        let a = simulate_counts(&rho, &model, 42).unwrap();
        let b = simulate_counts(&rho, &model, 42).unwrap();
        assert_eq!(a, b);
        let c_ = simulate_counts(&rho, &model, 43).unwrap();
        assert_ne!(a, c_);
        assert!(a.iter().all(|r| r.accidentals > 500 && r.coincidences <= r.gate_count));
    }

    #[test]
    fn simulation_rejects_invalid_state() {
        let bad = DensityMatrix::from_matrix(make_werner(0.5).unwrap().matrix() * r(2.0));
        assert!(simulate_counts(&bad, &CountModel::default(), 1).is_err());
        let model = CountModel {
            accidental_rate: 1.0,
            ..CountModel::default()
        };
        assert!(simulate_counts(&make_werner(0.5).unwrap(), &model, 1).is_err());
    }

    #[test]
    fn accidental_subtraction() {
        let s = MeasurementSetting::new(Basis::H, Basis::H);
        let rec = |cc, ac| TomographyRecord {
            setting: s,
            coincidences: cc,
            accidentals: ac,
            gate_count: 1000,
        };
        let out = subtract_accidentals(&[rec(100, 20), rec(5, 9), rec(7, 0)]);
        assert_eq!(out.iter().map(|r| r.counts).collect::<Vec<_>>(), vec![80.0, 0.0, 7.0]);
    }

    #[test]
    fn werner_estimate_exact() {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let est = werner_estimators(&make_werner(p).unwrap());
            assert!((est.p - p).abs() < 1e-12);
            assert!(est.estimators.iter().all(|e| (e - p).abs() < 1e-12));
            assert_eq!(est.imag_residual, 0.0);
        }
        assert!(estimate_werner_probability(&DensityMatrix::maximally_mixed()).abs() < 1e-15);
    }

    #[test]
    fn damped_estimate_average_identity() {
        for p in [0.2, 0.5, 0.9, 1.0] {
            for xi in [0.0, 0.01, 0.02, 0.04, 0.3] {
                let est = estimate_werner_probability(&damp_werner(p, xi).unwrap());
                let expected = p * (4.0 - 4.0 * xi + 2.0 * (1.0 - xi).sqrt()) / 6.0;
                assert!((est - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn damage_is_monotone_in_xi() {
        for p in [0.1, 0.6, 1.0] {
            let mut prev = f64::INFINITY;
            for j in 0..=50 {
                let est = estimate_werner_probability(&damp_werner(p, j as f64 / 50.0).unwrap());
                assert!(est < prev);
                prev = est;
            }
        }
    }
}
