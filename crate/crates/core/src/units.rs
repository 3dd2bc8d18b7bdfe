//! Unit conversions. Everything inside the crate is SI; the helpers here
//! take the lab units quoted for fiber links (ps/√km, GHz, km, ms, 1/km)
//! and convert once.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Group index of standard single-mode fiber.
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.468;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitContext {
    #[serde(skip, default = "speed_of_light")]
    pub c: f64,
    pub n_r: f64,
}

fn speed_of_light() -> f64 {
    SPEED_OF_LIGHT
}

impl Default for UnitContext {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            n_r: DEFAULT_REFRACTIVE_INDEX,
        }
    }
}

impl UnitContext {
    pub fn with_index(n_r: f64) -> Result<Self> {
        let units = Self { n_r, ..Self::default() };
        units.check()?;
        Ok(units)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.n_r.is_finite() && self.n_r > 1.0) {
            return Err(Error::OutOfRange {
                name: "refractive index n_r",
                value: self.n_r,
                range: "(1, inf)",
            });
        }
        Ok(())
    }

    /// Group velocity `c/n_r` in m/s.
    pub fn group_velocity(&self) -> f64 {
        self.c / self.n_r
    }
}

/// Fiber length covered in buffer time `t`: `L = (c/n_r)·t`.
pub fn length_from_time(t: f64, units: &UnitContext) -> Result<f64> {
    check_nonnegative("buffer time t", t)?;
    Ok(units.group_velocity() * t)
}

pub fn time_from_length(length_m: f64, units: &UnitContext) -> Result<f64> {
    check_nonnegative("fiber length L", length_m)?;
    Ok(length_m / units.group_velocity())
}

/// ps/√km → s/√m
pub fn ps_per_sqrt_km(value: f64) -> f64 {
    value * 1e-12 / 1000f64.sqrt()
}

/// s/√m → ps/√km
pub fn to_ps_per_sqrt_km(value: f64) -> f64 {
    value * 1000f64.sqrt() / 1e-12
}

/// Frequency offset in GHz → angular frequency in rad/s.
pub fn ghz_to_rad_per_s(value: f64) -> f64 {
    2.0 * std::f64::consts::PI * value * 1e9
}

pub fn per_km(value: f64) -> f64 {
    value / 1000.0
}

pub fn to_per_km(value: f64) -> f64 {
    value * 1000.0
}

pub fn km(value: f64) -> f64 {
    value * 1000.0
}

pub fn ms(value: f64) -> f64 {
    value * 1e-3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_zero_length() {
        assert_eq!(length_from_time(0.0, &UnitContext::default()).unwrap(), 0.0);
    }

    #[test]
    fn buffer_time_to_length() {
        let l = length_from_time(0.9e-3, &UnitContext::default()).unwrap();
        // (2.99792458e8 / 1.468) * 0.9e-3
        assert!((l - 183_796.466_076).abs() < 1e-3);
        assert!((l - 183_800.0).abs() < 5.0);
    }

    #[test]
    fn length_to_time() {
        let t = time_from_length(25_000.0, &UnitContext::default()).unwrap();
        assert!((t - 1.224e-4).abs() < 1e-7);
        let back = length_from_time(t, &UnitContext::default()).unwrap();
        assert!((back - 25_000.0).abs() < 1e-9);
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(length_from_time(-1e-6, &UnitContext::default()).is_err());
        assert!(time_from_length(-1.0, &UnitContext::default()).is_err());
        assert!(UnitContext::with_index(1.0).is_err());
        assert!(UnitContext::with_index(0.5).is_err());
    }

    #[test]
    fn lab_unit_conversions() {
        assert!((ps_per_sqrt_km(0.047) - 1.486_264_e-15).abs() < 1e-20);
        assert!((to_ps_per_sqrt_km(ps_per_sqrt_km(0.0017)) - 0.0017).abs() < 1e-15);
        assert!((ghz_to_rad_per_s(200.0) / 1.256_637_061_435_9e12 - 1.0).abs() < 1e-12);
        assert_eq!(per_km(0.006), 6.0e-6);
    }
}
