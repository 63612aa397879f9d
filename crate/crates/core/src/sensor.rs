//! Diffraction-limited visual detection.
//!
//! The eye resolves an object when its size is at least the smallest feature
//! the pupil can separate at the slant range, `theta * range`, where
//! `theta = 1.22 * wavelength / pupil_diameter`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{is_positive_finite, slant_range, DistanceM};

const RAYLEIGH_FACTOR: f64 = 1.22;

/// Anything that can decide whether an object is detectable from a given
/// position. Implementations must be deterministic.
pub trait Sensor: Sync {
    fn detect(&self, effective_altitude_m: f64, object_size_m: f64, lateral_m: f64) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanEyeConfig {
    pub wavelength_m: f64,
    pub pupil_diameter_m: f64,
}

impl Default for HumanEyeConfig {
    /// 550 nm light through a 5 mm daylight pupil.
    fn default() -> Self {
        HumanEyeConfig {
            wavelength_m: 550e-9,
            pupil_diameter_m: 5e-3,
        }
    }
}

impl HumanEyeConfig {
    pub fn from_nm_mm(wavelength_nm: f64, pupil_mm: f64) -> Result<Self> {
        let cfg = HumanEyeConfig {
            wavelength_m: wavelength_nm * 1e-9,
            pupil_diameter_m: pupil_mm * 1e-3,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_positive_finite(self.wavelength_m) || !is_positive_finite(self.pupil_diameter_m) {
            return Err(Error::Config(format!(
                "wavelength and pupil diameter must be positive, got {} m and {} m",
                self.wavelength_m, self.pupil_diameter_m
            )));
        }
        Ok(())
    }
}

/// Angular resolution in radians.
pub fn angular_resolution(cfg: &HumanEyeConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(RAYLEIGH_FACTOR * cfg.wavelength_m / cfg.pupil_diameter_m)
}

/// Smallest object size resolvable at the slant range to `(effective_altitude_m, lateral_m)`.
pub fn min_resolvable_size(
    theta: f64,
    effective_altitude_m: f64,
    lateral_m: f64,
) -> Result<DistanceM> {
    if !is_positive_finite(theta) {
        return Err(Error::Precondition(format!(
            "angular resolution must be positive, got {theta}"
        )));
    }
    DistanceM::new(theta * slant_range(effective_altitude_m, lateral_m).value())
}

/// Whether `object_size_m` is resolvable; the comparison is inclusive.
pub fn eye_detect(
    cfg: &HumanEyeConfig,
    effective_altitude_m: f64,
    object_size_m: f64,
    lateral_m: f64,
) -> Result<bool> {
    if !is_positive_finite(object_size_m) {
        return Err(Error::Precondition(format!(
            "object size must be positive, got {object_size_m}"
        )));
    }
    let theta = angular_resolution(cfg)?;
    let min_size = min_resolvable_size(theta, effective_altitude_m, lateral_m)?;
    Ok(object_size_m >= min_size.value())
}

/// The human eye with a precomputed resolution angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanEye {
    config: HumanEyeConfig,
    theta: f64,
}

impl HumanEye {
    pub fn new(config: HumanEyeConfig) -> Result<Self> {
        let theta = angular_resolution(&config)?;
        Ok(HumanEye { config, theta })
    }

    pub fn config(&self) -> &HumanEyeConfig {
        &self.config
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Default for HumanEye {
    fn default() -> Self {
        HumanEye::new(HumanEyeConfig::default()).expect("default eye config is valid")
    }
}

impl Sensor for HumanEye {
    #[inline]
    fn detect(&self, effective_altitude_m: f64, object_size_m: f64, lateral_m: f64) -> bool {
        object_size_m >= self.theta * slant_range(effective_altitude_m, lateral_m).value()
    }
}
