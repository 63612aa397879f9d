//! Distances, the horizon approximation, slant-range geometry and the
//! fixed constants of the helicopter model.
//!
//! Everything inside the crate is computed in metres; kilometres only appear
//! where values enter or leave (visibilities, horizon, sweep width).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const M_PER_KM: f64 = 1000.0;

/// False for NaN, infinities, zero and negatives.
#[inline]
pub(crate) fn is_positive_finite(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Horizon coefficient, km per sqrt(metre of eye height).
pub const HORIZON_COEFF_KM: f64 = 3.83;

/// A non-negative distance in metres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct DistanceM(f64);

/// A non-negative distance in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct DistanceKm(f64);

macro_rules! distance_impl {
    ($ty:ident, $unit:literal) => {
        impl $ty {
            pub const ZERO: $ty = $ty(0.0);

            pub fn new(value: f64) -> Result<Self> {
                if value.is_nan() || value < 0.0 {
                    return Err(Error::Precondition(format!(
                        "distance must be non-negative, got {value} {}",
                        $unit
                    )));
                }
                Ok($ty(value))
            }

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{} {}", self.0, $unit)
            }
        }
    };
}

distance_impl!(DistanceM, "m");
distance_impl!(DistanceKm, "km");

impl DistanceKm {
    #[inline]
    pub fn to_m(self) -> DistanceM {
        km_to_m(self)
    }
}

impl DistanceM {
    #[inline]
    pub fn to_km(self) -> DistanceKm {
        m_to_km(self)
    }
}

#[inline]
pub fn km_to_m(d: DistanceKm) -> DistanceM {
    DistanceM(d.0 * M_PER_KM)
}

#[inline]
pub fn m_to_km(d: DistanceM) -> DistanceKm {
    DistanceKm(d.0 / M_PER_KM)
}

/// Distance to the sea horizon for an eye at `altitude_m` metres:
/// `3.83 * sqrt(altitude_m)` kilometres.
pub fn distance_to_horizon_km(altitude_m: f64) -> Result<DistanceKm> {
    if !is_positive_finite(altitude_m) {
        return Err(Error::Precondition(format!(
            "altitude must be positive and finite, got {altitude_m} m"
        )));
    }
    Ok(DistanceKm(HORIZON_COEFF_KM * altitude_m.sqrt()))
}

/// Straight-line distance from an eye `effective_altitude_m` above the
/// object's top to an object `lateral_m` away along the surface.
#[inline]
pub fn slant_range(effective_altitude_m: f64, lateral_m: f64) -> DistanceM {
    debug_assert!(effective_altitude_m >= 0.0 && lateral_m >= 0.0);
    DistanceM(effective_altitude_m.hypot(lateral_m))
}

/// Constants of the model. The defaults are the helicopter table values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub altitudes_m: Vec<u32>,
    pub visibilities_km: Vec<f64>,
    /// Length of a grid row, which is also the number of one-metre columns.
    pub sea_length_m: u32,
    /// Visibilities at or above this value impose no visibility limit.
    pub unlimited_visibility_km: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        ModelConstants {
            altitudes_m: vec![150, 300, 600],
            visibilities_km: vec![1.9, 5.6, 9.3, 18.5, 27.8, 37.0],
            sea_length_m: 54_200,
            unlimited_visibility_km: 37.0,
        }
    }
}

impl ModelConstants {
    pub fn validate(&self) -> Result<()> {
        if self.altitudes_m.is_empty() || self.altitudes_m.contains(&0) {
            return Err(Error::Config(
                "altitudes must be non-empty and positive".into(),
            ));
        }
        if !self.altitudes_m.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "altitudes must be strictly increasing".into(),
            ));
        }
        if self.visibilities_km.is_empty()
            || self.visibilities_km.iter().any(|v| !is_positive_finite(*v))
        {
            return Err(Error::Config(
                "visibilities must be non-empty, positive and finite".into(),
            ));
        }
        if !self.visibilities_km.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "visibilities must be strictly increasing".into(),
            ));
        }
        if self.sea_length_m == 0 {
            return Err(Error::Config("sea length must be positive".into()));
        }
        if !is_positive_finite(self.unlimited_visibility_km) {
            return Err(Error::Config(
                "unlimited visibility threshold must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn is_unlimited_visibility(&self, visibility_km: f64) -> bool {
        visibility_km >= self.unlimited_visibility_km
    }
}
