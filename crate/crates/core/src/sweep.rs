//! Sweep width from detection data, the closed-form sweep width of the
//! deterministic model, and the full object x altitude x visibility sweep.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Parsed, Result};
use crate::experiment::{
    run_experiment, write_stats_csv, ColumnStats, DetectionData, ExperimentConfig, Mode, Scenario,
};
use crate::sensor::{angular_resolution, HumanEye, HumanEyeConfig};
use crate::units::ModelConstants;

const M_PER_KM: f64 = 1000.0;
/// Only the right half of the curve is simulated; the left half mirrors it.
const SYMMETRIC_HALVES: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrcPoint {
    pub x_m: u32,
    pub fraction: f64,
    pub observed: bool,
    pub detected: u32,
    pub opportunities: u32,
}

/// Detection fraction against lateral range, one point per column.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LateralRangeCurve {
    points: Vec<LrcPoint>,
}

impl LateralRangeCurve {
    pub fn points(&self) -> &[LrcPoint] {
        &self.points
    }

    pub fn unobserved(&self) -> usize {
        self.points.iter().filter(|p| !p.observed).count()
    }

    /// Writes `x_m,detected,opportunities,fraction` for every column.
    /// Unobserved columns carry zero opportunities.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        write_stats_csv(
            sink,
            self.points.iter().map(|p| {
                (
                    p.x_m,
                    ColumnStats {
                        detected: p.detected,
                        opportunities: p.opportunities,
                    },
                )
            }),
        )
    }

    pub fn read_csv<R: Read>(source: R, columns: u32) -> Result<Parsed<LateralRangeCurve>> {
        let parsed = DetectionData::read_csv(source, columns)?;
        Ok(Parsed {
            value: lrc_of(&parsed.value, columns),
            warnings: parsed.warnings,
        })
    }
}

/// One curve point per column `1..=columns`; columns without opportunities
/// read as zero and are flagged unobserved.
pub fn lrc_of(data: &DetectionData, columns: u32) -> LateralRangeCurve {
    let points = (1..=columns)
        .map(|x| match data.get(x) {
            Some(c) => LrcPoint {
                x_m: x,
                fraction: c.fraction(),
                observed: true,
                detected: c.detected,
                opportunities: c.opportunities,
            },
            None => LrcPoint {
                x_m: x,
                fraction: 0.0,
                observed: false,
                detected: 0,
                opportunities: 0,
            },
        })
        .collect();
    LateralRangeCurve { points }
}

/// Sweep width in km: per-column fractions summed at one-metre spacing,
/// converted to kilometres, and doubled for the mirrored half.
pub fn calculate_w(data: &DetectionData) -> f64 {
    let sum_m: f64 = data.iter().map(|(_, c)| c.fraction()).sum();
    sum_m / M_PER_KM * SYMMETRIC_HALVES
}

/// Detection cutoff in whole metres implied by the gates and the
/// resolution limit, without running the experiment.
pub fn analytic_cutoff_m(
    sensor: &HumanEyeConfig,
    scenario: &Scenario,
    constants: &ModelConstants,
) -> Result<u32> {
    let theta = angular_resolution(sensor)?;
    let reach = f64::from(scenario.object.size_m) / theta;
    let alt = scenario.effective_altitude_m();
    let rayleigh = (reach * reach - alt * alt).max(0.0).sqrt();

    let horizon = scenario.horizon_km.value() * M_PER_KM;
    let mut cutoff = f64::from(constants.sea_length_m)
        .min(horizon.floor())
        .min(rayleigh.floor());
    if !constants.is_unlimited_visibility(scenario.visibility_km) {
        cutoff = cutoff.min((scenario.visibility_km * M_PER_KM).floor());
    }
    Ok(cutoff.max(0.0) as u32)
}

/// Sweep width of the deterministic model in closed form.
pub fn analytic_w(
    sensor: &HumanEyeConfig,
    scenario: &Scenario,
    constants: &ModelConstants,
) -> Result<f64> {
    let cutoff = analytic_cutoff_m(sensor, scenario, constants)?;
    Ok(f64::from(cutoff) / M_PER_KM * SYMMETRIC_HALVES)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepWidthResult {
    pub scenario: Scenario,
    pub w_km: f64,
    pub mode: Mode,
    pub seed: u64,
    /// Opportunities simulated: the row count, or the column count when exhaustive.
    pub rows: u32,
    /// Distinct columns that received an object, over all columns.
    pub coverage_fraction: f64,
}

/// Scenarios in sweep order: objects, then altitudes, then visibilities.
pub fn scenarios(catalog: &Catalog, constants: &ModelConstants) -> Result<Vec<Scenario>> {
    let mut out = Vec::with_capacity(
        catalog.len() * constants.altitudes_m.len() * constants.visibilities_km.len(),
    );
    for object in catalog {
        for &alt in &constants.altitudes_m {
            for &vis in &constants.visibilities_km {
                out.push(Scenario::with_constants(
                    object.clone(),
                    alt,
                    vis,
                    constants,
                )?);
            }
        }
    }
    Ok(out)
}

/// Runs the experiment and computes sweep width for one scenario.
pub fn sweep_one(
    eye: &HumanEye,
    scenario: &Scenario,
    cfg: &ExperimentConfig,
) -> Result<SweepWidthResult> {
    let data = run_experiment(eye, scenario, cfg)?;
    Ok(SweepWidthResult {
        scenario: scenario.clone(),
        w_km: calculate_w(&data),
        mode: cfg.mode,
        seed: cfg.seed,
        rows: cfg.opportunities(),
        coverage_fraction: data.coverage_fraction(),
    })
}

/// Every (object, altitude, visibility) combination, in sweep order.
///
/// Scenario `i` draws from generator stream `i` under the master seed, so the
/// output does not depend on how the work is scheduled across threads.
pub fn sweep_all(
    catalog: &Catalog,
    constants: &ModelConstants,
    sensor: &HumanEyeConfig,
    cfg: &ExperimentConfig,
) -> Result<Vec<SweepWidthResult>> {
    constants.validate()?;
    cfg.validate()?;
    if cfg.columns != constants.sea_length_m {
        return Err(Error::Config(format!(
            "experiment has {} columns but sea length is {} m",
            cfg.columns, constants.sea_length_m
        )));
    }
    let eye = HumanEye::new(*sensor)?;
    let scenarios = scenarios(catalog, constants)?;
    scenarios
        .par_iter()
        .enumerate()
        .map(|(i, scenario)| {
            let cfg = ExperimentConfig {
                stream: i as u64,
                ..*cfg
            };
            sweep_one(&eye, scenario, &cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SearchObject;

    fn scenario(name: &str, alt: u32, vis: f64) -> Scenario {
        let object = Catalog::default_catalog().get(name).unwrap().clone();
        Scenario::new(object, alt, vis).unwrap()
    }

    #[test]
    fn calculate_w_examples() {
        assert_eq!(calculate_w(&DetectionData::new(10)), 0.0);
        let d = DetectionData::from_counts(54_200, [(1000, 5, 5), (2000, 3, 6)]).unwrap();
        assert!((calculate_w(&d) - 0.003).abs() < 1e-15);
        let prefix = DetectionData::from_counts(54_200, (1..=1900).map(|x| (x, 1, 1))).unwrap();
        assert!((calculate_w(&prefix) - 3.8).abs() < 1e-12);
    }

    // Expected cutoffs from a hand evaluation with theta = 1.342e-4:
    // reach = size / theta, rayleigh = sqrt(reach^2 - eff_alt^2).
    #[test]
    fn analytic_examples() {
        let eye = HumanEyeConfig::default();
        let c = ModelConstants::default();
        let w = |s: &Scenario| analytic_w(&eye, s, &c).unwrap();
        assert_eq!(w(&scenario("Raft 1-person", 150, 1.9)), 3.8);
        assert!((w(&scenario("Raft 1-person", 150, 37.0)) - 14.90).abs() < 1e-12);
        assert!((w(&scenario("Ship 92", 600, 37.0)) - 108.4).abs() < 1e-12);
        assert!((w(&scenario("Raft 4-person", 300, 9.3)) - 18.6).abs() < 1e-12);
        assert!((w(&scenario("Power boat 2", 150, 5.6)) - 11.2).abs() < 1e-12);
    }

    #[test]
    fn analytic_cutoff_zero_when_altitude_exceeds_reach() {
        let eye = HumanEyeConfig::default();
        let c = ModelConstants::default();
        let tiny = Scenario::new(SearchObject::new("speck", 1).unwrap(), 9_000, 37.0).unwrap();
        assert_eq!(analytic_cutoff_m(&eye, &tiny, &c).unwrap(), 0);
    }

    #[test]
    fn lrc_examples() {
        let empty = lrc_of(&DetectionData::new(3), 3);
        assert_eq!(empty.points().len(), 3);
        assert!(empty
            .points()
            .iter()
            .all(|p| !p.observed && p.fraction == 0.0));

        let one = DetectionData::from_counts(100, [(42, 1, 1)]).unwrap();
        let lrc = lrc_of(&one, 100);
        assert_eq!(lrc.points().len(), 100);
        assert_eq!(lrc.unobserved(), 99);
        assert!(lrc.points()[41].observed);
        assert!(lrc.points().windows(2).all(|w| w[0].x_m < w[1].x_m));
    }

    #[test]
    fn lrc_csv_round_trip() {
        let d = DetectionData::from_counts(50, [(3, 1, 1), (7, 0, 2), (40, 2, 4)]).unwrap();
        let lrc = lrc_of(&d, 50);
        let mut buf = Vec::new();
        lrc.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 51);
        assert!(text.contains("\n40,2,4,0.5\n"));
        let back = LateralRangeCurve::read_csv(buf.as_slice(), 50)
            .unwrap()
            .value;
        assert_eq!(back, lrc);
    }

    #[test]
    fn singleton_sweep() {
        let catalog = Catalog::new(vec![SearchObject::new("Buoy", 3).unwrap()]).unwrap();
        let constants = ModelConstants {
            altitudes_m: vec![150],
            visibilities_km: vec![1.9],
            ..ModelConstants::default()
        };
        let results = sweep_all(
            &catalog,
            &constants,
            &HumanEyeConfig::default(),
            &ExperimentConfig::default(),
        )
        .unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].w_km, 3.8);
        assert_eq!(results[0].coverage_fraction, 1.0);
    }

    #[test]
    fn sweep_rejects_object_taller_than_altitude() {
        let catalog = Catalog::new(vec![SearchObject::new("Tower", 200).unwrap()]).unwrap();
        let err = sweep_all(
            &catalog,
            &ModelConstants::default(),
            &HumanEyeConfig::default(),
            &ExperimentConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Scenario {
                altitude_m: 150,
                size_m: 200,
                ..
            }
        ));
    }

    #[test]
    fn sweep_rejects_column_mismatch() {
        let cfg = ExperimentConfig {
            columns: 1000,
            ..ExperimentConfig::default()
        };
        assert!(sweep_all(
            &Catalog::default_catalog(),
            &ModelConstants::default(),
            &HumanEyeConfig::default(),
            &cfg
        )
        .is_err());
    }
}
