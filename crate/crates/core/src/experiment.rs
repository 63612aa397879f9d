//! The lateral range experiment.
//!
//! The sea is a grid of rows, each `columns` one-metre cells wide. The sensor
//! flies along column zero; column `x` lies exactly `x` metres to its side.
//! In Monte Carlo mode one object is dropped at a uniform random column in
//! every row. In exhaustive mode the object visits every column once.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{csv_io, SearchObject};
use crate::error::{Error, Parsed, Result};
use crate::sensor::Sensor;
use crate::units::{distance_to_horizon_km, is_positive_finite, DistanceKm, ModelConstants};

/// Name of the placement generator, recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8";

pub const DEFAULT_ROWS: u32 = 600_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "mc")]
    MonteCarlo,
    #[serde(rename = "exhaustive")]
    Exhaustive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MonteCarlo => "mc",
            Mode::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" | "monte-carlo" => Ok(Mode::MonteCarlo),
            "exhaustive" => Ok(Mode::Exhaustive),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Detection opportunities in Monte Carlo mode; ignored when exhaustive.
    pub rows: u32,
    pub columns: u32,
    pub seed: u64,
    /// Independent generator stream under `seed`. Sweeps use the scenario index.
    pub stream: u64,
    pub mode: Mode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rows: DEFAULT_ROWS,
            columns: ModelConstants::default().sea_length_m,
            seed: DEFAULT_SEED,
            stream: 0,
            mode: Mode::Exhaustive,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.columns == 0 {
            return Err(Error::Config("columns must be positive".into()));
        }
        if self.mode == Mode::MonteCarlo && self.rows == 0 {
            return Err(Error::Config("rows must be positive".into()));
        }
        Ok(())
    }

    /// Opportunities one run produces.
    pub fn opportunities(&self) -> u32 {
        match self.mode {
            Mode::MonteCarlo => self.rows,
            Mode::Exhaustive => self.columns,
        }
    }
}

/// One (object, altitude, visibility) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub object: SearchObject,
    pub altitude_m: u32,
    pub visibility_km: f64,
    pub horizon_km: DistanceKm,
    /// Whether the visibility is at or beyond the unlimited threshold.
    pub unlimited_visibility: bool,
}

impl Scenario {
    /// Builds a scenario using the default unlimited-visibility threshold.
    pub fn new(object: SearchObject, altitude_m: u32, visibility_km: f64) -> Result<Self> {
        Self::with_constants(
            object,
            altitude_m,
            visibility_km,
            &ModelConstants::default(),
        )
    }

    pub fn with_constants(
        object: SearchObject,
        altitude_m: u32,
        visibility_km: f64,
        constants: &ModelConstants,
    ) -> Result<Self> {
        if altitude_m <= object.size_m {
            return Err(Error::Scenario {
                object: object.name,
                altitude_m,
                size_m: object.size_m,
            });
        }
        if !is_positive_finite(visibility_km) {
            return Err(Error::Config(format!(
                "visibility must be positive, got {visibility_km} km"
            )));
        }
        let horizon_km = distance_to_horizon_km(altitude_m as f64)?;
        Ok(Scenario {
            unlimited_visibility: constants.is_unlimited_visibility(visibility_km),
            object,
            altitude_m,
            visibility_km,
            horizon_km,
        })
    }

    /// Height of the eye above the top of the object.
    #[inline]
    pub fn effective_altitude_m(&self) -> f64 {
        f64::from(self.altitude_m - self.object.size_m)
    }

    #[inline]
    pub fn horizon_m(&self) -> f64 {
        self.horizon_km.to_m().value()
    }

    /// Visibility limit in metres, `None` when unlimited.
    #[inline]
    pub fn visibility_gate_m(&self) -> Option<f64> {
        if self.unlimited_visibility {
            None
        } else {
            let vis =
                DistanceKm::new(self.visibility_km).expect("visibility checked at construction");
            Some(vis.to_m().value())
        }
    }
}

/// Counts at one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ColumnStats {
    pub detected: u32,
    pub opportunities: u32,
}

impl ColumnStats {
    /// Fraction detected in `[0, 1]`; zero for an unobserved column.
    #[inline]
    pub fn fraction(&self) -> f64 {
        if self.opportunities == 0 {
            0.0
        } else {
            f64::from(self.detected) / f64::from(self.opportunities)
        }
    }

    pub fn is_observed(&self) -> bool {
        self.opportunities > 0
    }
}

/// Per-column detection counts for columns `1..=columns`.
///
/// Behaves as a map from column to stats whose keys are the observed columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionData {
    cells: Vec<ColumnStats>,
}

impl DetectionData {
    pub fn new(columns: u32) -> Self {
        DetectionData {
            cells: vec![ColumnStats::default(); columns as usize],
        }
    }

    /// Builds data from explicit `(column, detected, opportunities)` triples.
    pub fn from_counts<I>(columns: u32, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        let mut data = DetectionData::new(columns);
        for (x, detected, opportunities) in counts {
            if x == 0 || x > columns {
                return Err(Error::Precondition(format!(
                    "column {x} outside 1..={columns}"
                )));
            }
            if opportunities == 0 || detected > opportunities {
                return Err(Error::Precondition(format!(
                    "column {x}: need 0 <= detected ({detected}) <= opportunities ({opportunities}), opportunities > 0"
                )));
            }
            let cell = &mut data.cells[x as usize - 1];
            if cell.is_observed() {
                return Err(Error::Precondition(format!("column {x} given twice")));
            }
            *cell = ColumnStats {
                detected,
                opportunities,
            };
        }
        Ok(data)
    }

    #[inline]
    fn record(&mut self, x: u32, detected: bool) {
        let cell = &mut self.cells[x as usize - 1];
        cell.opportunities += 1;
        cell.detected += u32::from(detected);
    }

    pub fn columns(&self) -> u32 {
        self.cells.len() as u32
    }

    pub fn get(&self, x: u32) -> Option<ColumnStats> {
        let cell = *self.cells.get((x as usize).checked_sub(1)?)?;
        cell.is_observed().then_some(cell)
    }

    /// Observed columns in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, ColumnStats)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_observed())
            .map(|(i, c)| (i as u32 + 1, *c))
    }

    /// Every column `1..=columns`, observed or not.
    pub fn iter_all(&self) -> impl Iterator<Item = (u32, ColumnStats)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u32 + 1, *c))
    }

    pub fn observed_columns(&self) -> u32 {
        self.cells.iter().filter(|c| c.is_observed()).count() as u32
    }

    pub fn total_opportunities(&self) -> u64 {
        self.cells.iter().map(|c| u64::from(c.opportunities)).sum()
    }

    /// Distinct observed columns over all columns.
    pub fn coverage_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        f64::from(self.observed_columns()) / self.cells.len() as f64
    }

    /// Writes the observed columns as `x_m,detected,opportunities,fraction`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        write_stats_csv(sink, self.iter())
    }

    /// Reads data written by [`DetectionData::write_csv`]. Rows with zero
    /// opportunities are accepted and mark unobserved columns.
    pub fn read_csv<R: Read>(source: R, columns: u32) -> Result<Parsed<DetectionData>> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(1, e.to_string()))?
            .clone();
        let mut warnings = Vec::new();
        if headers.is_empty() {
            warnings.push("detection file is empty".to_string());
            return Ok(Parsed::new(DetectionData::new(columns), warnings));
        }
        if headers != LRC_HEADER[..] {
            return Err(Error::parse(
                1,
                format!("expected header `{}`", LRC_HEADER.join(",")),
            ));
        }
        let mut data = DetectionData::new(columns);
        let mut last = 0u32;
        for record in rdr.records() {
            let record = record
                .map_err(|e| Error::parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let row: StatsRow = record
                .deserialize(Some(&headers))
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if row.x_m == 0 || row.x_m > columns {
                return Err(Error::parse(
                    line,
                    format!("x_m {} outside 1..={columns}", row.x_m),
                ));
            }
            if row.x_m <= last {
                return Err(Error::parse(line, "x_m must be strictly increasing"));
            }
            if row.detected > row.opportunities {
                return Err(Error::parse(line, "detected exceeds opportunities"));
            }
            let stats = ColumnStats {
                detected: row.detected,
                opportunities: row.opportunities,
            };
            if (stats.fraction() - row.fraction).abs() > 1e-12 {
                return Err(Error::parse(line, "fraction disagrees with counts"));
            }
            data.cells[row.x_m as usize - 1] = stats;
            last = row.x_m;
        }
        Ok(Parsed::new(data, warnings))
    }
}

pub(crate) const LRC_HEADER: [&str; 4] = ["x_m", "detected", "opportunities", "fraction"];

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct StatsRow {
    pub x_m: u32,
    pub detected: u32,
    pub opportunities: u32,
    pub fraction: f64,
}

pub(crate) fn write_stats_csv<W, I>(sink: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (u32, ColumnStats)>,
{
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink);
    wtr.write_record(LRC_HEADER).map_err(csv_io)?;
    for (x, c) in rows {
        wtr.serialize(StatsRow {
            x_m: x,
            detected: c.detected,
            opportunities: c.opportunities,
            fraction: c.fraction(),
        })
        .map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

fn placement_rng(cfg: &ExperimentConfig) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);
    rng
}

/// Column of the object in each row, uniform on `1..=columns`.
pub fn place_objects(cfg: &ExperimentConfig) -> Result<Vec<u32>> {
    cfg.validate()?;
    if cfg.mode != Mode::MonteCarlo {
        return Err(Error::Precondition(
            "random placement only applies in Monte Carlo mode".into(),
        ));
    }
    let mut rng = placement_rng(cfg);
    Ok((0..cfg.rows)
        .map(|_| rng.random_range(1..=cfg.columns))
        .collect())
}

/// Detection of an object `lateral_m` metres from the track, gated first by
/// the horizon and then by visibility before the sensor is consulted.
#[inline]
pub fn gated_detect<S: Sensor + ?Sized>(sensor: &S, scenario: &Scenario, lateral_m: u32) -> bool {
    let x = f64::from(lateral_m);
    if x > scenario.horizon_m() {
        return false;
    }
    if let Some(vis_m) = scenario.visibility_gate_m() {
        if x > vis_m {
            return false;
        }
    }
    sensor.detect(
        scenario.effective_altitude_m(),
        f64::from(scenario.object.size_m),
        x,
    )
}

pub fn run_experiment<S: Sensor + ?Sized>(
    sensor: &S,
    scenario: &Scenario,
    cfg: &ExperimentConfig,
) -> Result<DetectionData> {
    cfg.validate()?;
    let mut data = DetectionData::new(cfg.columns);
    match cfg.mode {
        Mode::Exhaustive => {
            for x in 1..=cfg.columns {
                data.record(x, gated_detect(sensor, scenario, x));
            }
        }
        Mode::MonteCarlo => {
            let mut rng = placement_rng(cfg);
            for _ in 0..cfg.rows {
                let x = rng.random_range(1..=cfg.columns);
                data.record(x, gated_detect(sensor, scenario, x));
            }
        }
    }
    Ok(data)
}
