//! Effective sweep width of a visual searcher.
//!
//! A helicopter crew member looks out over a grid of sea. Each row holds one
//! object; whether it is seen depends on the horizon, the visibility and the
//! diffraction limit of the eye. Detection fractions per lateral distance
//! form the lateral range curve, and its area is the sweep width.
//!
//! - [`units`]: distances, horizon, slant range, model constants
//! - [`sensor`]: the human eye detection model
//! - [`catalog`]: search objects
//! - [`experiment`]: grid placement and detection bookkeeping
//! - [`sweep`]: sweep width, its closed form, and the full sweep
//! - [`report`]: result files and reference-table comparison

pub mod catalog;
pub mod error;
pub mod experiment;
pub mod report;
pub mod sensor;
pub mod sweep;
pub mod units;

pub use catalog::{Catalog, SearchObject};
pub use error::{Error, Parsed, Result};
pub use experiment::{
    gated_detect, place_objects, run_experiment, ColumnStats, DetectionData, ExperimentConfig,
    Mode, Scenario,
};
pub use report::{
    compare_tables, read_results, write_results, CellKey, ComparisonReport, Format, ReferenceTable,
    ResultRecord, RunMetadata,
};
pub use sensor::{HumanEye, HumanEyeConfig, Sensor};
pub use sweep::{analytic_w, calculate_w, lrc_of, sweep_all, LateralRangeCurve, SweepWidthResult};
pub use units::{DistanceKm, DistanceM, ModelConstants};
