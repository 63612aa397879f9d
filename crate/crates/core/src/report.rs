//! Result files, reference tables and model-versus-reference comparison.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{csv_io, Catalog};
use crate::error::{Error, Parsed, Result};
use crate::experiment::{Mode, RNG_ALGORITHM};
use crate::sweep::SweepWidthResult;
use crate::units::is_positive_finite;

pub const RESULTS_HEADER: [&str; 8] = [
    "object",
    "altitude_m",
    "visibility_km",
    "w_km",
    "coverage_fraction",
    "mode",
    "seed",
    "rows",
];

pub const REFERENCE_HEADER: [&str; 4] = ["object", "altitude_m", "visibility_km", "w_km"];

const REPORT_HEADER: [&str; 7] = [
    "object",
    "altitude_m",
    "visibility_km",
    "model_w_km",
    "reference_w_km",
    "abs_error_km",
    "ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// One row of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub object: String,
    pub altitude_m: u32,
    pub visibility_km: f64,
    pub w_km: f64,
    pub coverage_fraction: f64,
    pub mode: Mode,
    pub seed: u64,
    pub rows: u32,
}

impl From<&SweepWidthResult> for ResultRecord {
    fn from(r: &SweepWidthResult) -> Self {
        ResultRecord {
            object: r.scenario.object.name.clone(),
            altitude_m: r.scenario.altitude_m,
            visibility_km: r.scenario.visibility_km,
            w_km: r.w_km,
            coverage_fraction: r.coverage_fraction,
            mode: r.mode,
            seed: r.seed,
            rows: r.rows,
        }
    }
}

impl ResultRecord {
    pub fn key(&self) -> CellKey {
        CellKey::new(&self.object, self.altitude_m, self.visibility_km)
    }
}

/// Settings that produced a results file. Written as a `#` comment line so
/// the body stays a plain table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetadata {
    pub entries: Vec<(String, String)>,
}

impl RunMetadata {
    pub fn new() -> Self {
        let mut m = RunMetadata::default();
        m.push(
            "generator",
            concat!("sweepwidth ", env!("CARGO_PKG_VERSION")),
        );
        m.push("rng", RNG_ALGORITHM);
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }
}

impl fmt::Display for RunMetadata {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("#")?;
        for (k, v) in &self.entries {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

pub fn write_results<W: Write>(
    mut sink: W,
    records: &[ResultRecord],
    metadata: &RunMetadata,
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => {
            if !metadata.entries.is_empty() {
                writeln!(sink, "{metadata}")?;
            }
            let mut wtr = csv::Writer::from_writer(&mut sink);
            if records.is_empty() {
                wtr.write_record(RESULTS_HEADER).map_err(csv_io)?;
            }
            for r in records {
                wtr.serialize(r).map_err(csv_io)?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, records)?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

/// Reads a results file in either format; JSON is recognised by its first
/// non-blank character.
pub fn read_results<R: Read>(source: R) -> Result<Vec<ResultRecord>> {
    let mut reader = BufReader::new(source);
    let is_json = loop {
        let buf = reader.fill_buf()?;
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(i) => {
                let c = buf[i];
                break c == b'[' || c == b'{';
            }
            None if buf.is_empty() => break false,
            None => {
                let n = buf.len();
                reader.consume(n);
            }
        }
    };
    if is_json {
        return Ok(serde_json::from_reader(reader)?);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers != RESULTS_HEADER[..] {
        return Err(Error::parse(
            headers.position().map_or(1, |p| p.line()),
            format!("expected header `{}`", RESULTS_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record
            .map_err(|e| Error::parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        out.push(
            record
                .deserialize(Some(&headers))
                .map_err(|e| Error::parse(line, e.to_string()))?,
        );
    }
    Ok(out)
}

/// Join key for W tables. Visibilities compare by exact bit pattern, which
/// is stable for values that were parsed from or printed as decimal text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellKey {
    pub object: String,
    pub altitude_m: u32,
    pub visibility_km: f64,
}

impl CellKey {
    pub fn new(object: &str, altitude_m: u32, visibility_km: f64) -> Self {
        CellKey {
            object: object.to_string(),
            altitude_m,
            visibility_km,
        }
    }
}

impl PartialEq for CellKey {
    fn eq(&self, other: &Self) -> bool {
        self.object == other.object
            && self.altitude_m == other.altitude_m
            && self.visibility_km.to_bits() == other.visibility_km.to_bits()
    }
}

impl Eq for CellKey {}

impl Hash for CellKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.object.hash(state);
        self.altitude_m.hash(state);
        self.visibility_km.to_bits().hash(state);
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {} m, {} km)",
            self.object, self.altitude_m, self.visibility_km
        )
    }
}

/// Published sweep widths keyed by (object, altitude, visibility).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceTable {
    cells: Vec<(CellKey, f64)>,
    index: HashMap<CellKey, usize>,
}

impl ReferenceTable {
    pub fn new<I: IntoIterator<Item = (CellKey, f64)>>(cells: I) -> Result<Self> {
        let mut table = ReferenceTable::default();
        for (key, w) in cells {
            table.insert(key, w).map_err(Error::Config)?;
        }
        Ok(table)
    }

    fn insert(&mut self, key: CellKey, w_km: f64) -> std::result::Result<(), String> {
        if !is_positive_finite(w_km) {
            return Err(format!("w_km must be positive, got {w_km} for {key}"));
        }
        if self.index.contains_key(&key) {
            return Err(format!("duplicate cell {key}"));
        }
        self.index.insert(key.clone(), self.cells.len());
        self.cells.push((key, w_km));
        Ok(())
    }

    pub fn get(&self, key: &CellKey) -> Option<f64> {
        self.index.get(key).map(|&i| self.cells[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellKey, f64)> {
        self.cells.iter().map(|(k, w)| (k, *w))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Reads a table with at least the columns `object,altitude_m,visibility_km,w_km`;
    /// extra columns are ignored, so a results file is also a valid table.
    /// Objects absent from `known` are kept but produce a warning.
    pub fn load<R: Read>(source: R, known: Option<&Catalog>) -> Result<Parsed<ReferenceTable>> {
        #[derive(Deserialize)]
        struct Row {
            object: String,
            altitude_m: u32,
            visibility_km: f64,
            w_km: f64,
        }

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
            warnings.push("reference table is empty".to_string());
            return Ok(Parsed::new(ReferenceTable::default(), warnings));
        }
        let header_line = headers.position().map_or(1, |p| p.line());
        for col in REFERENCE_HEADER {
            if !headers.iter().any(|h| h == col) {
                return Err(Error::parse(header_line, format!("missing column `{col}`")));
            }
        }

        let mut table = ReferenceTable::default();
        for record in rdr.records() {
            let record = record
                .map_err(|e| Error::parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let row: Row = record
                .deserialize(Some(&headers))
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if let Some(catalog) = known {
                if catalog.get(&row.object).is_none() {
                    warnings.push(format!("line {line}: unknown object {:?}", row.object));
                }
            }
            table
                .insert(
                    CellKey::new(&row.object, row.altitude_m, row.visibility_km),
                    row.w_km,
                )
                .map_err(|m| Error::parse(line, m))?;
        }
        if table.is_empty() {
            warnings.push("reference table has no rows".to_string());
        }
        Ok(Parsed::new(table, warnings))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparedCell {
    #[serde(flatten)]
    pub key: CellKey,
    pub model_w_km: f64,
    pub reference_w_km: f64,
    pub abs_error_km: f64,
    /// Model over reference.
    pub ratio: f64,
}

/// A cell present on one side only, with the value that side holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingCell {
    #[serde(flatten)]
    pub key: CellKey,
    pub w_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub cells_compared: usize,
    /// Mean absolute percentage error against the reference, in percent.
    pub mape_percent: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub missing_in_model: usize,
    pub missing_in_reference: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub cells: Vec<ComparedCell>,
    pub missing_in_model: Vec<MissingCell>,
    pub missing_in_reference: Vec<MissingCell>,
    pub summary: ComparisonSummary,
}

impl ComparisonReport {
    fn from_parts(
        cells: Vec<ComparedCell>,
        missing_in_model: Vec<MissingCell>,
        missing_in_reference: Vec<MissingCell>,
    ) -> Self {
        let n = cells.len();
        let (mape, min_ratio, max_ratio) = if n == 0 {
            (None, None, None)
        } else {
            let ape: f64 = cells
                .iter()
                .map(|c| c.abs_error_km / c.reference_w_km)
                .sum();
            let min = cells.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
            let max = cells
                .iter()
                .map(|c| c.ratio)
                .fold(f64::NEG_INFINITY, f64::max);
            (Some(100.0 * ape / n as f64), Some(min), Some(max))
        };
        let summary = ComparisonSummary {
            cells_compared: n,
            mape_percent: mape,
            min_ratio,
            max_ratio,
            missing_in_model: missing_in_model.len(),
            missing_in_reference: missing_in_reference.len(),
        };
        ComparisonReport {
            cells,
            missing_in_model,
            missing_in_reference,
            summary,
        }
    }

    /// One row per cell; the absent side of a missing cell is left blank
    /// along with the error and ratio. The summary goes in a leading `#` line.
    pub fn write<W: Write>(&self, mut sink: W, format: Format) -> Result<()> {
        if format == Format::Json {
            serde_json::to_writer_pretty(&mut sink, self)?;
            writeln!(sink)?;
            return Ok(());
        }
        let s = &self.summary;
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
        writeln!(
            sink,
            "# cells_compared={} mape_percent={} min_ratio={} max_ratio={} missing_in_model={} missing_in_reference={}",
            s.cells_compared,
            opt(s.mape_percent),
            opt(s.min_ratio),
            opt(s.max_ratio),
            s.missing_in_model,
            s.missing_in_reference
        )?;
        let mut wtr = csv::Writer::from_writer(&mut sink);
        wtr.write_record(REPORT_HEADER).map_err(csv_io)?;
        let key_fields = |k: &CellKey| {
            [
                k.object.clone(),
                k.altitude_m.to_string(),
                k.visibility_km.to_string(),
            ]
        };
        for c in &self.cells {
            let mut row = key_fields(&c.key).to_vec();
            row.extend(
                [c.model_w_km, c.reference_w_km, c.abs_error_km, c.ratio].map(|v| v.to_string()),
            );
            wtr.write_record(&row).map_err(csv_io)?;
        }
        for m in &self.missing_in_model {
            let mut row = key_fields(&m.key).to_vec();
            row.extend([
                String::new(),
                m.w_km.to_string(),
                String::new(),
                String::new(),
            ]);
            wtr.write_record(&row).map_err(csv_io)?;
        }
        for m in &self.missing_in_reference {
            let mut row = key_fields(&m.key).to_vec();
            row.extend([
                m.w_km.to_string(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            wtr.write_record(&row).map_err(csv_io)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a CSV report written by [`ComparisonReport::write`].
    pub fn read_csv<R: Read>(source: R) -> Result<ComparisonReport> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(source);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(1, e.to_string()))?
            .clone();
        if headers != REPORT_HEADER[..] {
            return Err(Error::parse(
                1,
                format!("expected header `{}`", REPORT_HEADER.join(",")),
            ));
        }
        let mut cells = Vec::new();
        let mut missing_in_model = Vec::new();
        let mut missing_in_reference = Vec::new();
        for record in rdr.records() {
            let record = record
                .map_err(|e| Error::parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let num = |i: usize| -> Result<f64> {
                record[i]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad number {:?}", &record[i])))
            };
            let key = CellKey::new(
                &record[0],
                record[1]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad altitude {:?}", &record[1])))?,
                num(2)?,
            );
            match (&record[3], &record[4]) {
                ("", "") => return Err(Error::parse(line, "both sides blank")),
                ("", _) => missing_in_model.push(MissingCell { key, w_km: num(4)? }),
                (_, "") => missing_in_reference.push(MissingCell { key, w_km: num(3)? }),
                _ => cells.push(ComparedCell {
                    key,
                    model_w_km: num(3)?,
                    reference_w_km: num(4)?,
                    abs_error_km: num(5)?,
                    ratio: num(6)?,
                }),
            }
        }
        Ok(ComparisonReport::from_parts(
            cells,
            missing_in_model,
            missing_in_reference,
        ))
    }
}

/// Joins model output with a reference table on (object, altitude, visibility).
/// Cells present on only one side are listed, never filled in.
pub fn compare_tables(model: &[ResultRecord], reference: &ReferenceTable) -> ComparisonReport {
    let mut cells = Vec::new();
    let mut missing_in_reference = Vec::new();
    let mut model_keys = HashMap::new();
    for r in model {
        let key = r.key();
        if model_keys.insert(key.clone(), ()).is_some() {
            continue;
        }
        match reference.get(&key) {
            Some(ref_w) => cells.push(ComparedCell {
                key,
                model_w_km: r.w_km,
                reference_w_km: ref_w,
                abs_error_km: (r.w_km - ref_w).abs(),
                ratio: r.w_km / ref_w,
            }),
            None => missing_in_reference.push(MissingCell { key, w_km: r.w_km }),
        }
    }
    let missing_in_model = reference
        .iter()
        .filter(|(k, _)| !model_keys.contains_key(*k))
        .map(|(k, w)| MissingCell {
            key: k.clone(),
            w_km: w,
        })
        .collect();
    ComparisonReport::from_parts(cells, missing_in_model, missing_in_reference)
}
