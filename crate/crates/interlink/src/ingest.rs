//! Panel loading, validation, and preprocessing filters.
//!
//! The canonical input is a wide CSV with a `year` column followed by one
//! column per indicator. Values are normalized scores in [0, 100]; cells
//! that are empty or read `NA`, `n/a`, `NaN` (case-insensitive) are treated
//! as missing, as is anything that fails to parse as a number.

use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive year range an analysis covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if end <= start {
            return Err(Error::Parameter {
                name: "window",
                value: (end - start) as f64,
                expected: "end year strictly after start year",
            });
        }
        Ok(Self { start, end })
    }

    /// Number of annual observations in the window.
    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.start && year <= self.end
    }

    /// Parse a `START:END` flag value, e.g. `2000:2024`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let err = || Error::Load {
            location: format!("--window {s}"),
            message: "expected START:END with integer years".to_string(),
        };
        let (a, b) = s.split_once(':').ok_or_else(err)?;
        let start: i32 = a.trim().parse().map_err(|_| err())?;
        let end: i32 = b.trim().parse().map_err(|_| err())?;
        Window::new(start, end)
    }
}

/// One indicator's annual values, aligned to a panel window.
///
/// `values[k]` holds the observation for year `window.start + k`; `None`
/// marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub id: String,
    pub label: Option<String>,
    pub sdg: Option<u8>,
    values: Vec<Option<f64>>,
}

impl IndicatorSeries {
    pub fn new(id: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self {
            id: id.into(),
            label: None,
            sdg: None,
            values,
        }
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// Dense values; only valid once the series passed the missing filter.
    pub fn dense(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|v| {
                v.ok_or_else(|| {
                    Error::Contract(format!("series `{}` still has missing values", self.id))
                })
            })
            .collect()
    }
}

/// A window-aligned collection of indicator series.
#[derive(Debug, Clone)]
pub struct Panel {
    pub window: Window,
    pub series: Vec<IndicatorSeries>,
}

impl Panel {
    pub fn series_ids(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|s| s.id.as_str())
    }

    pub fn get(&self, id: &str) -> Option<&IndicatorSeries> {
        self.series.iter().find(|s| s.id == id)
    }
}

/// Why a series was removed by [`filter_panel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    /// At least one missing value inside the window.
    Missing,
    /// Constant on `[start, end-1]` or on `[start+1, end]`, so one of the
    /// lag-1 aligned slices carries no variation.
    ConstantLagSlice,
}

impl DropReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            DropReason::Missing => "missing",
            DropReason::ConstantLagSlice => "constant-lag-slice",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DropRecord {
    pub id: String,
    pub reason: DropReason,
}

/// A value outside the normalized [0, 100] range.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeViolation {
    pub id: String,
    pub year: i32,
    pub value: f64,
}

/// Optional indicator metadata (`id,label,sdg` CSV rows).
#[derive(Debug, Clone)]
pub struct MetaRecord {
    pub id: String,
    pub label: Option<String>,
    pub sdg: Option<u8>,
}

const MISSING_MARKERS: [&str; 3] = ["na", "n/a", "nan"];

fn parse_cell(raw: &str) -> Option<f64> {
    let t = raw.trim();
    if t.is_empty() || MISSING_MARKERS.contains(&t.to_ascii_lowercase().as_str()) {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load a wide CSV panel, aligning rows to `window`.
///
/// Years outside the window are ignored; window years absent from the file
/// leave missing values behind (and the series then falls to the missing
/// filter). Fails on a malformed header, a non-numeric year cell, duplicate
/// indicator ids, or years out of order.
pub fn load_panel(path: impl AsRef<Path>, window: Window) -> Result<Panel> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut text = String::new();
    file.read_to_string(&mut text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_panel(&text, window)
}

/// Parse a wide CSV panel from an in-memory string. See [`load_panel`].
pub fn parse_panel(text: &str, window: Window) -> Result<Panel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec,
        Some(Err(e)) => {
            return Err(Error::Load {
                location: "header".to_string(),
                message: e.to_string(),
            })
        }
        None => {
            return Err(Error::Load {
                location: "header".to_string(),
                message: "empty file".to_string(),
            })
        }
    };

    if header.len() < 2 || !header[0].trim().eq_ignore_ascii_case("year") {
        return Err(Error::Load {
            location: "header".to_string(),
            message: "expected `year,<id1>,<id2>,...`".to_string(),
        });
    }

    let mut ids = Vec::with_capacity(header.len() - 1);
    let mut seen = HashSet::new();
    for (col, raw) in header.iter().skip(1).enumerate() {
        let id = raw.trim().to_string();
        if id.is_empty() {
            return Err(Error::Load {
                location: format!("header column {}", col + 2),
                message: "empty indicator id".to_string(),
            });
        }
        // ids flow verbatim into CSV/DOT report files
        if id.contains([',', '"', '\n', '\r']) {
            return Err(Error::Load {
                location: format!("header column {}", col + 2),
                message: format!("indicator id `{id}` contains a comma, quote, or line break"),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId {
                id,
                column: col + 2,
            });
        }
        ids.push(id);
    }

    let len = window.len();
    let mut columns: Vec<Vec<Option<f64>>> = vec![vec![None; len]; ids.len()];
    let mut last_year: Option<i32> = None;

    for (row_idx, record) in records.enumerate() {
        let row = row_idx + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Load {
            location: format!("row {row}"),
            message: e.to_string(),
        })?;
        if record.len() != ids.len() + 1 {
            return Err(Error::Load {
                location: format!("row {row}"),
                message: format!("expected {} cells, found {}", ids.len() + 1, record.len()),
            });
        }
        let year: i32 = record[0].trim().parse().map_err(|_| Error::Load {
            location: format!("row {row}, column year"),
            message: format!("non-numeric year `{}`", &record[0]),
        })?;
        if let Some(prev) = last_year {
            if year <= prev {
                return Err(Error::Load {
                    location: format!("row {row}, column year"),
                    message: format!("years must be strictly increasing ({prev} then {year})"),
                });
            }
        }
        last_year = Some(year);
        if !window.contains(year) {
            continue;
        }
        let slot = (year - window.start) as usize;
        for (col, cell) in record.iter().skip(1).enumerate() {
            columns[col][slot] = parse_cell(cell);
        }
    }

    let series = ids
        .into_iter()
        .zip(columns)
        .map(|(id, values)| IndicatorSeries::new(id, values))
        .collect();

    Ok(Panel { window, series })
}

/// Load `id,label,sdg` metadata rows. The `sdg` cell may be empty.
pub fn load_metadata(path: impl AsRef<Path>) -> Result<Vec<MetaRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| Error::Load {
            location: format!("metadata row {row}"),
            message: e.to_string(),
        })?;
        if record.is_empty() {
            continue;
        }
        let id = record[0].trim().to_string();
        let label = record
            .get(1)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from);
        let sdg = match record.get(2).map(str::trim).filter(|s| !s.is_empty()) {
            None => None,
            Some(raw) => {
                let v: u8 = raw.parse().map_err(|_| Error::Load {
                    location: format!("metadata row {row}, column sdg"),
                    message: format!("non-numeric sdg `{raw}`"),
                })?;
                if !(1..=17).contains(&v) {
                    return Err(Error::Load {
                        location: format!("metadata row {row}, column sdg"),
                        message: format!("sdg {v} outside 1..=17"),
                    });
                }
                Some(v)
            }
        };
        out.push(MetaRecord { id, label, sdg });
    }
    Ok(out)
}

/// Attach metadata to matching panel series; returns how many ids matched.
pub fn apply_metadata(panel: &mut Panel, meta: &[MetaRecord]) -> usize {
    let mut matched = 0;
    for series in &mut panel.series {
        if let Some(m) = meta.iter().find(|m| m.id == series.id) {
            series.label = m.label.clone();
            series.sdg = m.sdg;
            matched += 1;
        }
    }
    matched
}

fn is_constant(values: &[Option<f64>]) -> bool {
    let first = values[0].expect("missing filter runs first");
    values
        .iter()
        .all(|v| v.expect("missing filter runs first") == first)
}

/// Remove series unusable for lag-1 estimation: any missing value in the
/// window, or literal constancy on either lag-aligned slice.
///
/// Returns the retained panel plus a drop report. Fails when the window has
/// fewer than 3 years or fewer than 2 series survive.
pub fn filter_panel(panel: &Panel) -> Result<(Panel, Vec<DropRecord>)> {
    if panel.window.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "window {}..{} has fewer than 3 years",
            panel.window.start, panel.window.end
        )));
    }
    let len = panel.window.len();
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for series in &panel.series {
        if series.has_missing() {
            dropped.push(DropRecord {
                id: series.id.clone(),
                reason: DropReason::Missing,
            });
            continue;
        }
        let values = series.values();
        if is_constant(&values[..len - 1]) || is_constant(&values[1..]) {
            dropped.push(DropRecord {
                id: series.id.clone(),
                reason: DropReason::ConstantLagSlice,
            });
            continue;
        }
        retained.push(series.clone());
    }
    if retained.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "only {} series survive filtering; need at least 2",
            retained.len()
        )));
    }
    Ok((
        Panel {
            window: panel.window,
            series: retained,
        },
        dropped,
    ))
}

/// List every value outside [0, 100]. Bounds are inclusive.
pub fn validate_range(panel: &Panel) -> Vec<RangeViolation> {
    let mut out = Vec::new();
    for series in &panel.series {
        for (k, value) in series.values().iter().enumerate() {
            if let Some(v) = value {
                if *v < 0.0 || *v > 100.0 {
                    out.push(RangeViolation {
                        id: series.id.clone(),
                        year: panel.window.start + k as i32,
                        value: *v,
                    });
                }
            }
        }
    }
    out
}

/// Strict-mode range check: the first violation becomes an error.
pub fn enforce_range(panel: &Panel) -> Result<()> {
    let violations = validate_range(panel);
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::Range {
            id: v.id.clone(),
            year: v.year,
            value: v.value,
            total: violations.len(),
        }),
    }
}
