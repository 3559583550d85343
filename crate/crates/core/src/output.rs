//! Plot-data carriers and CSV/JSON writers.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalues::PValueKind;

/// One curve: `y` against an ascending `x` (sample size, group size, `c`, or `t`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub kind: PValueKind,
    /// Parameter the curve is evaluated under (the alternative for power curves).
    pub theta: f64,
    pub c: f64,
}

impl CurveSeries {
    pub fn new(kind: PValueKind, theta: f64, c: f64) -> Self {
        Self {
            x: Vec::new(),
            y: Vec::new(),
            kind,
            theta,
            c,
        }
    }

    pub fn from_points(kind: PValueKind, theta: f64, c: f64, points: Vec<(f64, f64)>) -> Self {
        let (x, y) = points.into_iter().unzip();
        Self {
            x,
            y,
            kind,
            theta,
            c,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// `y` at the given `x`, if present.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        self.points().find(|&(px, _)| px == x).map(|(_, y)| y)
    }

    fn rows(&self) -> impl Iterator<Item = SeriesRow> + '_ {
        self.points().map(|(x, y)| SeriesRow {
            x,
            y,
            kind: self.kind,
            theta: self.theta,
            c: self.c,
        })
    }
}

#[derive(Debug, Serialize)]
struct SeriesRow {
    x: f64,
    y: f64,
    kind: PValueKind,
    theta: f64,
    c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::usage(format!("unknown format `{other}`"))),
        }
    }
}

/// Serializes flat records as CSV (header from the field names) or as a JSON array.
pub fn render_rows<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(csv_to_io)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// CSV uses one row per point with columns `x,y,kind,theta,c`; JSON keeps
/// one object per series.
pub fn render_series(series: &[CurveSeries], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let rows: Vec<SeriesRow> = series.iter().flat_map(CurveSeries::rows).collect();
            render_rows(&rows, Format::Csv)
        }
        Format::Json => render_rows(series, Format::Json),
    }
}

fn csv_to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.exists() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
