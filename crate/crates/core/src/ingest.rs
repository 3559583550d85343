//! Stratified count data from CSV.
//!
//! Expects one row per region with a name, a confirmed-case count and a death
//! count. Columns are located by header name, case-insensitively, and other
//! columns are ignored. Rows with zero confirmed cases carry no information
//! and are dropped.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiple::{MultipleProblem, Stratum};
use crate::output::{render_rows, write_atomic, Format};

const NAME_COLUMNS: &[&str] = &["province_state", "region", "name", "state"];
const CONFIRMED_COLUMN: &str = "confirmed";
const DEATHS_COLUMN: &str = "deaths";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub name: String,
    pub confirmed: u64,
    pub deaths: u64,
}

fn find_column(headers: &csv::StringRecord, aliases: &[&str]) -> Option<usize> {
    aliases.iter().find_map(|alias| {
        headers.iter().position(|h| {
            h.trim()
                .trim_start_matches('\u{feff}')
                .eq_ignore_ascii_case(alias)
        })
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedRow {
            path: path.to_path_buf(),
            row,
            message: format!("{other:?}"),
        },
    }
}

/// All rows of the file, including zero-confirmed ones.
pub fn read_records(path: &Path) -> Result<Vec<StratumRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let missing = |column| Error::MissingColumn {
        path: path.to_path_buf(),
        column,
    };
    let name_col = find_column(&headers, NAME_COLUMNS).ok_or_else(|| missing("province_state"))?;
    let confirmed_col =
        find_column(&headers, &[CONFIRMED_COLUMN]).ok_or_else(|| missing(CONFIRMED_COLUMN))?;
    let deaths_col =
        find_column(&headers, &[DEATHS_COLUMN]).ok_or_else(|| missing(DEATHS_COLUMN))?;

    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let malformed = |message: String| Error::MalformedRow {
            path: path.to_path_buf(),
            row,
            message,
        };
        let field = |idx: usize, what: &str| {
            record
                .get(idx)
                .map(str::trim)
                .ok_or_else(|| malformed(format!("missing {what} field")))
        };
        let count = |idx: usize, what: &str| -> Result<u64> {
            let raw = field(idx, what)?;
            raw.parse::<u64>()
                .map_err(|_| malformed(format!("{what} `{raw}` is not a nonnegative integer")))
        };
        let name = field(name_col, "name")?.to_string();
        if name.is_empty() {
            return Err(malformed("empty region name".into()));
        }
        let confirmed = count(confirmed_col, CONFIRMED_COLUMN)?;
        let deaths = count(deaths_col, DEATHS_COLUMN)?;
        if deaths > confirmed {
            return Err(Error::DeathsExceedConfirmed {
                path: path.to_path_buf(),
                row,
                name,
                confirmed,
                deaths,
            });
        }
        records.push(StratumRecord {
            name,
            confirmed,
            deaths,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    Ok(records)
}

/// Strata with `n = confirmed`, observed count `deaths`, true rate
/// `deaths / confirmed`, and the common boundary `theta_star`.
pub fn load_strata(path: &Path, theta_star: f64) -> Result<MultipleProblem> {
    let strata = read_records(path)?
        .into_iter()
        .filter(|r| r.confirmed > 0)
        .map(|r| {
            Stratum::new(r.name, r.confirmed, theta_star)?
                .with_theta(r.deaths as f64 / r.confirmed as f64)?
                .with_count(r.deaths)
        })
        .collect::<Result<Vec<_>>>()?;
    if strata.is_empty() {
        return Err(Error::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    MultipleProblem::with_defaults(strata)
}

/// Writes `name,confirmed,deaths` rows that [`load_strata`] reads back.
pub fn write_strata(path: &Path, problem: &MultipleProblem) -> Result<()> {
    let records = problem
        .strata()
        .iter()
        .map(|s| {
            let deaths = s.r.ok_or_else(|| {
                Error::usage(format!("stratum `{}` has no observed count", s.label))
            })?;
            Ok(StratumRecord {
                name: s.label.clone(),
                confirmed: s.n,
                deaths,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(path, &render_rows(&records, Format::Csv)?)
}
