//! Historical-observation CSV ingestion.
//!
//! The dialect is strict: comma separator, `\n` newlines, dot decimal
//! separator only (locale commas are rejected as non-numeric), a `year`
//! column first, then any subset of the known column vocabulary. A column
//! header may carry a unit after a colon, e.g. `Y:eur`.

use sdsim_core::scenario::doc::nearest_key;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Column names a history file may declare, beyond `year`.
pub const COLUMN_VOCABULARY: [&str; 14] = [
    "Y", "L", "K", "P", "PPFL", "POP", "LAND", "GREEN_LAND", "C", "I", "G", "X", "M",
    "EU_GDPP_PPP",
];

#[derive(Debug, Clone, PartialEq)]
pub enum HistoryError {
    Io { path: String, message: String },
    MissingColumn { path: String, column: String },
    UnknownColumn { path: String, column: String, suggestion: Option<String> },
    DuplicateColumn { path: String, column: String },
    DuplicateYear { path: String, line: usize, year: f64 },
    OutOfOrderYear { path: String, line: usize, year: f64, previous: f64 },
    NonNumericCell { path: String, line: usize, column: String, content: String },
    RaggedRow { path: String, line: usize, expected: usize, got: usize },
}

impl fmt::Display for HistoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryError::Io { path, message } => write!(f, "{path}: {message}"),
            HistoryError::MissingColumn { path, column } => {
                write!(f, "{path}: required column {column:?} is missing from the header")
            }
            HistoryError::UnknownColumn { path, column, suggestion } => {
                write!(f, "{path}: unknown column {column:?}")?;
                if let Some(s) = suggestion {
                    write!(f, " (did you mean {s:?}?)")?;
                }
                Ok(())
            }
            HistoryError::DuplicateColumn { path, column } => {
                write!(f, "{path}: column {column:?} appears more than once")
            }
            HistoryError::DuplicateYear { path, line, year } => {
                write!(f, "{path}:{line}: duplicate year {year}")
            }
            HistoryError::OutOfOrderYear { path, line, year, previous } => {
                write!(f, "{path}:{line}: year {year} is not after the previous year {previous}")
            }
            HistoryError::NonNumericCell { path, line, column, content } => {
                write!(
                    f,
                    "{path}:{line}: column {column}: {content:?} is not a number \
                     (dot decimal separator required)"
                )
            }
            HistoryError::RaggedRow { path, line, expected, got } => {
                write!(f, "{path}:{line}: expected {expected} cells, got {got}")
            }
        }
    }
}

impl std::error::Error for HistoryError {}

/// Year-keyed observations with a declared column set.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryTable {
    pub years: Vec<f64>,
    /// Declared columns in header order, excluding `year`.
    pub columns: Vec<String>,
    /// Unit annotations from `NAME:unit` headers.
    pub units: BTreeMap<String, String>,
    rows: Vec<Vec<f64>>,
}

impl HistoryTable {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    /// All values of one column, in year order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let index = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|row| row[index]).collect())
    }
}

/// Parse a history CSV and check that every expected column is present.
pub fn ingest_history(path: &Path, expected_columns: &[&str]) -> Result<HistoryTable, HistoryError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| HistoryError::Io { path: display.clone(), message: e.to_string() })?;
    ingest_history_text(&text, &display, expected_columns)
}

/// Same as [`ingest_history`] but over in-memory text; `path` only labels errors.
pub fn ingest_history_text(
    text: &str,
    path: &str,
    expected_columns: &[&str],
) -> Result<HistoryTable, HistoryError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| HistoryError::MissingColumn {
        path: path.to_string(),
        column: "year".to_string(),
    })?;

    let mut columns = Vec::new();
    let mut units = BTreeMap::new();
    for (i, cell) in header.split(',').enumerate() {
        let (name, unit) = match cell.split_once(':') {
            Some((name, unit)) => (name, Some(unit)),
            None => (cell, None),
        };
        if i == 0 {
            if name != "year" {
                return Err(HistoryError::MissingColumn {
                    path: path.to_string(),
                    column: "year".to_string(),
                });
            }
            continue;
        }
        if !COLUMN_VOCABULARY.contains(&name) {
            return Err(HistoryError::UnknownColumn {
                path: path.to_string(),
                column: name.to_string(),
                suggestion: nearest_key(name, &COLUMN_VOCABULARY),
            });
        }
        if columns.iter().any(|c| c == name) {
            return Err(HistoryError::DuplicateColumn {
                path: path.to_string(),
                column: name.to_string(),
            });
        }
        if let Some(unit) = unit {
            units.insert(name.to_string(), unit.to_string());
        }
        columns.push(name.to_string());
    }
    for expected in expected_columns {
        if !columns.iter().any(|c| c == expected) {
            return Err(HistoryError::MissingColumn {
                path: path.to_string(),
                column: (*expected).to_string(),
            });
        }
    }

    let mut years: Vec<f64> = Vec::new();
    let mut rows = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() + 1 {
            // A comma decimal in the last column splits into extra cells; if
            // everything before it parses, report the joined tail as the
            // non-numeric cell it really is.
            if cells.len() > columns.len() + 1
                && cells[..columns.len()].iter().all(|c| c.parse::<f64>().is_ok())
            {
                return Err(HistoryError::NonNumericCell {
                    path: path.to_string(),
                    line: line_no,
                    column: columns.last().cloned().unwrap_or_else(|| "year".to_string()),
                    content: cells[columns.len()..].join(","),
                });
            }
            return Err(HistoryError::RaggedRow {
                path: path.to_string(),
                line: line_no,
                expected: columns.len() + 1,
                got: cells.len(),
            });
        }
        let parse = |cell: &str, column: &str| -> Result<f64, HistoryError> {
            cell.parse::<f64>().map_err(|_| HistoryError::NonNumericCell {
                path: path.to_string(),
                line: line_no,
                column: column.to_string(),
                content: cell.to_string(),
            })
        };
        let year = parse(cells[0], "year")?;
        if let Some(&previous) = years.last() {
            if year == previous {
                return Err(HistoryError::DuplicateYear {
                    path: path.to_string(),
                    line: line_no,
                    year,
                });
            }
            if year < previous {
                // an exact duplicate of an even earlier year is still a duplicate
                if years.contains(&year) {
                    return Err(HistoryError::DuplicateYear {
                        path: path.to_string(),
                        line: line_no,
                        year,
                    });
                }
                return Err(HistoryError::OutOfOrderYear {
                    path: path.to_string(),
                    line: line_no,
                    year,
                    previous,
                });
            }
        }
        let mut row = Vec::with_capacity(columns.len());
        for (cell, column) in cells[1..].iter().zip(&columns) {
            row.push(parse(cell, column)?);
        }
        years.push(year);
        rows.push(row);
    }

    Ok(HistoryTable { years, columns, units, rows })
}
