//! Trajectory serialization: CSV and JSON emitters plus the matching
//! parsers, with numbers rendered at 17 significant digits so an
//! emit -> ingest -> emit cycle is byte-identical.

use crate::error::CliError;
use sdsim_core::engine::{IndicatorSnapshot, Trajectory};
use sdsim_core::record::{format_f64, FlatRecord};
use serde_json::Value;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Flat trajectory rows plus their column order; the unit of serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTable {
    /// Column names after `year`.
    pub columns: Vec<String>,
    pub records: Vec<FlatRecord>,
}

impl FlatTable {
    pub fn from_trajectory(trajectory: &Trajectory) -> Self {
        Self { columns: trajectory.column_names(), records: trajectory.flat_records() }
    }
}

/// Fixed column names that precede the land block.
const STATE_COLUMNS: [&str; 3] = ["population", "capital", "resource_stock"];

/// Rebuild the canonical column order from an unordered key set: state
/// columns, `land_*` keys (already name-sorted), then the indicators.
fn canonical_columns(keys: &[String]) -> Option<Vec<String>> {
    let mut columns: Vec<String> = STATE_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut land: Vec<String> =
        keys.iter().filter(|k| k.starts_with("land_")).cloned().collect();
    land.sort();
    columns.extend(land);
    columns.extend(IndicatorSnapshot::FIELD_NAMES.iter().map(|s| s.to_string()));
    if columns.len() == keys.len() && keys.iter().all(|k| columns.contains(k)) {
        Some(columns)
    } else {
        None
    }
}

pub fn emit_csv(table: &FlatTable) -> String {
    let mut out = String::from("year");
    for column in &table.columns {
        out.push(',');
        out.push_str(column);
    }
    out.push('\n');
    for record in &table.records {
        out.push_str(&format_f64(record.year));
        for (_, value) in &record.fields {
            out.push(',');
            out.push_str(&format_f64(*value));
        }
        out.push('\n');
    }
    out
}

pub fn emit_json(table: &FlatTable) -> String {
    let mut out = String::from("[");
    for (i, record) in table.records.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str("  {\"year\": ");
        out.push_str(&format_f64(record.year));
        for (name, value) in &record.fields {
            out.push_str(", \"");
            out.push_str(name);
            out.push_str("\": ");
            out.push_str(&format_f64(*value));
        }
        out.push('}');
    }
    if !table.records.is_empty() {
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

/// Write a trajectory to `path` in the requested format.
pub fn emit_trajectory(trajectory: &Trajectory, format: Format, path: &Path) -> Result<(), CliError> {
    let table = FlatTable::from_trajectory(trajectory);
    write_table(&table, format, path)
}

pub fn write_table(table: &FlatTable, format: Format, path: &Path) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => emit_csv(table),
        Format::Json => emit_json(table),
    };
    std::fs::write(path, text).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_csv(text: &str, path: &str) -> Result<FlatTable, CliError> {
    let error = |message: String| CliError::Trajectory { path: path.to_string(), message };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| error("empty file".to_string()))?;
    let mut cells = header.split(',');
    if cells.next() != Some("year") {
        return Err(error("header must start with a year column".to_string()));
    }
    let columns: Vec<String> = cells.map(str::to_string).collect();

    let mut records: Vec<FlatRecord> = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() + 1 {
            return Err(error(format!(
                "line {line_no}: expected {} cells, got {}",
                columns.len() + 1,
                cells.len()
            )));
        }
        let parse = |cell: &str, what: &str| -> Result<f64, CliError> {
            cell.parse::<f64>()
                .map_err(|_| error(format!("line {line_no}: {what}: {cell:?} is not a number")))
        };
        let year = parse(cells[0], "year")?;
        if let Some(last) = records.last() {
            let previous: f64 = last.year;
            if year <= previous {
                return Err(error(format!(
                    "line {line_no}: year {year} is not after the previous year {previous}"
                )));
            }
        }
        let mut fields = Vec::with_capacity(columns.len());
        for (cell, column) in cells[1..].iter().zip(&columns) {
            fields.push((column.clone(), parse(cell, column)?));
        }
        records.push(FlatRecord { year, fields });
    }
    Ok(FlatTable { columns, records })
}

pub fn parse_json(text: &str, path: &str) -> Result<FlatTable, CliError> {
    let error = |message: String| CliError::Trajectory { path: path.to_string(), message };
    let value: Value =
        serde_json::from_str(text).map_err(|e| error(format!("invalid JSON: {e}")))?;
    let items = value.as_array().ok_or_else(|| error("expected a JSON array".to_string()))?;

    let mut columns: Option<Vec<String>> = None;
    let mut records: Vec<FlatRecord> = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let object = item
            .as_object()
            .ok_or_else(|| error(format!("record {i}: expected an object")))?;
        let mut year = None;
        let mut keys = Vec::new();
        for (key, value) in object {
            let number = value
                .as_f64()
                .ok_or_else(|| error(format!("record {i}: {key}: expected a number")))?;
            if key == "year" {
                year = Some(number);
            } else {
                keys.push((key.clone(), number));
            }
        }
        let year = year.ok_or_else(|| error(format!("record {i}: missing year")))?;
        if let Some(last) = records.last() {
            let previous: f64 = last.year;
            if year <= previous {
                return Err(error(format!(
                    "record {i}: year {year} is not after the previous year {previous}"
                )));
            }
        }
        let key_names: Vec<String> = keys.iter().map(|(k, _)| k.clone()).collect();
        let ordered = canonical_columns(&key_names)
            .ok_or_else(|| error(format!("record {i}: keys do not form a trajectory record")))?;
        match &columns {
            None => columns = Some(ordered.clone()),
            Some(existing) if *existing != ordered => {
                return Err(error(format!("record {i}: columns differ from earlier records")));
            }
            Some(_) => {}
        }
        let fields = ordered
            .iter()
            .map(|name| {
                let (_, value) = keys
                    .iter()
                    .find(|(k, _)| k == name)
                    .expect("canonical_columns only returns present keys");
                (name.clone(), *value)
            })
            .collect();
        records.push(FlatRecord { year, fields });
    }
    Ok(FlatTable { columns: columns.unwrap_or_default(), records })
}
