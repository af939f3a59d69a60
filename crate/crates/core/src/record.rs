//! Flat per-year records: the column contract shared by trajectory
//! serialization and target evaluation.
//!
//! A flat record is the year plus an ordered list of named numeric fields.
//! The order is fixed by the engine (state columns, land areas in sorted
//! type order, then the indicator columns) and every consumer preserves it.

/// One trajectory row flattened to named numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatRecord {
    pub year: f64,
    pub fields: Vec<(String, f64)>,
}

impl FlatRecord {
    /// Look up a field by column name.
    pub fn get(&self, key: &str) -> Option<f64> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Column names in order, excluding the leading `year`.
    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|(k, _)| k.as_str()).collect()
    }
}

/// Render an f64 with 17 significant digits so re-parsing recovers the
/// exact bit pattern. `-0.0` keeps its sign.
pub fn format_f64(value: f64) -> String {
    if value == 0.0 {
        return if value.is_sign_negative() { "-0".to_string() } else { "0".to_string() };
    }
    format!("{value:.16e}")
}
