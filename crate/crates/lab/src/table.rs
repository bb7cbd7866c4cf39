//! Numeric CSV tables for plotting, and a validator that reads them back.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // shortest representation that parses back to the same value
        format!("{v:?}")
    }
}

fn parse_cell(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| cell(*v)))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Schema(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv of numbers is ascii"))
    }

    /// Parses a table, requiring a header and one numeric cell per column in every row.
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if columns.is_empty() || columns.iter().any(String::is_empty) {
            return Err(Error::Schema("csv header has an empty column name".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|c| parse_cell(c).ok_or_else(|| Error::Schema(format!("row {}: {c:?} is not a number", i + 1))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }
}

/// Checks that `text` parses and reproduces `expected` exactly (NaN matches NaN).
pub fn validate_round_trip(text: &str, expected: &Table) -> Result<()> {
    let t = Table::parse(text)?;
    if t.columns != expected.columns {
        return Err(Error::Schema(format!("columns {:?} differ from {:?}", t.columns, expected.columns)));
    }
    if t.rows.len() != expected.rows.len() {
        return Err(Error::Schema(format!("{} rows read, {} written", t.rows.len(), expected.rows.len())));
    }
    for (i, (a, b)) in t.rows.iter().zip(&expected.rows).enumerate() {
        let same = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x.is_nan() && y.is_nan()));
        if !same {
            return Err(Error::Schema(format!("row {} does not round-trip", i + 1)));
        }
    }
    Ok(())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let err = |source| Error::Write { path: path.to_path_buf(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    std::fs::write(&tmp, bytes).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(err)
}
