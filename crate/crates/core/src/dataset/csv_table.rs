use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header plus string cells, one record per row. Header names and cells are
/// stored trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name.trim())
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Parses RFC 4180 CSV bytes. Invalid UTF-8 is replaced rather than rejected;
/// the public Crunchbase export is not clean UTF-8.
pub fn parse_csv(bytes: &[u8], source: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut records = reader.byte_records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(source, e))?,
        None => return Err(Error::Empty("csv file has no header")),
    };
    let header: Vec<String> = header.iter().map(cell).collect();
    if header.iter().all(String::is_empty) {
        return Err(Error::Empty("csv header is blank"));
    }
    let mut rows = Vec::new();
    for (k, rec) in records.enumerate() {
        let rec = rec.map_err(|e| csv_error(source, e))?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                // header is row 1
                row: k + 2,
                expected: header.len(),
                got: rec.len(),
            });
        }
        rows.push(rec.iter().map(cell).collect());
    }
    Ok(RawTable { header, rows })
}

fn cell(raw: &[u8]) -> String {
    String::from_utf8_lossy(raw).trim().to_string()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn load_csv(path: &Path) -> Result<RawTable> {
    let bytes = std::fs::read(path)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::Empty("csv file is empty"));
    }
    parse_csv(&bytes, path)
}

/// Statuses counted as a successful exit.
pub const EXITED_STATUSES: [&str; 2] = ["acquired", "ipo"];
pub const CLOSED_STATUS: &str = "closed";

/// 1 for exited, 0 for closed, `None` for anything else.
pub fn status_label(status: &str) -> Option<u8> {
    let s = status.trim().to_ascii_lowercase();
    if EXITED_STATUSES.contains(&s.as_str()) {
        Some(1)
    } else if s == CLOSED_STATUS {
        Some(0)
    } else {
        None
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusSummary {
    pub input_rows: usize,
    pub kept_rows: usize,
    /// Row count per lowercased status, including dropped statuses.
    pub per_status: BTreeMap<String, usize>,
}

/// Keeps exited (acquired, ipo) and closed companies.
pub fn filter_status(table: &RawTable, status_column: &str) -> Result<(RawTable, StatusSummary)> {
    let col = table.column(status_column)?;
    let mut summary = StatusSummary {
        input_rows: table.len(),
        ..StatusSummary::default()
    };
    let mut rows = Vec::new();
    for row in &table.rows {
        let status = row[col].to_ascii_lowercase();
        let key = if status.is_empty() {
            "<blank>".to_string()
        } else {
            status.clone()
        };
        *summary.per_status.entry(key).or_default() += 1;
        if status_label(&status).is_some() {
            rows.push(row.clone());
        }
    }
    summary.kept_rows = rows.len();
    if rows.is_empty() {
        log::warn!("status filter kept 0 of {} rows", table.len());
    }
    Ok((
        RawTable {
            header: table.header.clone(),
            rows,
        },
        summary,
    ))
}
