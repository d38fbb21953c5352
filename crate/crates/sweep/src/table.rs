//! Tabular sweep output and its CSV form.

use std::io::{Read, Write};

use thiserror::Error;

/// Name of the trailing column holding per-row flags.
pub const STATUS_COLUMN: &str = "status";
/// Status of a row without flags.
pub const STATUS_OK: &str = "ok";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv has no header row")]
    MissingHeader,
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    BadNumber { row: usize, column: String, value: String },
    #[error("row {row} has {found} cells, header has {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("no column named `{0}`")]
    MissingColumn(String),
}

/// Formats with 12 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds to the value that survives a write/read cycle unchanged.
pub fn quantize(x: f64) -> f64 {
    format_number(x).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// `None` marks an empty cell.
    pub values: Vec<Option<f64>>,
    /// `ok` or `;`-separated `column:flag` entries.
    pub status: String,
}

/// Column-named numeric rows plus a status column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Row>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| TableError::MissingColumn(name.to_string()))
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>, TableError> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r.values[i]).collect())
    }

    /// Appends a row at full precision; non-finite values become empty.
    pub fn push(&mut self, values: Vec<Option<f64>>, flags: &[String]) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        let values = values.into_iter().map(|v| v.filter(|x| x.is_finite())).collect();
        let status = if flags.is_empty() {
            STATUS_OK.to_string()
        } else {
            flags.join(";")
        };
        self.rows.push(Row { values, status });
    }

    /// The table as it reads back from its CSV form.
    pub fn quantized(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                values: r.values.iter().map(|v| v.map(quantize)).collect(),
                status: r.status.clone(),
            })
            .collect();
        Self {
            columns: self.columns.clone(),
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TableError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        header.push(STATUS_COLUMN);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record: Vec<String> = row
                .values
                .iter()
                .map(|v| v.map(format_number).unwrap_or_default())
                .collect();
            record.push(row.status.clone());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory succeeds");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Parses a CSV with a header; a column named `status` is taken as the
    /// status column, every other cell must be empty or numeric.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, TableError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = r.records();
        let header = match records.next() {
            Some(h) => h?,
            None => return Err(TableError::MissingHeader),
        };
        let status_at = header.iter().position(|h| h == STATUS_COLUMN);
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != status_at)
            .map(|(_, h)| h.to_string())
            .collect();
        let mut table = Self::new(columns);
        for (row, record) in records.enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(TableError::RaggedRow {
                    row,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            let mut values = Vec::with_capacity(table.columns.len());
            let mut status = STATUS_OK.to_string();
            for (i, cell) in record.iter().enumerate() {
                if Some(i) == status_at {
                    status = cell.to_string();
                } else if cell.trim().is_empty() {
                    values.push(None);
                } else {
                    let x: f64 = cell.trim().parse().map_err(|_| TableError::BadNumber {
                        row,
                        column: header[i].to_string(),
                        value: cell.to_string(),
                    })?;
                    values.push(Some(x));
                }
            }
            table.rows.push(Row { values, status });
        }
        Ok(table)
    }
}
