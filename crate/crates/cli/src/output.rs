//! JSON-lines records and CSV summaries.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Summary table; every row has one cell per header column.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Summary {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            out.write_record(row).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

/// Plain decimal formatting that round-trips.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn record<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable record")
}

pub fn write_jsonl<W: Write>(records: &[Value], mut w: W) -> Result<(), CliError> {
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| CliError::Io(io::Error::other(e)))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<dir>/<stem>.jsonl` and `<dir>/<stem>.csv`.
pub fn write_files(dir: &Path, stem: &str, records: &[Value], summary: &Summary) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_jsonl(records, BufWriter::new(File::create(dir.join(format!("{stem}.jsonl")))?))?;
    summary.write_csv(BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?))?;
    Ok(())
}
