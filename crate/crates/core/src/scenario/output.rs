use crate::{Error, Result};
use std::path::Path;

/// Floats are written with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// An in-memory CSV file with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        CsvTable {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(fmt_f64).collect());
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Writes every table and the metadata document into `dir`, creating it
/// if needed.
pub fn write_artifacts(
    dir: &Path,
    tables: &[CsvTable],
    metadata: &serde_json::Value,
) -> Result<()> {
    let encoded: Vec<(String, Vec<u8>)> = tables
        .iter()
        .map(|t| Ok((t.name.clone(), t.to_bytes()?)))
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in encoded {
        std::fs::write(dir.join(name), bytes)?;
    }
    let mut text =
        serde_json::to_string_pretty(metadata).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(dir.join("metadata.json"), text)?;
    Ok(())
}
