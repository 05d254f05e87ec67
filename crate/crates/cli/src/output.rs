//! Report writing: flat CSV rows or a JSON document, to a file or stdout.

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::Failure;

pub const OUTPUT_DIR_ENV: &str = "SHEPARD_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Where the report goes: an explicit path (joined to the output directory
/// when relative), `<dir>/<command>.<ext>`, or stdout.
pub fn resolve_path(explicit: Option<&str>, command: &str, format: Format) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match (explicit, dir) {
        (Some(p), Some(dir)) if PathBuf::from(p).is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(PathBuf::from(p)),
        (None, Some(dir)) => Some(dir.join(format!("{command}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    fn open(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
            }
            None => Box::new(std::io::stdout().lock()),
        })
    }

    /// CSV: one line per row. JSON: `{"command", "summary", "rows"}`.
    pub fn rows<R: Serialize>(&self, command: &str, summary: Value, rows: &[R]) -> Result<(), Failure> {
        let mut out = self.open()?;
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                for r in rows {
                    w.serialize(r).map_err(csv_failure)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let doc = serde_json::json!({ "command": command, "summary": summary, "rows": rows });
                serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| match e.io_error_kind() {
                    Some(kind) => Failure::from(std::io::Error::from(kind)),
                    None => Failure::Usage(e.to_string()),
                })?;
                writeln!(out)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Writes raw bytes (used for point-set CSV).
    pub fn bytes(&self, data: &[u8]) -> Result<(), Failure> {
        let mut out = self.open()?;
        out.write_all(data)?;
        out.flush()?;
        Ok(())
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => Failure::Usage(format!("{other:?}")),
    }
}

/// Points rendered as space-separated coordinates, for CSV cells.
pub fn join_point(p: &[f64]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
