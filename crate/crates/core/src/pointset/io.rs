//! CSV exchange format: header `x1,...,xd`, one point per row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::PointSet;
use crate::error::{Error, Result};

pub fn write_csv<W: Write>(ps: &PointSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((1..=ps.dim()).map(|k| format!("x{k}")))?;
    for p in ps.iter() {
        w.write_record(p.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_path(ps: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    write_csv(ps, File::create(path)?)
}

/// Reads a point set, checking the header and the width of every row.
pub fn read_csv<R: Read>(reader: R, label: impl Into<String>) -> Result<PointSet> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = r.headers()?.clone();
    let d = header.len();
    for (k, name) in header.iter().enumerate() {
        if name != format!("x{}", k + 1) {
            return Err(Error::PointSet(format!(
                "bad header column {}: expected x{}, found {name:?}",
                k + 1,
                k + 1
            )));
        }
    }
    let mut coords = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rec.len(),
            });
        }
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::PointSet(format!("row {}: cannot parse {field:?} as a number", row + 1))
            })?;
            coords.push(v);
        }
    }
    PointSet::from_flat(d, coords, label)
}

pub fn read_csv_path(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    read_csv(File::open(path)?, path.display().to_string())
}
