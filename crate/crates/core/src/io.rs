//! Plot-ready data export: CSV tables, complex matrices with interleaved
//! real/imaginary columns, gnuplot heat-map grids, and JSON documents.
//! All writers format floats with shortest-roundtrip notation, so a rerun
//! with identical inputs produces bit-identical files.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Numeric table with one header row.
pub fn write_table_csv(
    path: impl AsRef<Path>,
    headers: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    for row in rows {
        if row.len() != headers.len() {
            return Err(Error::DimensionMismatch {
                expected: headers.len(),
                got: row.len(),
            });
        }
    }
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_error)?;
    w.write_record(headers).map_err(csv_error)?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        w.write_record(&fields).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Complex matrix as CSV, each entry split into adjacent re/im columns.
pub fn write_complex_matrix_csv(path: impl AsRef<Path>, m: &DMatrix<C64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_error)?;
    let headers: Vec<String> = (0..m.ncols())
        .flat_map(|j| [format!("re_{j}"), format!("im_{j}")])
        .collect();
    w.write_record(&headers).map_err(csv_error)?;
    for i in 0..m.nrows() {
        let fields: Vec<String> = (0..m.ncols())
            .flat_map(|j| {
                let z = m[(i, j)];
                [format!("{}", z.re), format!("{}", z.im)]
            })
            .collect();
        w.write_record(&fields).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Matrix as a gnuplot-compatible grid: `row col re im abs` records with a
/// blank line after each row block (splot/pm3d input).
pub fn write_gnuplot_grid(path: impl AsRef<Path>, m: &DMatrix<C64>) -> Result<()> {
    let mut out = std::fs::File::create(path.as_ref())?;
    writeln!(out, "# row col re im abs")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(out, "{i} {j} {} {} {}", z.re, z.im, z.norm())?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    text.push('\n');
    std::fs::write(path.as_ref(), text)?;
    Ok(())
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    std::fs::write(path.as_ref(), text)?;
    Ok(())
}
