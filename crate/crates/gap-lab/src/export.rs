//! Sheet exports: CSV, and a row-major little-endian `f64` matrix with a JSON header.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::GapSheet;

pub const SHEET_CSV_HEADER: &str = "x,y,G";
pub const SHEET_SCHEMA: &str = "gap-sheet/1";

/// One line per grid point; undefined gaps are written as `NA`.
pub fn write_csv<W: Write>(sheet: &GapSheet, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SHEET_CSV_HEADER}")?;
    for (i, x) in sheet.xs.iter().enumerate() {
        for (j, y) in sheet.ys.iter().enumerate() {
            match sheet.get(i, j) {
                Some(g) => writeln!(w, "{x},{y},{g}")?,
                None => writeln!(w, "{x},{y},NA")?,
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryHeader {
    pub schema: String,
    pub rows: usize,
    pub cols: usize,
    pub dtype: String,
    pub order: String,
    /// Value standing for an undefined gap.
    pub missing: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub n: f64,
}

/// Header JSON and matrix bytes; undefined gaps are stored as NaN.
pub fn to_binary(sheet: &GapSheet) -> (String, Vec<u8>) {
    let (rows, cols) = sheet.shape();
    let header = BinaryHeader {
        schema: SHEET_SCHEMA.into(),
        rows,
        cols,
        dtype: "f64-le".into(),
        order: "row-major".into(),
        missing: "NaN".into(),
        xs: sheet.xs.clone(),
        ys: sheet.ys.clone(),
        n: sheet.frame.n,
    };
    let bytes = sheet.values.iter().flat_map(|v| v.unwrap_or(f64::NAN).to_le_bytes()).collect();
    (serde_json::to_string_pretty(&header).expect("header serializes"), bytes)
}

pub fn from_binary(header: &str, bytes: &[u8]) -> Result<GapSheet, String> {
    let h: BinaryHeader = serde_json::from_str(header).map_err(|e| e.to_string())?;
    if bytes.len() != 8 * h.rows * h.cols {
        return Err(format!("expected {} bytes, found {}", 8 * h.rows * h.cols, bytes.len()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .map(|v| (!v.is_nan()).then_some(v))
        .collect();
    let frame = model_core::ScalingFrame::new(h.n).map_err(|e| e.to_string())?;
    Ok(GapSheet { xs: h.xs, ys: h.ys, values, frame, exact: true })
}
