use gap_lab::zeros::Quadrant;
use gap_lab::{quadrant_isolated, slice_minima, zero_set, GapSheet, MinimumKind, ZeroSet};

use crate::NetworkType;

/// Isolation radii in rescaled units.
pub const DEFAULT_RADII: [f64; 3] = [0.125, 0.25, 0.5];

/// Strict plateau minimum through `k`, within the run of defined values around `k`.
fn strict_min_at(slice: &[Option<f64>], k: usize) -> Option<bool> {
    slice[k]?;
    let mut lo = k;
    while lo > 0 && slice[lo - 1].is_some() {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < slice.len() && slice[hi + 1].is_some() {
        hi += 1;
    }
    if lo == k || hi == k {
        return None;
    }
    let seg: Vec<f64> = slice[lo..=hi].iter().map(|v| v.unwrap()).collect();
    Some(slice_minima(&seg).iter().any(|m| m.kind == MinimumKind::Strict && m.contains(k - lo)))
}

/// [`classify_gap`] with a precomputed zero set.
pub fn classify_gap_with(sheet: &GapSheet, zeros: &ZeroSet, i: usize, j: usize, radii: &[f64]) -> NetworkType {
    let (rows, cols) = sheet.shape();
    if i == 0 || j == 0 || i + 1 >= rows || j + 1 >= cols || sheet.get(i, j).is_none() {
        return NetworkType::Other;
    }
    if sheet.is_zero(i, j) {
        let iso = |q| quadrant_isolated(zeros, (i, j), q, radii).map(|r| r.isolated);
        return match (iso(Quadrant::MinusPlus), iso(Quadrant::PlusMinus)) {
            (Ok(false), Ok(false)) => NetworkType::IV,
            (Ok(true), Ok(false)) => NetworkType::Va,
            (Ok(false), Ok(true)) => NetworkType::Vb,
            _ => NetworkType::Other,
        };
    }
    match (strict_min_at(&sheet.row(i), j), strict_min_at(&sheet.col(j), i)) {
        (Some(false), Some(false)) => NetworkType::I,
        (Some(true), Some(false)) => NetworkType::IIa,
        (Some(false), Some(true)) => NetworkType::IIb,
        (Some(true), Some(true)) => NetworkType::III,
        _ => NetworkType::Other,
    }
}

/// Network type at grid point `(i, j)` read from the gap sheet alone.
///
/// Positive gaps use strict plateau minima of the row slice `G_x` and the
/// column slice `Ĝ_y`; zeros use quadrant isolation at the smallest radius.
/// Boundary points and undefined gaps are `Other`.
pub fn classify_gap(sheet: &GapSheet, i: usize, j: usize, radii: &[f64]) -> NetworkType {
    classify_gap_with(sheet, &zero_set(sheet), i, j, radii)
}
